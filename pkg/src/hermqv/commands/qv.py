"""
The ``qv`` subcommand writes the per-replication decomposition
``V = V1 + V2 + 2 V3`` of an experiment as CSV ``rep,N,gamma,V,V1,V2,V3``.
"""
import argparse
import logging

from allennlp.commands.subcommand import Subcommand
from overrides import overrides
from tqdm import tqdm

from src.hermqv.commands.common import EXIT_OK, add_output_argument, output_stream
from src.hermqv.mcharness import ExperimentConfig, replicate
from src.hermqv.quadvar import write_decompositions

logger = logging.getLogger(__name__)


@Subcommand.register("qv")
class QuadraticVariation(Subcommand):
    @overrides
    def add_subparser(self, parser: argparse._SubParsersAction) -> argparse.ArgumentParser:
        description = """Quadratic variation and its decomposition, one row per replication."""
        subparser = parser.add_parser(self.name, description=description, help=description)
        subparser.add_argument("--config", type=str, required=True, help="experiment config (json)")
        subparser.add_argument("--N", type=int, nargs="+", default=None,
                               help="sizes to simulate (default: N_grid of the config)")
        subparser.add_argument("--replications", type=int, default=None,
                               help="replications per N (default: R of the config)")
        subparser.add_argument("--seed", type=int, default=None, help="master seed, overrides the config")
        add_output_argument(subparser)
        subparser.set_defaults(func=qv_from_args)
        return subparser


def qv_from_args(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config).with_overrides(seed=args.seed)
    sizes = args.N or config.N_grid
    replications = config.R if args.replications is None else args.replications
    if replications < 1 or min(sizes) < 1:
        raise ValueError(f"--replications and --N must be positive, got {replications}, {sizes}")

    def rows():
        for N in sizes:
            for r in tqdm(range(replications), desc=f"N={N}", disable=not args.progress):
                row = replicate(config, N, r).to_dict()
                row["rep"] = r
                yield row

    with output_stream(args.output) as stream:
        write_decompositions(rows(), stream)
    return EXIT_OK
