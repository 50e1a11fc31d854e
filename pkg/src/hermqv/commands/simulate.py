"""
The ``simulate`` subcommand dumps one replication of an experiment as CSV
``t,z1,z2`` on the grid ``t_i = gamma_N i``.
"""
import argparse
import logging

from allennlp.commands.subcommand import Subcommand
from overrides import overrides

from src.hermqv.commands.common import EXIT_OK, add_output_argument, output_stream
from src.hermqv.hermpath import rescale_selfsimilar, write_paths
from src.hermqv.mcharness import ExperimentConfig

logger = logging.getLogger(__name__)


@Subcommand.register("simulate")
class Simulate(Subcommand):
    @overrides
    def add_subparser(self, parser: argparse._SubParsersAction) -> argparse.ArgumentParser:
        description = """Simulate one path pair of an experiment."""
        subparser = parser.add_parser(self.name, description=description, help=description)
        subparser.add_argument("--config", type=str, required=True, help="experiment config (json)")
        subparser.add_argument("--N", type=int, default=None, help="number of steps (default: first of N_grid)")
        subparser.add_argument("--rep", type=int, default=0, help="replication index, selects the seed stream")
        subparser.add_argument("--seed", type=int, default=None, help="master seed, overrides the config")
        add_output_argument(subparser)
        subparser.set_defaults(func=simulate_from_args)
        return subparser


def simulate_from_args(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config).with_overrides(seed=args.seed)
    N = args.N if args.N is not None else config.N_grid[0]
    if N < 1 or args.rep < 0:
        raise ValueError(f"--N must be >= 1 and --rep >= 0, got N={N}, rep={args.rep}")
    pair = config.generator.generate(config.spec, N, config.seed, (N, args.rep))
    pair = rescale_selfsimilar(pair, config.schedule.gamma(N), config.spec.H1, config.spec.H2)
    with output_stream(args.output) as stream:
        write_paths(pair, stream)
    return EXIT_OK
