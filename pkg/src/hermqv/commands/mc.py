"""
The ``mc`` subcommand runs a Monte Carlo experiment and prints its report,
together with the verdict against the regime classifier.

.. code-block:: bash

    $ python run.py mc --config configs/schedule_sweep/rho_0.json --workers 4
"""
import argparse
import logging

from allennlp.commands.subcommand import Subcommand
from overrides import overrides

from src.hermqv.analytic.regime import classify_regime
from src.hermqv.commands.common import (EXIT_BOUNDARY, EXIT_OK, add_experiment_arguments,
                                        add_output_argument, dump_json, load_experiment,
                                        output_stream)
from src.hermqv.mcharness import compare, resolve_workers, run

logger = logging.getLogger(__name__)


@Subcommand.register("mc")
class MonteCarlo(Subcommand):
    @overrides
    def add_subparser(self, parser: argparse._SubParsersAction) -> argparse.ArgumentParser:
        description = """Estimate the variance scaling of a statistic and compare it with the prediction."""
        subparser = parser.add_parser(self.name, description=description, help=description)
        add_experiment_arguments(subparser)
        subparser.add_argument("--workers", type=int, default=None,
                               help="worker processes (default: $HERMQV_NUM_WORKERS, then the cpu count)")
        subparser.add_argument("--format", choices=["json", "csv"], default="json")
        subparser.add_argument("--check-dominance", action="store_true",
                               help="also require the empirical dominant term to match the prediction")
        subparser.add_argument("--skip-shape", action="store_true", help="do not check the limit law")
        add_output_argument(subparser)
        subparser.set_defaults(func=mc_from_args)
        return subparser


def mc_from_args(args: argparse.Namespace) -> int:
    config = load_experiment(args)
    workers = resolve_workers(args.workers)
    report = run(config, workers=workers, progress=args.progress)

    regime = classify_regime(config.spec, config.schedule) if config.schedule.exponent is not None else None
    payload = report.to_dict()
    if regime is not None:
        payload["verdict"] = compare(report, regime, check_shape=not args.skip_shape,
                                     check_dominance=args.check_dominance)
        logger.info("verdict: %s", payload["verdict"]["verdict"])

    with output_stream(args.output) as stream:
        if args.format == "csv":
            report.write_csv(stream)
        else:
            dump_json(payload, stream)
    if regime is not None and regime.is_boundary:
        return EXIT_BOUNDARY
    return EXIT_OK
