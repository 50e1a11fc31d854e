"""
The ``classify`` subcommand prints the regime report of a model under a
power-law schedule ``gamma_N = c N^rho``.

.. code-block:: bash

    $ python run.py classify --q 1 --h1 0.7 --h2 0.7 --rho 0 --dependence dependent
"""
import argparse
import logging

from allennlp.commands.subcommand import Subcommand
from overrides import overrides

from src.hermqv.analytic.regime import classify_regime
from src.hermqv.commands.common import (EXIT_BOUNDARY, EXIT_OK, add_output_argument, dump_json,
                                        output_stream)
from src.hermqv.specs import DEPENDENCE_MODES, DEPENDENT, PairSpec, PowerSchedule

logger = logging.getLogger(__name__)


@Subcommand.register("classify")
class Classify(Subcommand):
    @overrides
    def add_subparser(self, parser: argparse._SubParsersAction) -> argparse.ArgumentParser:
        description = """Decide which term of V_N dominates and its limit law."""
        subparser = parser.add_parser(self.name, description=description, help=description)
        subparser.add_argument("--q", type=int, required=True, help="order of the first component")
        subparser.add_argument("--h1", type=float, required=True, help="index of the order-q component")
        subparser.add_argument("--h2", type=float, required=True, help="index of the order-(q+1) component")
        subparser.add_argument("--rho", type=float, default=0.0, help="schedule exponent, gamma_N = c N^rho")
        subparser.add_argument("--c", type=float, default=1.0, help="schedule constant")
        subparser.add_argument("--dependence", choices=DEPENDENCE_MODES, default=DEPENDENT)
        add_output_argument(subparser)
        subparser.set_defaults(func=classify_from_args)
        return subparser


def classify_from_args(args: argparse.Namespace) -> int:
    spec = PairSpec(args.q, args.h1, args.h2, args.dependence)
    report = classify_regime(spec, PowerSchedule(rho=args.rho, c=args.c))
    with output_stream(args.output) as stream:
        dump_json(report.to_dict(), stream)
    if report.is_boundary:
        logger.warning("exponents tie: dominant term is indeterminate")
        return EXIT_BOUNDARY
    return EXIT_OK
