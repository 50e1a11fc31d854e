"""
The ``boundary`` subcommand writes plot-ready points of the boundary segment
between regimes in the ``(H1, H2)`` square as CSV ``H1,H2,q,mode``.
"""
import argparse
import csv
import logging

from allennlp.commands.subcommand import Subcommand
from overrides import overrides

from src.hermqv.analytic.regime import boundary_table
from src.hermqv.commands.common import EXIT_OK, add_output_argument, output_stream
from src.hermqv.specs import DEPENDENCE_MODES, DEPENDENT

logger = logging.getLogger(__name__)


def _points(value: str) -> int:
    points = int(value)
    if points < 2:
        raise argparse.ArgumentTypeError(f"points must be >= 2, got {points}")
    return points


@Subcommand.register("boundary")
class Boundary(Subcommand):
    @overrides
    def add_subparser(self, parser: argparse._SubParsersAction) -> argparse.ArgumentParser:
        description = """Sample the regime boundary curve."""
        subparser = parser.add_parser(self.name, description=description, help=description)
        subparser.add_argument("--q", type=int, required=True)
        subparser.add_argument("--mode", choices=DEPENDENCE_MODES, default=DEPENDENT)
        subparser.add_argument("--points", type=_points, default=50)
        add_output_argument(subparser)
        subparser.set_defaults(func=boundary_from_args)
        return subparser


def boundary_from_args(args: argparse.Namespace) -> int:
    rows = boundary_table(args.q, args.mode, args.points)
    with output_stream(args.output) as stream:
        writer = csv.DictWriter(stream, fieldnames=["H1", "H2", "q", "mode"])
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK
