"""
The ``oracle`` subcommand runs the analytic self-checks: the beta-tilde
identity against quadrature, the product formula on tensor-power kernels, the
exact variance of the leading chaos term of ``V3`` (with the third-chaos part
for ``q = 1``) and the chaos rate table.
With no selection flag all four are run.
"""
import argparse
import logging

from allennlp.commands.subcommand import Subcommand
from overrides import overrides

from src.hermqv.chaosor import (beta_tilde_checks, chaos_rate_bounds, product_formula_sweep,
                                sigma3_constant, sigma3_table)
from src.hermqv.commands.common import EXIT_OK, add_output_argument, dump_json, output_stream

logger = logging.getLogger(__name__)


@Subcommand.register("oracle")
class Oracle(Subcommand):
    @overrides
    def add_subparser(self, parser: argparse._SubParsersAction) -> argparse.ArgumentParser:
        description = """Analytic and chaos-algebra self-checks."""
        subparser = parser.add_parser(self.name, description=description, help=description)
        subparser.add_argument("--beta-checks", action="store_true")
        subparser.add_argument("--product-formula", action="store_true")
        subparser.add_argument("--sigma3", action="store_true")
        subparser.add_argument("--rate-bounds", action="store_true")
        subparser.add_argument("--q", type=int, default=1)
        subparser.add_argument("--h1", type=float, default=0.85)
        subparser.add_argument("--h2", type=float, default=0.7)
        subparser.add_argument("--N", type=int, nargs="+", default=[64, 128, 256, 512])
        subparser.add_argument("--gamma", type=float, default=1.0)
        subparser.add_argument("--draws", type=int, default=20, help="random points for the beta-tilde checks")
        subparser.add_argument("--trials", type=int, default=1000, help="Gaussian draws for the product formula")
        subparser.add_argument("--seed", type=int, default=0)
        add_output_argument(subparser)
        subparser.set_defaults(func=oracle_from_args)
        return subparser


def oracle_from_args(args: argparse.Namespace) -> int:
    selected = [args.beta_checks, args.product_formula, args.sigma3, args.rate_bounds]
    run_all = not any(selected)
    payload = {}
    if run_all or args.beta_checks:
        rows = beta_tilde_checks(args.draws, args.seed)
        payload["beta_tilde_checks"] = rows
        payload["beta_tilde_max_dev"] = max(row["relative_deviation"] for row in rows)
    if run_all or args.product_formula:
        rows = product_formula_sweep(trials=args.trials, seed=args.seed)
        payload["product_formula"] = rows
        payload["product_formula_max_dev"] = max(row["max_deviation"] for row in rows)
    if run_all or args.sigma3:
        payload["sigma3_table"] = sigma3_table(args.q, args.h1, args.h2, args.N, args.gamma)
        payload["sigma3_constant"] = sigma3_constant(args.q, args.h1, args.h2)
    if run_all or args.rate_bounds:
        payload["rate_bounds_table"] = chaos_rate_bounds(args.q, args.h1, args.h2)
    with output_stream(args.output) as stream:
        dump_json(payload, stream)
    return EXIT_OK
