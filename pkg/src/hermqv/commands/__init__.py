"""
Command-line front end. Each subcommand is an allennlp
:class:`~allennlp.commands.subcommand.Subcommand` registered under its name;
:func:`main` builds the parser, runs the selected one and maps failures to
exit codes:

* ``2`` configuration or domain errors and unreadable inputs,
* ``3`` a boundary regime (the report is still written),
* ``4`` generator diagnostics and degenerate samples,
* ``5`` quadrature that does not converge.
"""
import argparse
import logging
import sys
from typing import List, Optional

from allennlp.commands.subcommand import Subcommand
from allennlp.common.checks import ConfigurationError

from src.hermqv.checks import (DecompositionError, DegenerateSampleError, GeneratorDiagnosticError,
                               QuadratureConvergenceError)
from src.hermqv.commands.common import (EXIT_CONFIGURATION, EXIT_GENERATOR, EXIT_QUADRATURE)

# registration side effects
from src.hermqv.commands import boundary, classify, mc, oracle, qv, simulate  # noqa: F401

logger = logging.getLogger(__name__)

SUBCOMMANDS = ["classify", "boundary", "simulate", "qv", "mc", "oracle"]
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"


def create_parser(prog: Optional[str] = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=prog, description="Quadratic variation of mixed Hermite processes")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="verbosity on stderr")
    parser.add_argument("--progress", action="store_true", help="show progress bars on stderr")
    subparsers = parser.add_subparsers(title="Commands", metavar="")
    for name in SUBCOMMANDS:
        Subcommand.by_name(name)().add_subparser(subparsers)
    return parser


def main(args: Optional[List[str]] = None, prog: Optional[str] = None) -> int:
    parser = create_parser(prog)
    parsed = parser.parse_args(args)
    if "func" not in parsed:
        parser.print_help()
        return EXIT_CONFIGURATION

    logging.basicConfig(format=LOG_FORMAT, level=getattr(logging, parsed.log_level), stream=sys.stderr)
    try:
        return parsed.func(parsed)
    except (ConfigurationError, ValueError, OSError) as error:
        logger.error("%s", error)
        return EXIT_CONFIGURATION
    except (GeneratorDiagnosticError, DegenerateSampleError, DecompositionError) as error:
        logger.error("%s", error)
        return EXIT_GENERATOR
    except QuadratureConvergenceError as error:
        logger.error("%s", error)
        return EXIT_QUADRATURE
