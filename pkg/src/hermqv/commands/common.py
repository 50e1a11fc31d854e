"""
Helpers shared by the subcommands: output routing and experiment loading.

Data goes to stdout or ``--output``; diagnostics go to the logger on stderr.
"""
import argparse
import json
import logging
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional, TextIO

from src.hermqv.mcharness import STATISTICS, ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIGURATION = 2
EXIT_BOUNDARY = 3
EXIT_GENERATOR = 4
EXIT_QUADRATURE = 5


@contextmanager
def output_stream(path: Optional[str]) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf8", newline="") as stream:
            yield stream
        logger.info("wrote %s", path)


def dump_json(payload: Dict[str, Any], stream: TextIO) -> None:
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write("\n")


def add_output_argument(subparser: argparse.ArgumentParser) -> None:
    subparser.add_argument("--output", type=str, default=None,
                           help="file to write to (default: standard output)")


def add_experiment_arguments(subparser: argparse.ArgumentParser) -> None:
    subparser.add_argument("--config", type=str, required=True, help="experiment config (json)")
    subparser.add_argument("--seed", type=int, default=None, help="master seed, overrides the config")
    subparser.add_argument("--replications", type=int, default=None,
                           help="replications per N, overrides the config")
    subparser.add_argument("--statistic", choices=STATISTICS, default=None,
                           help="statistic to summarize, overrides the config")


def load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config)
    return config.with_overrides(R=args.replications, seed=args.seed,
                                 statistic=getattr(args, "statistic", None))
