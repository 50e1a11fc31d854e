#!/usr/bin/python

from typing import Any, Dict, Optional
import json
import argparse

import jsonschema
from allennlp.common import Params
from allennlp.common.checks import ConfigurationError

from src.hermqv.analytic.regime import classify_regime
from src.hermqv.mcharness import MCReport, compare
from src.hermqv.specs import MC_REPORT_SCHEMA, PairSpec, ScaleSchedule, validate_report


def _regime_from_config(config: Dict[str, Any], H1: Optional[float] = None, H2: Optional[float] = None):
    spec = PairSpec.from_params(Params(dict(config["spec"])))
    if H1 is not None or H2 is not None:
        spec = spec.with_indices(spec.H1 if H1 is None else H1, spec.H2 if H2 is None else H2)
    schedule = ScaleSchedule.from_params(Params(dict(config["schedule"])))
    return classify_regime(spec, schedule)


def evaluate_json(report: Dict[str, Any],
                  check_shape: bool = True,
                  check_dominance: bool = False,
                  H1: Optional[float] = None,
                  H2: Optional[float] = None) -> Dict[str, Any]:
    """
    Scores one saved Monte Carlo report against the regime classifier.

    The regime is recomputed from the report's own config; ``H1``/``H2`` replace
    the indices fed to the classifier, which turns the comparison into a
    negative control.
    """
    mc_report = MCReport.from_dict(report)
    regime = _regime_from_config(report["config"], H1, H2)
    verdict = compare(mc_report, regime, check_shape=check_shape, check_dominance=check_dominance)
    verdict["regime"] = regime.to_dict()
    return verdict


def evaluate_report_file(
    report_path: str,
    output_path: Optional[str] = None,
    check_shape: bool = True,
    check_dominance: bool = False,
) -> Dict[str, Any]:
    """
    Takes a report file written by the ``mc`` command and recomputes its verdict.
    Writes the verdict as json to ``output_path`` when one is given.
    """
    with open(report_path, encoding="utf-8") as report_file:
        report = json.load(report_file)
    try:
        validate_report(report, MC_REPORT_SCHEMA)
    except jsonschema.ValidationError as error:
        raise ConfigurationError(f"{report_path} is not a Monte Carlo report: {error.message}")
    verdict = evaluate_json(report, check_shape=check_shape, check_dominance=check_dominance)

    if output_path is not None:
        with open(output_path, "w", encoding="utf8") as outfile:
            json.dump(verdict, outfile, indent=2, sort_keys=True)

    return verdict


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="evaluate")
    parser.add_argument(
        "--report_path",
        type=str,
        required=True,
        help="location of the Monte Carlo report file",
    )
    parser.add_argument(
        "--output_path",
        type=str,
        required=False,
        default=None,
        help="location of the output verdict file",
    )
    parser.add_argument(
        "--check_dominance",
        action="store_true",
        help="also require the empirical dominant term to match the prediction",
    )

    args = parser.parse_args()
    result = evaluate_report_file(args.report_path, args.output_path, check_dominance=args.check_dominance)
    print(result["verdict"])
