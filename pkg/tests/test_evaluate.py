import json

import pytest
from allennlp.common.checks import ConfigurationError
from allennlp.common.testing import AllenNlpTestCase

from src.evaluate import evaluate_json, evaluate_report_file
from src.hermqv.mcharness import MCReport, NSummary, dominance_record
from src.hermqv.specs import INDEPENDENT, FixedSchedule, PairSpec


def _report(slope: float) -> dict:
    per_N = [NSummary(N=N, gamma=1.0, count=200, mean=0.0, sd=N ** slope, skew=0.0, exkurt=0.0,
                      rms={"V": N ** slope, "V1": N ** slope, "V2": 0.01, "V3": 0.01})
             for N in (256, 512, 1024)]
    config = {"spec": PairSpec(1, 0.6, 0.7, INDEPENDENT).to_dict(),
              "schedule": FixedSchedule().to_dict(),
              "N_grid": [256, 512, 1024], "R": 200, "seed": 0, "statistic": "V1", "chunk_size": 64}
    return MCReport(config=config, statistic="V1", per_N=per_N, slope=slope, slope_se=0.01,
                    intercept=0.0, predicted_slope=0.5, regime=None, shape=None,
                    dominance=dominance_record(per_N)).to_dict()


class TestEvaluate(AllenNlpTestCase):
    def test_report_file(self):
        report_path = self.TEST_DIR / "report.json"
        output_path = self.TEST_DIR / "verdict.json"
        with open(report_path, "w") as report_file:
            json.dump(_report(0.49), report_file)

        verdict = evaluate_report_file(str(report_path), str(output_path), check_dominance=True)
        assert verdict["verdict"] == "PASS"
        assert verdict["dominance"]["empirical"] == "V1"
        assert verdict["regime"]["dominant"] == "V1"
        with open(output_path) as verdict_file:
            assert json.load(verdict_file) == verdict

    def test_without_output(self):
        report_path = self.TEST_DIR / "report.json"
        with open(report_path, "w") as report_file:
            json.dump(_report(0.8), report_file)
        assert evaluate_report_file(str(report_path))["verdict"] == "FAIL"

    def test_rejects_other_json(self):
        report = _report(0.5)
        del report["dominance"]
        report_path = self.TEST_DIR / "report.json"
        with open(report_path, "w") as report_file:
            json.dump(report, report_file)
        with pytest.raises(ConfigurationError, match="not a Monte Carlo report"):
            evaluate_report_file(str(report_path))

    def test_other_indices(self):
        report = _report(0.5)
        assert evaluate_json(report)["verdict"] == "PASS"
        verdict = evaluate_json(report, H1=0.95)
        assert verdict["regime"]["H1"] == 0.95
        assert verdict["verdict"] == "FAIL"
        # H2 does not enter the V1 slope
        assert evaluate_json(report, H2=0.9)["verdict"] == "PASS"
