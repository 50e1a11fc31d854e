import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.hermqv.analytic.covariance import cross_variance_independent
from src.hermqv.analytic.regime import (BOUNDARY, GAUSSIAN, INDETERMINATE, ROSENBLATT, V1, V2, V3,
                                        alpha_k, boundary_curve, boundary_endpoint, boundary_table,
                                        classify_regime, exponents, limit_law_v1, limit_law_v2)
from src.hermqv.checks import DomainError, UnsupportedScheduleError
from src.hermqv.specs import (DEPENDENT, INDEPENDENT, FixedSchedule, PairSpec, PowerSchedule,
                              TabulatedSchedule)


def _classify(q, H1, H2, rho=0.0, dependence=DEPENDENT, c=1.0):
    return classify_regime(PairSpec(q, H1, H2, dependence), PowerSchedule(rho=rho, c=c))


class TestExponents:
    def test_equal_indices(self):
        ex = exponents(1, 0.7, 0.7)
        assert ex.h1 == 0.5
        assert ex.delta == 0
        assert_allclose([ex.nu1, ex.nu2], [-0.35, 0.15])

    def test_log_case(self):
        assert exponents(1, 0.75, 0.7).delta == 1
        assert exponents(2, 0.75, 0.7).delta == 0

    def test_second_order(self):
        ex = exponents(2, 0.9, 0.6)
        assert_allclose(ex.h1, 0.9)
        assert_allclose(ex.nu1, 0.4 / 3 - 0.1)
        assert_allclose(ex.nu2, 0.4 / 3)
        assert_allclose(ex.H1_star, 0.05 + 0.4 / 3)

    def test_nu1_below_nu2_on_a_grid(self):
        for q in (1, 2, 3, 16):
            for H1 in np.linspace(0.51, 0.99, 25):
                for H2 in np.linspace(0.51, 0.99, 25):
                    ex = exponents(q, H1, H2)
                    assert ex.nu1 < ex.nu2

    def test_domain(self):
        with pytest.raises(DomainError):
            exponents(1, 1.2, 0.7)
        with pytest.raises(DomainError):
            exponents(0, 0.7, 0.7)


class TestAlpha:
    def test_values(self):
        assert_allclose(alpha_k(1, 0, 0.7, 0.7), 1.2)
        for q in (1, 2, 5):
            assert_allclose(alpha_k(q, q, 0.8, 0.6), 2 * 0.4 / (q + 1))

    def test_strictly_decreasing_in_k(self):
        values = [alpha_k(4, k, 0.7, 0.9) for k in range(5)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            alpha_k(2, 3, 0.7, 0.7)
        with pytest.raises(DomainError):
            alpha_k(2, -1, 0.7, 0.7)


class TestLimitLaws:
    def test_first_component(self):
        assert limit_law_v1(1, 0.7).family == GAUSSIAN
        assert limit_law_v1(1, 0.75).family == GAUSSIAN
        law = limit_law_v1(1, 0.8)
        assert law.family == ROSENBLATT
        assert_allclose(law.index, 0.6)
        assert limit_law_v1(2, 0.6).family == ROSENBLATT

    def test_second_component(self):
        law = limit_law_v2(1, 0.7)
        assert law.family == ROSENBLATT
        assert_allclose(law.index, 0.7)


class TestClassifyRegime:
    @pytest.mark.parametrize("rho, dominant", [(2.0, V1), (0.0, V3), (-2.0, V2)])
    def test_constraint_line_sweep(self, rho, dominant):
        assert _classify(1, 0.85, 0.7, rho).dominant == dominant

    def test_equal_indices_dependent_is_gaussian_cross_term(self):
        for q in (1, 2, 3):
            for H in np.linspace(0.51, 0.99, 50):
                report = _classify(q, H, H, rho=1.5)
                assert report.dominant == V3
                assert report.limit_law.family == GAUSSIAN

    def test_equal_indices_independent_is_second_component(self):
        report = _classify(1, 0.7, 0.7, dependence=INDEPENDENT)
        assert report.dominant == V2
        assert report.limit_law.family == ROSENBLATT
        assert_allclose(report.limit_law.index, 0.7)

    def test_only_the_exponent_matters(self):
        a = _classify(1, 0.85, 0.7, rho=0.5, c=1.0)
        b = _classify(1, 0.85, 0.7, rho=0.5, c=37.0)
        assert a == b
        assert classify_regime(PairSpec(1, 0.85, 0.7), FixedSchedule(c=3.0)) == _classify(1, 0.85, 0.7, 0.0)

    def test_ties(self):
        # H2 on the dependent boundary: nu1 = 0
        report = _classify(1, 0.9, 0.6, rho=0.0)
        assert report.dominant == BOUNDARY
        assert report.is_boundary
        assert report.limit_law.family == INDETERMINATE
        assert_allclose(report.rate.folded(0.0), report.term_rates[V3].folded(0.0))
        # the log factor breaks the tie at H1 = 3/4
        ex = exponents(1, 0.75, 0.6)
        rho = ex.nu1 / (0.6 - 0.75)
        assert _classify(1, 0.75, 0.6, rho=rho).dominant == V1

    def test_upper_tie(self):
        ex = exponents(1, 0.85, 0.7)
        rho = ex.nu2 / (0.7 - 0.85)
        report = _classify(1, 0.85, 0.7, rho=rho)
        assert report.dominant == BOUNDARY
        assert_allclose(report.predicted_slope(), report.term_rates[V2].folded(rho))

    def test_rates(self):
        report = _classify(1, 0.85, 0.7, rho=0.0)
        assert_allclose(report.predicted_slope("V3"), 0.85)
        assert_allclose(report.predicted_slope("V2"), 0.7)
        assert_allclose(report.predicted_slope("V1"), 0.7)
        assert_allclose(report.predicted_slope(), 0.85)
        folded = _classify(1, 0.85, 0.7, rho=2.0)
        assert_allclose(folded.predicted_slope("V1"), 0.7 + 2.0 * 1.7)

    @pytest.mark.parametrize("H1, H2", [(0.6, 0.7), (0.9, 0.85)])
    def test_independent_cross_rate_matches_the_double_sum(self, H1, H2):
        N = np.array([1024, 2048, 4096, 8192])
        sd = [math.sqrt(cross_variance_independent(H1, H2, 1.0, int(n))) for n in N]
        slope = np.polyfit(np.log(N), np.log(sd), 1)[0]
        rate = _classify(1, H1, H2, dependence=INDEPENDENT).term_rates[V3]
        assert abs(slope - rate.exponent_N) < 0.02
        assert rate.log_half_power == 0
        assert _classify(1, 0.8, 0.7, dependence=INDEPENDENT).term_rates[V3].log_half_power == 1

    def test_report_serializes(self):
        payload = _classify(2, 0.9, 0.6, rho=1.0).to_dict()
        for key in ("q", "H1", "H2", "dependence", "rho", "dominant", "limit_law", "rate",
                    "term_rates", "h1", "delta", "nu1", "nu2", "H1_star"):
            assert key in payload

    def test_unsupported_schedule(self):
        schedule = TabulatedSchedule({"1": 1.0, "2": 0.5})
        with pytest.raises(UnsupportedScheduleError):
            classify_regime(PairSpec(1, 0.8, 0.7), schedule)

    def test_unknown_statistic(self):
        with pytest.raises(DomainError):
            _classify(1, 0.8, 0.7).predicted_slope("V4")


class TestBoundary:
    def test_endpoints(self):
        assert_allclose(boundary_endpoint(1, DEPENDENT), 0.875)
        assert_allclose(boundary_endpoint(1, INDEPENDENT), 0.75)
        assert_allclose(boundary_endpoint(16, DEPENDENT), 1 - 16 / 68)
        assert_allclose(boundary_endpoint(10 ** 6, DEPENDENT), 0.75, atol=1e-6)
        assert_allclose(boundary_endpoint(10 ** 6, INDEPENDENT), 0.5, atol=1e-6)

    def test_curve_zeroes_the_exponents(self):
        for q in (1, 2, 16):
            for H1 in np.linspace(0.88, 0.99, 10):
                H2 = boundary_curve(q, DEPENDENT, H1)
                assert H2 is not None
                assert abs(exponents(q, H1, H2).nu1) < 1e-12
                H2 = boundary_curve(q, INDEPENDENT, H1)
                ex = exponents(q, H1, H2)
                assert abs(ex.nu1 + ex.nu2) < 1e-12

    def test_outside_the_square(self):
        assert boundary_curve(1, DEPENDENT, 0.6) is None
        assert boundary_curve(1, INDEPENDENT, 0.7) is None

    @pytest.mark.parametrize("q", [1, 2, 16])
    @pytest.mark.parametrize("mode", [DEPENDENT, INDEPENDENT])
    def test_sign_agrees_with_side_of_curve(self, q, mode):
        grid = np.linspace(0.505, 0.995, 50)
        for H1 in grid:
            curve = boundary_curve(q, mode, H1)
            for H2 in grid:
                ex = exponents(q, H1, H2)
                value = ex.nu1 if mode == DEPENDENT else ex.nu1 + ex.nu2
                if curve is None:
                    assert value < 0
                elif abs(H2 - curve) > 1e-9:
                    assert (value > 0) == (H2 < curve)

    def test_table(self):
        rows = boundary_table(1, DEPENDENT, 5)
        assert len(rows) == 5
        assert rows[0]["H1"] == 0.875 and rows[0]["H2"] == 0.5
        assert rows[-1]["H1"] == 1.0 and rows[-1]["H2"] == 1.0
        assert all(row["q"] == 1 and row["mode"] == DEPENDENT for row in rows)
        assert all(math.isclose(b["H1"] - a["H1"], 0.125 / 4) for a, b in zip(rows, rows[1:]))
        with pytest.raises(DomainError):
            boundary_table(1, DEPENDENT, 1)
        with pytest.raises(DomainError):
            boundary_table(1, "sideways", 3)
