import math

import numpy as np
import pytest
from numpy.polynomial.hermite_e import hermegauss
from numpy.testing import assert_allclose

from src.hermqv.chaosor import (TensorPowerKernel, beta_tilde_checks, chaos_rate_bounds, chaos_terms,
                                contraction_kernel, cross_variance_dependent, hermite_poly, isometry_check,
                                leading_kernel, m_coefficient, product_formula_check, product_formula_sweep,
                                sigma3_asymptotic, sigma3_constant, sigma3_exact, sigma3_table,
                                swapped_delta, third_chaos_variance, two_function_basis)
from src.hermqv.hermpath import simulate_pair_kernel
from src.hermqv.quadvar import qv_cross
from src.hermqv.checks import DomainError, IllConditionedBasisError


class TestHermitePoly:
    def test_low_degrees(self):
        x = np.linspace(-3, 3, 13)
        assert_allclose(hermite_poly(0, x), np.ones_like(x))
        assert_allclose(hermite_poly(1, x), x)
        assert_allclose(hermite_poly(2, x), x ** 2 - 1)
        assert_allclose(hermite_poly(3, x), x ** 3 - 3 * x)
        assert_allclose(hermite_poly(4, x), x ** 4 - 6 * x ** 2 + 3)

    def test_scalar_input_gives_float(self):
        assert isinstance(hermite_poly(3, 2.0), float)
        assert hermite_poly(3, 2.0) == 2.0

    def test_orthogonality(self):
        nodes, weights = hermegauss(40)
        weights = weights / math.sqrt(2 * math.pi)
        for n in range(7):
            for m in range(7):
                inner = np.sum(weights * hermite_poly(n, nodes) * hermite_poly(m, nodes))
                expected = math.factorial(n) if n == m else 0.0
                assert abs(inner - expected) < 1e-8 * max(1.0, expected)

    @pytest.mark.parametrize("degree", [-1, 65])
    def test_degree_out_of_range(self, degree):
        with pytest.raises(DomainError):
            hermite_poly(degree, 0.5)


class TestTensorPowers:
    def test_basis_is_orthonormal(self):
        g, h, w = two_function_basis(0.4)
        kernel = TensorPowerKernel(g, h, w)
        assert_allclose(kernel.norm_g, 1.0)
        assert_allclose(kernel.norm_h, 1.0)
        assert_allclose(kernel.rho, 0.4)

    def test_collinear_functions_are_rejected(self):
        g, _, w = two_function_basis(0.0)
        with pytest.raises(IllConditionedBasisError):
            TensorPowerKernel(g, 2.0 * g, w)

    def test_first_order_integral_is_linear(self):
        g, h, w = two_function_basis(0.6)
        kernel = TensorPowerKernel(g, h, w, a=0, b=1)
        xi1 = np.array([0.3, -1.2])
        xi2 = np.array([1.1, 0.4])
        assert_allclose(kernel.multiple_integral(xi1, xi2), 0.6 * xi1 + 0.8 * xi2)

    def test_contraction(self):
        g, h, w = two_function_basis(-0.5)
        contraction = contraction_kernel(4, 3, 2, g, h, w)
        assert_allclose(contraction.coefficient, 0.25)
        assert (contraction.power_g, contraction.power_h) == (2, 1)
        with pytest.raises(DomainError):
            contraction_kernel(2, 3, 3, g, h, w)


class TestProductFormula:
    @pytest.mark.parametrize("rho", [0.0, 0.3, -0.3, 0.9, -0.9])
    def test_all_orders(self, rho):
        g, h, w = two_function_basis(rho)
        for m in range(1, 6):
            for n in range(1, 7 - m):
                assert product_formula_check(m, n, g, h, trials=1000, seed=3, weights=w) < 1e-9

    def test_unnormalized_functions(self):
        g, h, w = two_function_basis(0.3)
        assert product_formula_check(3, 2, 1.7 * g, 0.6 * h, trials=500, seed=4, weights=w) < 1e-9

    def test_sweep_rows(self):
        rows = product_formula_sweep(max_total=4, rhos=(0.5,), trials=200)
        assert [(row["m"], row["n"]) for row in rows] == [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)]
        assert max(row["max_deviation"] for row in rows) < 1e-9

    def test_order_limit(self):
        g, h, w = two_function_basis(0.3)
        with pytest.raises(DomainError):
            product_formula_check(7, 1, g, h, weights=w)


class TestIsometry:
    def test_same_order(self):
        g, h, w = two_function_basis(0.7)
        result = isometry_check(2, 2, g, h, trials=200000, seed=5, weights=w)
        assert_allclose(result["exact"], 2 * 0.49)
        assert abs(result["estimate"] - result["exact"]) < 5 * result["standard_error"]

    def test_different_orders_are_orthogonal(self):
        g, h, w = two_function_basis(0.7)
        result = isometry_check(1, 2, g, h, trials=200000, seed=6, weights=w)
        assert result["exact"] == 0.0
        assert abs(result["estimate"]) < 5 * result["standard_error"]


def test_beta_tilde_checks():
    rows = beta_tilde_checks(draws=5, seed=2)
    assert len(rows) == 5
    for row in rows:
        assert row["a"] + row["b"] < -1.0
        assert row["relative_deviation"] < 1e-6


class TestChaosTerms:
    def test_coefficient_ratios(self):
        q, H1, H2 = 3, 0.85, 0.8
        for k in range(1, q + 1):
            ratio = m_coefficient(k, q, H1, H2) / m_coefficient(k - 1, q, H1, H2)
            assert_allclose(ratio, (q - k + 1) * (q + 2 - k) / k)

    def test_multiplicities(self):
        terms = chaos_terms(2, 0.85, 0.8)
        assert [term.multiplicity for term in terms] == [5, 3, 1]
        assert [term.k for term in terms] == [0, 1, 2]

    def test_k_out_of_range(self):
        with pytest.raises(DomainError):
            m_coefficient(3, 2, 0.85, 0.8)

    def test_leading_kernel_is_diagonal_power(self):
        F = leading_kernel(1, 0.85, 0.7)
        assert 0.0 < F.kappa < 1.0
        assert F.lower > 0 and F.upper > 0


class TestSigma3:
    q, H1, H2 = 1, 0.85, 0.7

    def test_gamma_scaling(self):
        base = sigma3_exact(self.q, self.H1, self.H2, 32)
        scaled = sigma3_exact(self.q, self.H1, self.H2, 32, gamma=2.0)
        assert_allclose(scaled / base, 2.0 ** (2 * self.H1 + 2 * self.H2))

    def test_growth_rate(self):
        N_grid = [64, 128, 256, 512]
        sd = [math.sqrt(sigma3_exact(self.q, self.H1, self.H2, N)) for N in N_grid]
        slope = np.polyfit(np.log(N_grid), np.log(sd), 1)[0]
        assert abs(slope - (1.0 - (1.0 - self.H2) / (self.q + 1))) < 0.02

    def test_constant_matches_large_N(self):
        alpha2 = 2.0 * (1.0 - self.H2) / (self.q + 1)
        scaled = sigma3_exact(self.q, self.H1, self.H2, 512) / 512 ** (2.0 - alpha2)
        assert_allclose(scaled, sigma3_constant(self.q, self.H1, self.H2), rtol=0.1)
        assert_allclose(sigma3_asymptotic(self.q, self.H1, self.H2, 512),
                        sigma3_constant(self.q, self.H1, self.H2) * 512 ** (2.0 - alpha2))

    def test_exact_limit(self):
        with pytest.raises(DomainError):
            sigma3_exact(self.q, self.H1, self.H2, 1024)

    def test_table_switches_to_asymptotic(self):
        rows = sigma3_table(self.q, self.H1, self.H2, [256, 1024])
        assert [row["exact"] for row in rows] == [True, False]
        assert rows[1]["variance"] > rows[0]["variance"]
        assert rows[1]["third_chaos"] is None
        assert_allclose(rows[0]["total"], rows[0]["variance"] + rows[0]["third_chaos"])


class TestThirdChaos:
    H1, H2 = 0.85, 0.7

    def test_single_cell(self):
        # Var(Z1(1) Z2(1)) = 1 + 2 sigma3 at N = 1
        assert_allclose(third_chaos_variance(self.H1, self.H2, 1), 1.0 + sigma3_exact(1, self.H1, self.H2, 1),
                        rtol=1e-12)
        assert_allclose(cross_variance_dependent(self.H1, self.H2, 1),
                        1.0 + 2.0 * sigma3_exact(1, self.H1, self.H2, 1), rtol=1e-12)

    def test_gamma_scaling(self):
        base = third_chaos_variance(self.H1, self.H2, 16)
        assert_allclose(third_chaos_variance(self.H1, self.H2, 16, gamma=0.5) / base,
                        0.5 ** (2 * self.H1 + 2 * self.H2))

    def test_share_of_the_leading_term_shrinks(self):
        ratios = [third_chaos_variance(self.H1, self.H2, N) / sigma3_exact(1, self.H1, self.H2, N)
                  for N in (16, 64, 256)]
        assert ratios[0] > ratios[1] > ratios[2] > 0

    def test_large_lag_decay(self):
        F = leading_kernel(1, self.H1, self.H2)
        ell = 40
        expected = F.lower * F.upper * ell ** (-2.0 * F.kappa - (1.0 - self.H2))
        assert_allclose(swapped_delta(ell, self.H1, self.H2), expected, rtol=0.01)
        assert swapped_delta(-3, self.H1, self.H2) == swapped_delta(3, self.H1, self.H2)

    def test_exact_limit(self):
        with pytest.raises(DomainError):
            third_chaos_variance(self.H1, self.H2, 1024)

    @pytest.mark.slow
    def test_kernel_grid_pairs(self):
        N = 64
        cross = np.array([qv_cross(simulate_pair_kernel(self.H1, self.H2, N, seed=17, stream=(N, r)))
                          for r in range(6000)])
        leading = sigma3_exact(1, self.H1, self.H2, N)
        assert_allclose(cross.var(), cross_variance_dependent(self.H1, self.H2, N), rtol=0.1)
        assert_allclose(cross.var() - third_chaos_variance(self.H1, self.H2, N), leading, rtol=0.1)


def test_chaos_rate_bounds():
    rows = chaos_rate_bounds(1, 0.85, 0.7)
    assert [row["k"] for row in rows] == [0, 1]
    assert_allclose([row["exponent"] for row in rows], [1.1, 1.7])
    assert [row["log_flag"] for row in rows] == [0, 0]
    assert_allclose(rows[0]["gamma_exponent"], 3.1)
