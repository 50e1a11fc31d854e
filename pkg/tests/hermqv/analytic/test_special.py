import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from src.hermqv.analytic.special import (KernelParams, beta, beta_tilde, beta_tilde_integral,
                                         beta_tilde_sup, kernel_exponent, kernel_norm_quadrature,
                                         kernel_norm_squared, norm_constant)
from src.hermqv.checks import DomainError


class TestBeta:
    def test_closed_values(self):
        assert_allclose(beta(1.0, 1.0), 1.0, rtol=1e-14)
        assert_allclose(beta(2.0, 3.0), 1.0 / 12.0, rtol=1e-14)

    def test_singular_arguments_match_quadrature(self):
        expected, _ = integrate.quad(lambda t: 1.0, 0.0, 1.0, weight="alg", wvar=(-0.6, -0.8))
        assert_allclose(beta(0.4, 0.2), expected, rtol=1e-8)

    @pytest.mark.parametrize("x, y", [(0.0, 1.0), (1.0, -0.5), (-1.0, -1.0)])
    def test_domain(self, x, y):
        with pytest.raises(DomainError):
            beta(x, y)

    def test_tiny_arguments_do_not_overflow(self):
        assert math.isfinite(beta(1e-3, 1e-3))


class TestBetaTilde:
    def test_symmetric_exponents(self):
        assert_allclose(beta_tilde(-0.6, -0.6, 0.0, 1.0), beta(0.4, 0.2))
        assert beta_tilde(-0.6, -0.6, 0.0, 1.0) == beta_tilde(-0.6, -0.6, 1.0, 0.0)

    def test_order_of_arguments_selects_the_exponent(self):
        assert_allclose(beta_tilde(-0.6, -0.7, 0.0, 1.0), beta(0.4, 0.3))
        assert_allclose(beta_tilde(-0.6, -0.7, 1.0, 0.0), beta(0.3, 0.3))
        assert beta_tilde_sup(-0.6, -0.7) == max(beta(0.4, 0.3), beta(0.3, 0.3))

    def test_identity_against_quadrature(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            a, b = rng.uniform(-0.9, -0.6, size=2)
            u, v = rng.uniform(-3.0, 3.0, size=2)
            closed = beta_tilde(a, b, u, v) * abs(u - v) ** (a + b + 1.0)
            assert_allclose(beta_tilde_integral(a, b, u, v), closed, rtol=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            beta_tilde(-0.2, -0.3, 0.0, 1.0)
        with pytest.raises(DomainError):
            beta_tilde(-0.6, -0.6, 1.0, 1.0)
        with pytest.raises(DomainError):
            beta_tilde_integral(-0.6, -0.6, 2.0, 2.0)


class TestKernelNorm:
    def test_kernel_exponent_range(self):
        for q in (1, 2, 5):
            for H in (0.51, 0.7, 0.99):
                params = KernelParams.from_order(q, H)
                assert -1.0 < params.a < -0.5
                assert_allclose(params.diagonal_exponent, -2.0 * (1.0 - H) / q)

    def test_mismatched_exponent_is_rejected(self):
        with pytest.raises(DomainError):
            KernelParams(q=1, H=0.7, a=-0.75)

    def test_fbm_normalization(self):
        c = norm_constant(1, 0.7)
        assert_allclose(c, (beta(0.2, 0.6) / (0.7 * 0.4)) ** -0.5, rtol=1e-12)
        assert_allclose(kernel_exponent(1, 0.7), -0.8)

    @pytest.mark.parametrize("q, H", [(1, 0.7), (2, 0.8), (3, 0.65)])
    def test_closed_norm_matches_quadrature(self, q, H):
        assert_allclose(kernel_norm_quadrature(q, H), kernel_norm_squared(q, H), rtol=1e-6)

    def test_normalized_variance_is_one(self):
        for q, H in [(1, 0.6), (2, 0.9)]:
            variance = math.factorial(q) * norm_constant(q, H) ** 2 * kernel_norm_squared(q, H)
            assert_allclose(variance, 1.0, rtol=1e-12)

    @pytest.mark.parametrize("q, H", [(0, 0.7), (1, 0.5), (1, 1.0), (2, float("nan"))])
    def test_domain(self, q, H):
        with pytest.raises(DomainError):
            norm_constant(q, H)
