"""
Wiener-chaos oracle.

Two jobs: check the product formula for multiple integrals on kernels that are
tensor powers of two functions, where everything is exactly computable, and
evaluate the variance of the leading chaos term of the cross variation ``V3``
by quadrature, and for ``q = 1`` the variance of its third-chaos part.

For unit vectors ``g = e1`` and ``h = rho e1 + s e2`` (``s = sqrt(1 - rho^2)``)
and ``xi_i = I_1(e_i)``,

    I_{a+b}(g^{(x)a} (x) h^{(x)b}) = sum_j C(b, j) rho^{b-j} s^j H_{a+b-j}(xi1) H_j(xi2),

so every multiple integral in the span of ``g, h`` is a polynomial in two
independent standard normals.
"""
import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from src.quadrature import grade_for, graded_rule, refine_until_stable
from src.hermqv.analytic.covariance import cross_variance_independent, toeplitz_double_sum
from src.hermqv.analytic.regime import alpha_k, exponents
from src.hermqv.analytic.riemann import (DEFAULT_RTOL, DiagonalPowerKernel, delta_table, epsilon_flag,
                                         riemann_limit)
from src.hermqv.analytic.special import (beta, beta_tilde, beta_tilde_integral, kernel_exponent,
                                         norm_constant)
from src.hermqv.checks import DomainError, IllConditionedBasisError, check_hurst, check_order
from src.hermqv.gaussgen import seed_stream

logger = logging.getLogger(__name__)

MAX_HERMITE_DEGREE = 64
MAX_EXACT_N = 512
COLLINEAR_TOL = 1e-10
SWAPPED_N_START = 12


def hermite_poly(n: int, x):
    """Probabilists' Hermite polynomial ``H_n(x)`` by ``H_{k+1} = x H_k - k H_{k-1}``."""
    if isinstance(n, bool) or not 0 <= n <= MAX_HERMITE_DEGREE:
        raise DomainError(f"Hermite degree must lie in [0, {MAX_HERMITE_DEGREE}], got {n}")
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return previous if previous.ndim else float(previous)
    current = x.copy()
    for k in range(1, n):
        previous, current = current, x * current - k * previous
    return current if current.ndim else float(current)


class TensorPowerKernel:
    """
    ``g^{(x)a} (x) h^{(x)b}`` for two functions sampled on a quadrature grid.

    ``weights`` are the quadrature weights of the grid, so ``<g, h>`` is
    ``sum(weights * g * h)``.
    """

    def __init__(self, g: np.ndarray, h: np.ndarray, weights: np.ndarray, a: int = 0, b: int = 0) -> None:
        g = np.asarray(g, dtype=float)
        h = np.asarray(h, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if not (g.shape == h.shape == weights.shape):
            raise DomainError("g, h and weights must be sampled on the same grid")
        if a < 0 or b < 0:
            raise DomainError(f"tensor powers must be nonnegative, got a={a}, b={b}")
        self.g = g
        self.h = h
        self.weights = weights
        self.a = a
        self.b = b
        self.norm_g = math.sqrt(self.inner(g, g))
        self.norm_h = math.sqrt(self.inner(h, h))
        if not (self.norm_g > 0 and self.norm_h > 0 and math.isfinite(self.norm_g * self.norm_h)):
            raise DomainError("base functions must have finite nonzero norm")
        self.rho = self.inner(g, h) / (self.norm_g * self.norm_h)
        if abs(self.rho) > 1.0 - COLLINEAR_TOL:
            raise IllConditionedBasisError(f"g and h are collinear (rho = {self.rho})")

    def inner(self, f1: np.ndarray, f2: np.ndarray) -> float:
        return math.fsum(self.weights * f1 * f2)

    @property
    def order(self) -> int:
        return self.a + self.b

    @property
    def gh(self) -> float:
        """``<g, h>``."""
        return self.rho * self.norm_g * self.norm_h

    def with_powers(self, a: int, b: int) -> "TensorPowerKernel":
        kernel = TensorPowerKernel.__new__(TensorPowerKernel)
        kernel.__dict__.update(self.__dict__)
        if a < 0 or b < 0:
            raise DomainError(f"tensor powers must be nonnegative, got a={a}, b={b}")
        kernel.a, kernel.b = a, b
        return kernel

    def multiple_integral(self, xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
        """``I_{a+b}(g^{(x)a} (x) h^{(x)b})`` at ``xi_i = I_1(e_i)``."""
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        s = math.sqrt(1.0 - self.rho ** 2)
        total = np.zeros(np.broadcast(xi1, xi2).shape)
        for j in range(self.b + 1):
            weight = special.comb(self.b, j, exact=True) * self.rho ** (self.b - j) * s ** j
            total = total + weight * hermite_poly(self.order - j, xi1) * hermite_poly(j, xi2)
        return self.norm_g ** self.a * self.norm_h ** self.b * total


@dataclass(frozen=True)
class Contraction:
    """``(g^{(x)m}) (x)_k (h^{(x)n}) = coefficient g^{(x)power_g} (x) h^{(x)power_h}``."""
    coefficient: float
    power_g: int
    power_h: int


def contraction_kernel(m: int, n: int, k: int, g: np.ndarray, h: np.ndarray,
                       weights: np.ndarray) -> Contraction:
    if not 0 <= k <= min(m, n):
        raise DomainError(f"contraction order must lie in [0, min(m, n)] = [0, {min(m, n)}], got {k}")
    kernel = TensorPowerKernel(g, h, weights)
    return Contraction(kernel.gh ** k, m - k, n - k)


def _normals(trials: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = seed_stream(seed)
    xi = rng.standard_normal((2, trials))
    return xi[0], xi[1]


def product_formula_check(m: int, n: int, g: np.ndarray, h: np.ndarray, trials: int = 1000,
                          seed: int = 0, weights: Optional[np.ndarray] = None) -> float:
    """
    Largest absolute gap between ``I_m(g^m) I_n(h^n)`` and
    ``sum_k k! C(m,k) C(n,k) <g,h>^k I_{m+n-2k}(g^{m-k} (x) h^{n-k})`` over ``trials`` draws.
    """
    if not (0 <= m <= 6 and 0 <= n <= 6):
        raise DomainError(f"orders must lie in [0, 6], got m={m}, n={n}")
    if weights is None:
        weights = np.full(len(g), 1.0 / len(g))
    kernel = TensorPowerKernel(g, h, weights)
    xi1, xi2 = _normals(trials, seed)
    left = kernel.with_powers(m, 0).multiple_integral(xi1, xi2) \
        * kernel.with_powers(0, n).multiple_integral(xi1, xi2)
    right = np.zeros_like(left)
    for k in range(min(m, n) + 1):
        contraction = contraction_kernel(m, n, k, g, h, weights)
        coefficient = math.factorial(k) * special.comb(m, k, exact=True) * special.comb(n, k, exact=True)
        term = kernel.with_powers(contraction.power_g, contraction.power_h).multiple_integral(xi1, xi2)
        right = right + coefficient * contraction.coefficient * term
    deviation = float(np.max(np.abs(left - right)))
    logger.debug("product formula m=%d n=%d rho=%.3f: max deviation %.3g", m, n, kernel.rho, deviation)
    return deviation


def isometry_check(n: int, m: int, g: np.ndarray, h: np.ndarray, trials: int = 100000,
                   seed: int = 0, weights: Optional[np.ndarray] = None) -> Dict[str, float]:
    """Monte Carlo ``E[I_n(g^n) I_m(h^m)]`` against ``n! <g,h>^n 1{m = n}``."""
    if weights is None:
        weights = np.full(len(g), 1.0 / len(g))
    kernel = TensorPowerKernel(g, h, weights)
    xi1, xi2 = _normals(trials, seed)
    products = kernel.with_powers(n, 0).multiple_integral(xi1, xi2) \
        * kernel.with_powers(0, m).multiple_integral(xi1, xi2)
    exact = math.factorial(n) * kernel.gh ** n if m == n else 0.0
    return {"estimate": float(products.mean()),
            "exact": exact,
            "standard_error": float(products.std(ddof=1) / math.sqrt(trials))}


def two_function_basis(rho: float, n_points: int = 32) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit functions ``g, h`` on [0, 1] with ``<g, h> = rho``, plus the Gauss-Legendre weights."""
    if not -1.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (-1, 1), got {rho}")
    x, w = leggauss(n_points)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    e1 = np.ones_like(x)
    e2 = math.sqrt(3.0) * (2.0 * x - 1.0)
    return e1, rho * e1 + math.sqrt(1.0 - rho ** 2) * e2, w


def product_formula_sweep(max_total: int = 6, rhos=(0.0, 0.3, -0.3, 0.9, -0.9),
                          trials: int = 1000, seed: int = 0) -> List[Dict[str, Any]]:
    rows = []
    for rho in rhos:
        g, h, w = two_function_basis(rho)
        for m in range(1, max_total):
            for n in range(1, max_total + 1 - m):
                rows.append({"m": m, "n": n, "rho": rho,
                             "max_deviation": product_formula_check(m, n, g, h, trials, seed, w)})
    return rows


def beta_tilde_checks(draws: int = 20, seed: int = 0) -> List[Dict[str, float]]:
    """Closed form against quadrature of ``int_{-inf}^{u^v} (u-s)^a (v-s)^b ds`` at random valid points."""
    rng = seed_stream(seed)
    rows = []
    while len(rows) < draws:
        a = rng.uniform(-0.95, -0.55)
        b = rng.uniform(-0.95, -1.0 - a - 0.02)
        u, v = rng.uniform(0.0, 2.0, size=2)
        if abs(u - v) < 0.05:
            continue
        closed = beta_tilde(a, b, u, v) * abs(u - v) ** (a + b + 1.0)
        quadrature = beta_tilde_integral(a, b, u, v)
        rows.append({"a": a, "b": b, "u": u, "v": v, "closed": closed, "quadrature": quadrature,
                     "relative_deviation": abs(quadrature - closed) / closed})
    return rows


@dataclass(frozen=True)
class ChaosTermSpec:
    k: int
    multiplicity: int
    coefficient: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _check_k(k: int, q: int) -> None:
    if not 0 <= k <= q:
        raise DomainError(f"k must lie in [0, {q}], got {k}")


def m_coefficient(k: int, q: int, H1: float, H2: float) -> float:
    """``M(k) = c(H1, q) c(H2, q+1) k! C(q, k) C(q+1, k)``."""
    check_order(q)
    _check_k(k, q)
    return norm_constant(q, H1) * norm_constant(q + 1, H2) * math.factorial(k) \
        * special.comb(q, k, exact=True) * special.comb(q + 1, k, exact=True)


def chaos_terms(q: int, H1: float, H2: float) -> List[ChaosTermSpec]:
    """``V3`` splits into chaoses of order ``2q + 1 - 2k``, ``k = 0..q``."""
    return [ChaosTermSpec(k, 2 * q + 1 - 2 * k, m_coefficient(k, q, H1, H2)) for k in range(q + 1)]


def leading_kernel(q: int, H1: float, H2: float) -> DiagonalPowerKernel:
    """
    ``F(U, V) = [beta_tilde(a1, a2; U, V) |U - V|^{-H1*}]^q`` of the ``k = q`` term.

    ``beta_tilde`` only depends on the sign of ``U - V``, so ``F`` is a
    diagonal power kernel with exponent ``q H1*``.
    """
    a1 = kernel_exponent(q, H1)
    a2 = kernel_exponent(q + 1, H2)
    kappa = q * exponents(q, H1, H2).H1_star
    if kappa >= 1.0:
        raise DomainError(f"q H1* = {kappa} >= 1: the leading kernel is not integrable")
    return DiagonalPowerKernel(lower=beta(a1 + 1.0, -1.0 - a1 - a2) ** q,
                               upper=beta(a2 + 1.0, -1.0 - a1 - a2) ** q,
                               kappa=kappa)


def _leading_parts(q: int, H1: float, H2: float) -> Tuple[float, float, DiagonalPowerKernel]:
    check_order(q)
    check_hurst(H1, "H1")
    check_hurst(H2, "H2")
    a2 = kernel_exponent(q + 1, H2)
    factor = m_coefficient(q, q, H1, H2) ** 2 * beta(a2 + 1.0, -2.0 * a2 - 1.0)
    alpha2 = 2.0 * (1.0 - H2) / (q + 1)
    return factor, alpha2, leading_kernel(q, H1, H2)


def _check_exact_length(N: int) -> None:
    if not 1 <= N <= MAX_EXACT_N:
        raise DomainError(f"exact sums are supported for 1 <= N <= {MAX_EXACT_N}, got {N}; "
                          f"use sigma3_asymptotic beyond")


def sigma3_exact(q: int, H1: float, H2: float, N: int, gamma: float = 1.0) -> float:
    """
    ``E[(V3^{(q)})^2] = M(q)^2 beta(a2+1, -2a2-1) gamma^{2H1+2H2} sum_{i,j<N} Delta(i-j)``
    with ``Delta`` taken with exponents ``(0, 2(1-H2)/(q+1))`` and the leading kernel.
    """
    _check_exact_length(N)
    factor, alpha2, F = _leading_parts(q, H1, H2)
    table = delta_table(0.0, alpha2, F)
    return factor * gamma ** (2.0 * H1 + 2.0 * H2) * table.partial_sum(N)


@lru_cache(maxsize=4096)
def swapped_delta(ell: int, H1: float, H2: float, rtol: float = DEFAULT_RTOL) -> float:
    """
    ``q = 1`` pairing of the fBm increment of one cell with the Rosenblatt increment of the other:

        Delta~(l) = int_{[0,1]^4} |V - V' + l|^{-alpha2} F(U, V + l) F(U' + l, V')

    with ``F`` the leading kernel. ``Delta~(0) = Delta(0)``; for ``l >= 1`` the
    ``U`` integrals are closed form and ``(V, V')`` takes a graded tensor rule.
    """
    ell = abs(int(ell))
    _, alpha2, F = _leading_parts(1, H1, H2)
    if ell == 0:
        return delta_table(0.0, alpha2, F)(0)
    power = 1.0 - F.kappa
    grade = grade_for(max(F.kappa, alpha2))

    def evaluate(n: int) -> float:
        v, w = graded_rule(n, grade)
        a = F.lower * ((ell + v) ** power - (ell - 1.0 + v) ** power) / power
        b = F.upper * ((ell + 1.0 - v) ** power - (ell - v) ** power) / power
        kernel = np.abs(v[:, None] - v[None, :] + ell) ** -alpha2
        return float((w * a) @ kernel @ (w * b))

    return refine_until_stable(evaluate, SWAPPED_N_START, rtol, label=f"swapped Delta({ell})")


def third_chaos_variance(H1: float, H2: float, N: int, gamma: float = 1.0) -> float:
    """
    Variance of the third-chaos part of ``V3`` for ``q = 1``:

        gamma^{2H1+2H2} sum_{i,j<N} [r1(i-j) r2(i-j) + M(1)^2 beta(a2+1, -2a2-1) Delta~(i-j)]

    ``r1 r2`` is the variance of ``V3`` for independent components; the second
    sum comes from the contractions that swap the cells of the two factors.
    """
    _check_exact_length(N)
    factor, _, _ = _leading_parts(1, H1, H2)
    swapped = np.array([swapped_delta(ell, H1, H2) for ell in range(N)])
    independent = cross_variance_independent(H1, H2, 1.0, N)
    variance = gamma ** (2.0 * H1 + 2.0 * H2) * (independent + factor * toeplitz_double_sum(swapped, N))
    logger.debug("third chaos of V3 at N=%d: %.8g (independent part %.8g)", N, variance, independent)
    return variance


def cross_variance_dependent(H1: float, H2: float, N: int, gamma: float = 1.0) -> float:
    """``E[V3^2]`` for ``q = 1``: :func:`sigma3_exact` plus :func:`third_chaos_variance`."""
    return sigma3_exact(1, H1, H2, N, gamma) + third_chaos_variance(H1, H2, N, gamma)


def sigma3_constant(q: int, H1: float, H2: float) -> float:
    """``b^2``, the limit of ``N^{-2+alpha2} gamma^{-2(H1+H2)} E[(V3^{(q)})^2]``."""
    factor, alpha2, F = _leading_parts(q, H1, H2)
    return riemann_limit(0.0, alpha2, F.integral()) * factor


def sigma3_asymptotic(q: int, H1: float, H2: float, N: int, gamma: float = 1.0) -> float:
    alpha2 = 2.0 * (1.0 - H2) / (q + 1)
    return sigma3_constant(q, H1, H2) * N ** (2.0 - alpha2) * gamma ** (2.0 * H1 + 2.0 * H2)


def sigma3_table(q: int, H1: float, H2: float, N_grid: List[int], gamma: float = 1.0) -> List[Dict[str, Any]]:
    """
    Leading-term variance per ``N``; for ``q = 1`` and exact sums also the
    third-chaos variance and their total ``E[V3^2]``, ``None`` otherwise.
    """
    rows = []
    for N in N_grid:
        exact = N <= MAX_EXACT_N
        value = sigma3_exact(q, H1, H2, N, gamma) if exact else sigma3_asymptotic(q, H1, H2, N, gamma)
        third = third_chaos_variance(H1, H2, N, gamma) if exact and q == 1 else None
        rows.append({"N": N, "variance": value, "exact": exact, "third_chaos": third,
                     "total": None if third is None else value + third})
    return rows


def chaos_rate_bounds(q: int, H1: float, H2: float) -> List[Dict[str, Any]]:
    """
    Growth of ``E[(V3^{(k)})^2]``: ``N^{2 - min(alpha(k), 1)} (log N)^{eps(alpha(k))} gamma^{2H1+2H2}``.
    """
    rows = []
    for k in range(q + 1):
        alpha = alpha_k(q, k, H1, H2)
        rows.append({"k": k, "alpha": alpha, "exponent": 2.0 - min(alpha, 1.0),
                     "log_flag": epsilon_flag(alpha), "gamma_exponent": 2.0 * H1 + 2.0 * H2})
    leading = rows[-1]["exponent"]
    assert all(row["exponent"] < leading for row in rows[:-1]), rows
    return rows
