"""
Riemann-sum limits of double sums of four-dimensional integrals.

For ``0 <= alpha1, alpha2`` and a nonnegative ``F`` on the unit square,

    Delta(l) = int_{[0,1]^4} |U - U' + l|^{-alpha1} |V - V' + l|^{-alpha2} F(U, V) F(U', V')

and ``N^{alpha - 2} sum_{i,j<N} Delta(i - j)`` tends to
``2 gammaF^2 / ((1 - alpha)(2 - alpha))`` when ``alpha = alpha1 + alpha2 < 1``.

Three evaluation paths are used for Delta, chosen by the lag:

* ``|l| <= 1``: nested graded quadrature over (U', V', U, V). Every level is cut at
  the points where an inner singular set meets it, so all singularities sit on
  panel endpoints.
* ``2 <= |l| < SERIES_FROM``: the kernel is smooth, so a product of two
  (U, V) rules, each cut on the diagonal of F, is enough.
* ``|l| >= SERIES_FROM``: ``(l + d)^{-alpha} = l^{-alpha} sum_a binom(-alpha, a) (d/l)^a``
  with ``|d| < 1`` turns Delta into a power series in ``1/l`` whose coefficients
  are mixed moments of ``F (x) F``.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import special

from src.quadrature import composite_rule, grade_for, refine_until_stable, weighted_sum
from src.hermqv.checks import DomainError, QuadratureConvergenceError

logger = logging.getLogger(__name__)

SERIES_FROM = 4
SERIES_ORDER = 40
DEFAULT_RTOL = 1e-4
ENVELOPE_SLACK = 10.0
# Tolerance for exponent comparisons made on exact-arithmetic quantities.
EXACT_TOL = 1e-12


@dataclass(frozen=True)
class DiagonalPowerKernel:
    """
    ``F(U, V) = lower |U - V|^{-kappa}`` for ``U < V`` and ``upper |U - V|^{-kappa}`` for ``U > V``.

    ``DiagonalPowerKernel(1, 1, 0)`` is ``F = 1``.
    """
    lower: float
    upper: float
    kappa: float = 0.0

    def __post_init__(self) -> None:
        if self.lower < 0 or self.upper < 0:
            raise DomainError("orthant weights of F must be nonnegative")
        if not 0.0 <= self.kappa < 1.0:
            raise DomainError(f"diagonal exponent kappa must lie in [0, 1), got {self.kappa}")

    def __call__(self, U, V):
        U = np.asarray(U, dtype=float)
        V = np.asarray(V, dtype=float)
        weight = np.where(U < V, self.lower, self.upper)
        if self.kappa == 0.0:
            return weight * np.ones(np.broadcast(U, V).shape)
        with np.errstate(divide="ignore"):
            return weight * np.abs(U - V) ** (-self.kappa)

    def integral(self) -> float:
        """``int_{[0,1]^2} F = (lower + upper) / ((1 - kappa)(2 - kappa))``."""
        return (self.lower + self.upper) / ((1.0 - self.kappa) * (2.0 - self.kappa))


def epsilon_flag(alpha: float) -> int:
    return 1 if math.isclose(alpha, 1.0, rel_tol=0.0, abs_tol=EXACT_TOL) else 0


def _check_alphas(alpha1: float, alpha2: float) -> None:
    for name, value in (("alpha1", alpha1), ("alpha2", alpha2)):
        if not 0.0 <= value < 1.0:
            raise DomainError(f"{name} must lie in [0, 1), got {value}")


def riemann_limit(alpha1: float, alpha2: float, gammaF: float) -> float:
    """Limit of ``N^{alpha1+alpha2-2} sum_{i,j<N} Delta(i-j)``."""
    _check_alphas(alpha1, alpha2)
    alpha = alpha1 + alpha2
    if alpha >= 1.0:
        raise DomainError(f"alpha1 + alpha2 = {alpha} >= 1: the double sum grows like "
                          f"N (log N)^eps, see riemann_bound_class")
    if gammaF <= 0:
        raise DomainError(f"gammaF must be positive, got {gammaF}")
    return 2.0 * gammaF ** 2 / ((1.0 - alpha) * (2.0 - alpha))


def riemann_bound_class(alpha1: float, alpha2: float) -> Tuple[float, int]:
    """
    Growth class ``(exponent of N, log flag)`` of ``sum_{i,j<N} Delta(i-j)``:
    ``N^{2-alpha}`` below one, ``N (log N)^{eps(alpha)}`` from one on.
    """
    _check_alphas(alpha1, alpha2)
    alpha = alpha1 + alpha2
    return 2.0 - min(alpha, 1.0), epsilon_flag(alpha)


def _power_kernel(x: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 0.0:
        return np.ones_like(x)
    with np.errstate(divide="ignore"):
        return np.abs(x) ** (-alpha)


def _kappa_of(F: Callable) -> float:
    return float(getattr(F, "kappa", 0.5))


def _pair_rule(n: int, grade: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes (U, V) and weights of a rule on the unit square cut along ``U = V``."""
    u, wu = composite_rule(0.0, 1.0, np.empty(0), n, grade)
    v, wv = composite_rule(np.zeros_like(u), np.ones_like(u), u[:, None], n, grade)
    U = np.broadcast_to(u[:, None], v.shape).ravel()
    return U, v.ravel(), (wu[:, None] * wv).ravel()


def _weighted_F(F: Callable, U: np.ndarray, V: np.ndarray, W: np.ndarray) -> np.ndarray:
    values = F(U, V)
    with np.errstate(invalid="ignore"):
        return np.where((W > 0) & np.isfinite(values), W * values, 0.0)


def _integrate_square(F: Callable, n: int, grade: int) -> float:
    return float(_weighted_F(F, *_pair_rule(n, grade)).sum())


def _delta_nested(ell: int, alpha1: float, alpha2: float, F: Callable, n: int, grade: int) -> float:
    u_outer, w_outer = composite_rule(0.0, 1.0, np.empty(0), n, grade)
    slices = []
    for up, wup in zip(u_outer, w_outer):
        vp, wvp = composite_rule(0.0, 1.0, np.array([up]), n, grade)
        # U: cut where |U - U' + l| and the merged V singularities vanish
        cuts = np.stack([np.full_like(vp, up - ell), vp - ell], axis=-1)
        u, wu = composite_rule(np.zeros_like(vp), np.ones_like(vp), cuts, n, grade)
        # V: cut on the diagonal of F and where |V - V' + l| vanishes
        shift = np.broadcast_to((vp - ell)[:, None], u.shape)
        v, wv = composite_rule(np.zeros_like(u), np.ones_like(u), np.stack([u, shift], axis=-1), n, grade)

        inner_values = F(u[..., None], v) * _power_kernel(v - vp[:, None, None] + ell, alpha2)
        inner = weighted_sum(inner_values, wv, axis=-1)
        middle = weighted_sum(inner * _power_kernel(u - up + ell, alpha1), wu, axis=-1)
        slices.append(weighted_sum(middle * F(up, vp), wvp) * wup)
    return math.fsum(slices)


def _delta_product(ell: int, alpha1: float, alpha2: float, F: Callable, n: int, grade: int) -> float:
    U, V, W = _pair_rule(n, grade)
    W = _weighted_F(F, U, V, W)
    k1 = _power_kernel(U[:, None] - U[None, :] + ell, alpha1)
    k2 = _power_kernel(V[:, None] - V[None, :] + ell, alpha2)
    return float(W @ (k1 * k2) @ W)


class DeltaTable:
    """
    Memoized values of ``Delta(l)`` for one ``(alpha1, alpha2, F)``.

    ``F`` must be nonnegative with singularities only on the diagonal
    ``U = V`` and integrable against the kernels; its ``kappa`` attribute,
    when present, sets the grading of the rules.
    """

    def __init__(self,
                 alpha1: float,
                 alpha2: float,
                 F: Callable,
                 rtol: float = DEFAULT_RTOL,
                 n_start: int = 12) -> None:
        if not (alpha1 >= 0 and alpha2 >= 0 and alpha1 < 1 and alpha2 < 1):
            raise DomainError(f"kernel exponents must lie in [0, 1), got {alpha1}, {alpha2}")
        self.alpha1 = float(alpha1)
        self.alpha2 = float(alpha2)
        self.F = F
        self.rtol = rtol
        self._n_start = n_start
        self._grade = grade_for(max(_kappa_of(F), self.alpha1, self.alpha2))
        self._values: Dict[int, float] = {}
        self._series: np.ndarray = None
        self._gammaF: float = None

    @property
    def alpha(self) -> float:
        return self.alpha1 + self.alpha2

    @property
    def gammaF(self) -> float:
        """``int F`` over the unit square, closed form when ``F`` provides one."""
        if self._gammaF is None:
            if hasattr(self.F, "integral"):
                self._gammaF = float(self.F.integral())
            else:
                self._gammaF = refine_until_stable(
                        lambda n: _integrate_square(self.F, n, self._grade),
                        self._n_start, self.rtol * 1e-2, label="int F")
        return self._gammaF

    def _series_coefficients(self) -> np.ndarray:
        if self._series is None:
            n = 2 * self._n_start
            U, V, W = _pair_rule(n, self._grade)
            W = _weighted_F(self.F, U, V, W)
            D1 = U[:, None] - U[None, :]
            D2 = V[:, None] - V[None, :]
            outer = W[:, None] * W[None, :]
            order = SERIES_ORDER
            b1 = special.binom(-self.alpha1, np.arange(order + 1))
            b2 = special.binom(-self.alpha2, np.arange(order + 1))
            coefficients = np.zeros(order + 1)
            left = outer.copy()
            for a in range(order + 1):
                right = left.copy()
                for b in range(order + 1 - a):
                    coefficients[a + b] += b1[a] * b2[b] * right.sum()
                    right *= D2
                left *= D1
            coefficients.setflags(write=False)
            self._series = coefficients
            logger.info("series coefficients for alpha=(%g, %g): leading %.10g (gammaF^2 %.10g)",
                        self.alpha1, self.alpha2, coefficients[0], self.gammaF ** 2)
        return self._series

    def _from_series(self, lags: np.ndarray) -> np.ndarray:
        coefficients = self._series_coefficients()
        inv = 1.0 / lags
        # Horner in 1/l, highest order first
        return lags ** (-self.alpha) * np.polyval(coefficients[::-1], inv)

    def _direct(self, ell: int) -> float:
        if ell <= 1:
            evaluate = lambda n: _delta_nested(ell, self.alpha1, self.alpha2, self.F, n, self._grade)
        else:
            evaluate = lambda n: _delta_product(ell, self.alpha1, self.alpha2, self.F, n, self._grade)
        value = refine_until_stable(evaluate, self._n_start, self.rtol, max_doublings=2,
                                    label=f"Delta({ell})")
        logger.debug("Delta(%d) = %.12g", ell, value)
        return value

    def _check_envelope(self, ell: int, value: float) -> None:
        scale = self.gammaF ** 2
        low = scale * (ell + 1.0) ** (-self.alpha)
        high = scale * (ell - 1.0) ** (-self.alpha)
        slack = ENVELOPE_SLACK * self.rtol * high
        if not low - slack <= value <= high + slack:
            raise QuadratureConvergenceError(
                    f"Delta({ell}) = {value} outside the envelope [{low}, {high}]")

    def __call__(self, ell: int) -> float:
        ell = abs(int(ell))
        if ell not in self._values:
            if ell < SERIES_FROM:
                value = self._direct(ell)
            else:
                value = float(self._from_series(np.array([float(ell)]))[0])
            if ell >= 2:
                self._check_envelope(ell, value)
            self._values[ell] = value
        return self._values[ell]

    def values(self, max_lag: int) -> np.ndarray:
        """Read-only ``[Delta(0), ..., Delta(max_lag)]``."""
        near = [self(ell) for ell in range(min(max_lag + 1, SERIES_FROM))]
        far = np.empty(0)
        if max_lag >= SERIES_FROM:
            lags = np.arange(SERIES_FROM, max_lag + 1, dtype=float)
            far = self._from_series(lags)
            self._check_envelope(SERIES_FROM, far[0])
            self._check_envelope(max_lag, far[-1])
        table = np.concatenate([np.asarray(near, dtype=float), far])
        table.setflags(write=False)
        return table

    def partial_sum(self, N: int) -> float:
        """``sum_{i,j<N} Delta(i-j) = N [Delta(0) + 2 sum_{l>=1} (1 - l/N) Delta(l)]``."""
        if N < 1:
            raise DomainError(f"N must be positive, got {N}")
        table = self.values(N - 1)
        weights = np.arange(N, 0, -1, dtype=float)
        weights[1:] *= 2.0
        return math.fsum(weights * table)

    def riemann_ratio(self, N: int) -> float:
        """``N^{alpha - 2} sum_{i,j<N} Delta(i-j)``."""
        return N ** (self.alpha - 2.0) * self.partial_sum(N)


@lru_cache(maxsize=32)
def delta_table(alpha1: float, alpha2: float, F: Callable, rtol: float = DEFAULT_RTOL) -> DeltaTable:
    return DeltaTable(alpha1, alpha2, F, rtol=rtol)


def delta_ell(ell: int, alpha1: float, alpha2: float, F: Callable) -> float:
    """``Delta(l)``; values are memoized per ``(alpha1, alpha2, F)``."""
    return delta_table(float(alpha1), float(alpha2), F)(ell)
