"""
Covariances of increments of processes with the fBm covariance, and the exact
variances of quadratic (co)variations built from them.

All Hermite processes with index ``H`` share the covariance of fractional
Brownian motion, so ``increment_cov`` applies to every component. Brownian
motion (``H = 1/2``) is accepted here because it is the independent-increments
limit the closed forms are checked against.
"""
import logging
import math
import numbers

import numpy as np

from src.hermqv.checks import DomainError, check_positive

logger = logging.getLogger(__name__)

MAX_SUPPORTED_N = 10 ** 6


def _check_increment_index(H: float, name: str = "H") -> None:
    if not (isinstance(H, numbers.Real) and 0.5 <= H < 1.0):
        raise DomainError(f"{name} must lie in [1/2, 1), got {H}")


def _check_length(N: int) -> None:
    if isinstance(N, bool) or not isinstance(N, numbers.Integral) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if N > MAX_SUPPORTED_N:
        raise DomainError(f"exact double sums are supported for N <= {MAX_SUPPORTED_N}, got {N}")


def fgn_autocovariance(h: float, lags) -> np.ndarray:
    """
    Unit-variance fractional Gaussian noise autocovariance
    ``r(k) = (|k+1|^{2h} + |k-1|^{2h} - 2|k|^{2h}) / 2`` for integer lags.

    For ``|k| >= 2`` the second difference is evaluated as
    ``k^{2h} (expm1(2h log1p(1/k)) + expm1(2h log1p(-1/k))) / 2``, which keeps
    full relative accuracy where the raw form cancels.
    """
    if not 0.0 < h < 1.0:
        raise DomainError(f"fGn index h must lie in (0, 1), got {h}")
    s = np.abs(np.asarray(lags, dtype=float))
    two_h = 2.0 * h
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(s >= 2.0, 1.0 / np.maximum(s, 2.0), 0.0)
        far = 0.5 * s ** two_h * (np.expm1(two_h * np.log1p(inv)) + np.expm1(two_h * np.log1p(-inv)))
    near = 0.5 * (np.abs(s + 1.0) ** two_h + np.abs(s - 1.0) ** two_h - 2.0 * s ** two_h)
    return np.where(s >= 2.0, far, near)


def increment_cov(H: float, gamma: float, i, j):
    """
    ``E[(Z_{t_{i+1}} - Z_{t_i})(Z_{t_{j+1}} - Z_{t_j})]`` on the grid ``t_k = k gamma``.

    ``i`` and ``j`` may be arrays; they broadcast.
    """
    _check_increment_index(H)
    check_positive(gamma, "gamma")
    i = np.asarray(i)
    j = np.asarray(j)
    if np.any(i < 0) or np.any(j < 0):
        raise DomainError("increment indices must be non-negative")
    value = gamma ** (2.0 * H) * fgn_autocovariance(H, i - j)
    return float(value) if value.ndim == 0 else value


def toeplitz_double_sum(values: np.ndarray, N: int) -> float:
    """``sum_{i,j<N} c(|i-j|) = N c(0) + 2 sum_{s>=1} (N - s) c(s)``, exactly rounded."""
    weights = np.arange(N, 0, -1, dtype=float)
    weights[1:] *= 2.0
    return math.fsum(weights * values)


def cross_variance_independent(H1: float, H2: float, gamma: float, N: int) -> float:
    """
    ``E[(V~3_N)^2] = sum_{i,j} gamma_ij(H1) gamma_ij(H2)`` for independent components.
    """
    _check_increment_index(H1, "H1")
    _check_increment_index(H2, "H2")
    check_positive(gamma, "gamma")
    _check_length(N)
    lags = np.arange(N)
    products = fgn_autocovariance(H1, lags) * fgn_autocovariance(H2, lags)
    return gamma ** (2.0 * H1 + 2.0 * H2) * toeplitz_double_sum(products, N)


def fbm_qv_variance(H: float, gamma: float, N: int) -> float:
    """``Var(V_N) = 2 sum_{i,j} gamma_ij(H)^2`` for a Gaussian (q = 1) component."""
    _check_increment_index(H)
    check_positive(gamma, "gamma")
    _check_length(N)
    r = fgn_autocovariance(H, np.arange(N))
    return 2.0 * gamma ** (4.0 * H) * toeplitz_double_sum(r * r, N)


def cross_variance_bound(H1: float, H2: float, gamma: float, N: int) -> float:
    """
    Cauchy-Schwarz cap on the independent cross term:
    ``E[(V~3)^2] <= sqrt(sum gamma_ij(H1)^2 sum gamma_ij(H2)^2) = sqrt(Var V(H1) Var V(H2)) / 2``.
    """
    return 0.5 * math.sqrt(fbm_qv_variance(H1, gamma, N) * fbm_qv_variance(H2, gamma, N))
