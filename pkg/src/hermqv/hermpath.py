"""
Sample paths of Hermite processes and of coupled pairs ``(Z^{H1,q}, Z^{H2,q+1})``.

Three couplings are available, each a registered :class:`PairGenerator`:

``subordinated``
    One fGn sequence ``X`` drives both components through partial sums of
    ``H_q(X_i)`` and ``H_{q+1}(X_i)``. Dependent, and only on the line
    ``H2 = 1 - (q+1)(1-H1)/q``.
``kernel-grid``
    ``q = 1``: fBm and a Rosenblatt process written as Wiener integrals
    against the same Brownian increments: a uniform grid near the observation
    window and geometrically growing cells behind it.
``independent-drivers``
    Each component from its own driver.

Generators produce paths at unit spacing ``t = 0, 1, ..., N``;
:func:`rescale_selfsimilar` maps them to ``t_i = gamma i``.
"""
import csv
import logging
import math
from functools import lru_cache, partial
from typing import Any, Callable, Dict, NamedTuple, Optional, Sequence, TextIO, Tuple

import numpy as np
from allennlp.common import FromParams, Registrable
from allennlp.common.checks import ConfigurationError
from overrides import overrides
from scipy import signal

from src.quadrature import graded_rule
from src.hermqv.analytic.covariance import fgn_autocovariance, toeplitz_double_sum
from src.hermqv.analytic.special import beta, kernel_exponent, kernel_norm_squared, norm_constant
from src.hermqv.chaosor import hermite_poly
from src.hermqv.checks import (CalibrationError, DomainError, GridMismatchError,
                               GridTooCoarseError, check_hurst, check_order, check_positive)
from src.hermqv.gaussgen import fgn, seed_stream
from src.hermqv.specs import (INDEPENDENT_DRIVERS, KERNEL_GRID, SUBORDINATED, PairSpec,
                              constraint_line)

logger = logging.getLogger(__name__)

MIN_INNER = 64
DEFAULT_INNER = 256

FBM = "fbm"
ROSENBLATT = "rosenblatt"
# graded nodes per cell for the time integral of the Rosenblatt kernel
TIME_NODES = 4
TIME_GRADE = 3
# Gauss nodes in log z per far cell
FAR_NODES = 2
MAX_FAR_CELLS = 4096
MAX_LOG_CUT = 700.0

Stream = Sequence[int]


class SamplePath:
    def __init__(self, times: np.ndarray, values: np.ndarray, meta: Optional[Dict[str, Any]] = None) -> None:
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise GridMismatchError(f"times {times.shape} and values {values.shape} differ")
        if values.size and values[0] != 0.0:
            raise DomainError(f"paths start at 0, got {values[0]}")
        self.times = times
        self.values = values
        self.meta = dict(meta or {})

    def __len__(self) -> int:
        return len(self.values)

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def scaled(self, gamma: float, H: float) -> "SamplePath":
        meta = dict(self.meta, gamma=self.meta.get("gamma", 1.0) * gamma)
        return SamplePath(self.times * gamma, self.values * gamma ** H, meta)


class PathPair:
    def __init__(self,
                 component1: SamplePath,
                 component2: SamplePath,
                 coupling: str,
                 H1: float,
                 H2: float) -> None:
        if not np.array_equal(component1.times, component2.times):
            raise GridMismatchError("components of a pair must share their time grid")
        self.component1 = component1
        self.component2 = component2
        self.coupling = coupling
        self.H1 = H1
        self.H2 = H2

    @property
    def times(self) -> np.ndarray:
        return self.component1.times

    @property
    def N(self) -> int:
        return len(self.times) - 1

    @property
    def gamma(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 1.0


def constraint_H2(q: int, H1: float) -> float:
    """``H2`` paired with ``H1`` by subordination: ``1 - (q+1)(1-H1)/q``."""
    check_order(q)
    check_hurst(H1, "H1")
    H2 = constraint_line(q, H1)
    if H2 <= 0.5:
        raise DomainError(f"1 - (q+1)(1-H1)/q = {H2} <= 1/2 for q={q}, H1={H1}: "
                          f"need H1 > {1.0 - q / (2.0 * (q + 1))}")
    return H2


def driver_index(order: int, H: float) -> float:
    """fGn index ``h`` with ``r(k)^order ~ k^{2H-2}``."""
    return 1.0 - (1.0 - H) / order


@lru_cache(maxsize=128)
def hermite_sum_scale(order: int, h: float, n_inner: int) -> float:
    """``sd(sum_{i<n} H_order(X_i)) = sqrt(order! sum_{i,j<n} r(i-j)^order)`` for fGn(h)."""
    r = fgn_autocovariance(h, np.arange(n_inner))
    variance = math.factorial(order) * toeplitz_double_sum(r ** order, n_inner)
    if not (math.isfinite(variance) and variance > 0):
        raise CalibrationError(f"partial-sum variance {variance} for order {order}, h={h}, n={n_inner}")
    logger.info("calibration constant for order %d, h=%g, n_inner=%d: %.10g",
                order, h, n_inner, math.sqrt(variance))
    return math.sqrt(variance)


def _unit_times(N: int) -> np.ndarray:
    return np.arange(N + 1, dtype=float)


def _block_partial_sums(values: np.ndarray, N: int, n_inner: int) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(values.reshape(N, n_inner).sum(axis=1))])


def _check_inner(n_inner: int) -> None:
    if n_inner < MIN_INNER:
        raise DomainError(f"n_inner must be >= {MIN_INNER}, got {n_inner}")


def _check_length(N: int) -> None:
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")


def subordinated_component(order: int, H: float, N: int, n_inner: int,
                           driver: np.ndarray) -> SamplePath:
    h = driver_index(order, H)
    scale = hermite_sum_scale(order, h, n_inner)
    values = _block_partial_sums(hermite_poly(order, driver), N, n_inner) / scale
    meta = {"generator": SUBORDINATED, "order": order, "H": H, "h": h, "n_inner": n_inner}
    return SamplePath(_unit_times(N), values, meta)


def simulate_pair_subordinated(q: int, H1: float, N: int, n_inner: int = DEFAULT_INNER,
                               seed: int = 0, stream: Stream = ()) -> PathPair:
    """
    Dependent pair on the constraint line from one fGn driver of length ``N n_inner``.

    Component values at integer ``t`` are ``sum_{i < t n_inner} H_p(X_i) / s_p``
    with ``s_p`` the exact standard deviation at ``t = 1``.
    """
    H2 = constraint_H2(q, H1)
    _check_length(N)
    _check_inner(n_inner)
    h = driver_index(q, H1)
    driver = fgn(h, N * n_inner, seed_stream(seed, *stream))
    component1 = subordinated_component(q, H1, N, n_inner, driver)
    component2 = subordinated_component(q + 1, H2, N, n_inner, driver)
    return PathPair(component1, component2, SUBORDINATED, H1, H2)


def simulate_fbm(H: float, N: int, gamma: float = 1.0, seed: int = 0, stream: Stream = ()) -> SamplePath:
    """fBm at ``t_i = gamma i`` from cumulative sums of exact fGn; ``H = 1/2`` is a random walk."""
    if not 0.5 <= H < 1.0:
        raise DomainError(f"H must lie in [1/2, 1), got {H}")
    _check_length(N)
    check_positive(gamma, "gamma")
    noise = fgn(H, N, seed_stream(seed, *stream))
    values = np.concatenate([[0.0], np.cumsum(noise)])
    path = SamplePath(_unit_times(N), values, {"generator": "fbm", "order": 1, "H": H})
    return path.scaled(gamma, H) if gamma != 1.0 else path


def simulate_pair_independent(q: int, H1: float, H2: float, N: int, gamma: float = 1.0,
                              n_inner: int = DEFAULT_INNER, seed: int = 0,
                              stream: Stream = ()) -> PathPair:
    """
    Independent pair: streams ``(seed, *stream, 0)`` and ``(seed, *stream, 1)``.

    An order-1 component is exact fBm; higher orders use subordination with a
    driver tuned to their own ``(order, H)``.
    """
    check_order(q)
    check_hurst(H1, "H1")
    check_hurst(H2, "H2")
    _check_length(N)
    _check_inner(n_inner)
    check_positive(gamma, "gamma")
    if q == 1:
        component1 = simulate_fbm(H1, N, 1.0, seed, tuple(stream) + (0,))
    else:
        driver = fgn(driver_index(q, H1), N * n_inner, seed_stream(seed, *stream, 0))
        component1 = subordinated_component(q, H1, N, n_inner, driver)
    driver = fgn(driver_index(q + 1, H2), N * n_inner, seed_stream(seed, *stream, 1))
    component2 = subordinated_component(q + 1, H2, N, n_inner, driver)
    pair = PathPair(component1, component2, INDEPENDENT_DRIVERS, H1, H2)
    return rescale_selfsimilar(pair, gamma, H1, H2) if gamma != 1.0 else pair


class GridSpec(FromParams):
    """
    Spatial grid of the kernel-grid coupling.

    Cells of width ``step`` cover ``[-horizon, t_max]``. Behind them, far cells
    ``[-horizon ratio^(k+1), -horizon ratio^k]`` reach back until the kernel
    mass left out is below ``mass_tolerance`` at every ``t <= t_max``.
    ``tolerance`` bounds the distance from one of the discretized variance at
    ``t = 1`` and its change when the step is doubled.

    ``1 / step`` must be an integer, and an even one for grids that are
    coarsened by the resolution check.
    """

    def __init__(self,
                 step: float = 1.0 / 128,
                 horizon: float = 32.0,
                 tolerance: float = 0.05,
                 ratio: float = 1.1,
                 mass_tolerance: float = 1e-3) -> None:
        check_positive(step, "step")
        check_positive(horizon, "horizon")
        check_positive(tolerance, "tolerance")
        if ratio <= 1.0:
            raise DomainError(f"far cells grow by ratio > 1, got {ratio}")
        if not 0.0 < mass_tolerance < 1.0:
            raise DomainError(f"mass_tolerance must lie in (0, 1), got {mass_tolerance}")
        per_unit = 1.0 / step
        if abs(per_unit - round(per_unit)) > 1e-9:
            raise DomainError(f"1/step must be an integer, got step={step}")
        if abs(horizon * per_unit - round(horizon * per_unit)) > 1e-6:
            raise DomainError(f"horizon {horizon} is not a multiple of step {step}")
        self.step = 1.0 / round(per_unit)
        self.horizon = float(horizon)
        self.tolerance = float(tolerance)
        self.ratio = float(ratio)
        self.mass_tolerance = float(mass_tolerance)

    @property
    def per_unit(self) -> int:
        return int(round(1.0 / self.step))

    @property
    def left_cells(self) -> int:
        return int(round(self.horizon * self.per_unit))

    def cells(self, t_max: int) -> int:
        return self.left_cells + t_max * self.per_unit

    def coarsened(self) -> "GridSpec":
        if self.per_unit % 2:
            raise DomainError(f"a grid with 1/step = {self.per_unit} cannot be coarsened by two")
        return GridSpec(2.0 * self.step, self.horizon, self.tolerance, self.ratio, self.mass_tolerance)

    def key(self) -> Tuple[float, float, float, float]:
        return self.step, self.horizon, self.ratio, self.mass_tolerance


def _grid_from_key(key: Tuple[float, float, float, float]) -> GridSpec:
    step, horizon, ratio, mass_tolerance = key
    return GridSpec(step=step, horizon=horizon, ratio=ratio, mass_tolerance=mass_tolerance)


def _cell_average(L: np.ndarray, exponent: float, step: float) -> np.ndarray:
    """Average of ``(u - y)_+^exponent`` over the cell lying ``L - 1`` to ``L`` steps behind ``u``."""
    L = np.asarray(L, dtype=float)
    e1 = exponent + 1.0
    return step ** exponent * (np.maximum(L, 0.0) ** e1 - np.maximum(L - 1.0, 0.0) ** e1) / e1


def _fbm_kernel(L: np.ndarray, H: float, step: float) -> np.ndarray:
    return _cell_average(L, H - 0.5, step) / (H - 0.5)


def _rosenblatt_kernel(L: np.ndarray, H: float, step: float) -> np.ndarray:
    return _cell_average(L, kernel_exponent(2, H), step)


def _fbm_increment(H: float, t: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``((t + z)^e - z^e) / e`` with ``e = H - 1/2``, without cancellation for ``z >> t``."""
    e = H - 0.5
    return z ** e * np.expm1(e * np.log1p(t / z)) / e


def _rosenblatt_power(H: float, t: np.ndarray, z: np.ndarray) -> np.ndarray:
    return (t + z) ** kernel_exponent(2, H)


def _tail_bound(kind: str, H: float) -> Tuple[float, float]:
    """``(C, kappa)`` such that ``y < -M`` carries at most ``C M^-kappa`` of the kernel mass at ``t = 1``."""
    if kind == FBM:
        kappa = 2.0 - 2.0 * H
        return 1.0 / (kappa * kernel_norm_squared(1, H)), kappa
    # (u - y)^a <= |y|^a on [0, 1] and the beta identity for the remaining pair of factors
    a = kernel_exponent(2, H)
    kappa = 1.0 - H
    return 4.0 * (2.0 * H - 1.0) / (beta(a + 1.0, -1.0 - 2.0 * a) * (H + 1.0) * kappa), kappa


def truncated_mass(kind: str, H: float, cut: float) -> float:
    """Upper bound on the share of the kernel mass at ``t = 1`` that lies behind ``-cut``."""
    constant, kappa = _tail_bound(kind, H)
    return constant * cut ** -kappa


def _log_cut(kind: str, H: float, mass_tolerance: float) -> float:
    constant, kappa = _tail_bound(kind, H)
    return math.log(constant / mass_tolerance) / kappa


def _far_edges(grid: GridSpec, log_cut: float) -> np.ndarray:
    """Distances ``horizon ratio^k`` behind 0 of the far cell ends, reaching ``exp(log_cut)``."""
    count = max(0, math.ceil((log_cut - math.log(grid.horizon)) / math.log(grid.ratio)))
    if count > MAX_FAR_CELLS or log_cut + math.log(grid.ratio) > MAX_LOG_CUT:
        raise GridTooCoarseError(f"the kernel mass behind exp({log_cut:.4g}) is needed to reach "
                                 f"mass_tolerance {grid.mass_tolerance}; {count} far cells exceed the limit "
                                 f"of {MAX_FAR_CELLS}")
    return grid.horizon * grid.ratio ** np.arange(count + 1)


def _far_matrix(kernel: Callable, times: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """
    ``(len(times), cells)`` matrix: ``sqrt(width)`` times the average of
    ``kernel(t, z)`` over each far cell, with Gauss nodes in ``log z``.
    """
    nodes, weights = graded_rule(FAR_NODES, 1)
    log_edges = np.log(edges)
    spans = np.diff(log_edges)
    z = np.exp(log_edges[:-1, None] + spans[:, None] * nodes)
    dz = z * spans[:, None] * weights
    values = kernel(np.asarray(times, dtype=float)[:, None, None], z[None])
    return (values * dz).sum(axis=-1) / np.sqrt(np.diff(edges))


class _FarField(NamedTuple):
    fbm: np.ndarray
    rosenblatt: np.ndarray
    square: np.ndarray
    cross: np.ndarray


@lru_cache(maxsize=4)
def _far_field(H1: float, H2: float, N: int, key: Tuple[float, float, float, float]) -> _FarField:
    """Far cell weights at ``t = 0..N``; the cut scales with ``N`` so the bound holds up to ``t = N``."""
    grid = _grid_from_key(key)
    log_cut = math.log(N) + max(_log_cut(FBM, H1, grid.mass_tolerance),
                                _log_cut(ROSENBLATT, H2, grid.mass_tolerance))
    edges = _far_edges(grid, log_cut)
    times = np.arange(N + 1)
    fbm = _far_matrix(partial(_fbm_increment, H1), times, edges)
    rosenblatt = _far_matrix(partial(_rosenblatt_power, H2), times, edges)
    logger.info("far field for N=%d: %d cells out to %.4g", N, len(edges) - 1, edges[-1])
    return _FarField(fbm, rosenblatt, (rosenblatt * rosenblatt).sum(axis=1),
                     (rosenblatt[:-1] * rosenblatt[1:]).sum(axis=1))


def _fbm_raw_variance(H: float, grid: GridSpec, far: np.ndarray) -> float:
    """Exact variance at ``t = 1`` of the discretized fBm before calibration."""
    n_left, n_unit = grid.left_cells, grid.per_unit
    cells = np.arange(n_left + n_unit)
    weights = _fbm_kernel(n_left + n_unit - cells, H, grid.step) - _fbm_kernel(n_left - cells, H, grid.step)
    near = grid.step * math.fsum(weights * weights)
    return norm_constant(1, H) ** 2 * (near + math.fsum(far[1] * far[1]))


def _rosenblatt_raw_variance(H: float, grid: GridSpec, far: np.ndarray) -> float:
    """
    Exact variance at ``t = 1`` of the discretized Rosenblatt process.

    ``Z_1 = c (xi' G' D G xi - tr G' D G)`` with ``xi`` the normalized cell
    increments, ``G[r, j]`` the cell averages of the kernel at time node ``r``
    and ``D`` the node weights; the variance is ``2 c^2 |D^1/2 G G' D^1/2|_F^2``.
    """
    n_left, n_unit = grid.left_cells, grid.per_unit
    nodes, weights = graded_rule(TIME_NODES, TIME_GRADE)
    cells = np.arange(n_left + n_unit)
    within = np.arange(n_unit)
    lags = (n_left + within)[:, None] - cells[None, :]
    blocks, row_weights = [], []
    for s, w in zip(nodes, weights):
        lam = ((within + s) / n_unit)[:, None]
        near = _rosenblatt_kernel(lags + s, H, grid.step) * math.sqrt(grid.step)
        blocks.append(np.hstack([near, (1.0 - lam) * far[0] + lam * far[1]]))
        row_weights.append(np.full(n_unit, grid.step * w))
    G = np.vstack(blocks)
    root = np.sqrt(np.concatenate(row_weights))
    A = root[:, None] * (G @ G.T) * root[None, :]
    return norm_constant(2, H) ** 2 * 2.0 * float(np.sum(A * A))


@lru_cache(maxsize=64)
def _raw_variance(kind: str, H: float, key: Tuple[float, float, float, float]) -> Tuple[float, int, float]:
    """Variance at ``t = 1`` before calibration, far cell count and truncated mass bound."""
    grid = _grid_from_key(key)
    edges = _far_edges(grid, _log_cut(kind, H, grid.mass_tolerance))
    times = np.array([0.0, 1.0])
    if kind == FBM:
        variance = _fbm_raw_variance(H, grid, _far_matrix(partial(_fbm_increment, H), times, edges))
    else:
        variance = _rosenblatt_raw_variance(H, grid, _far_matrix(partial(_rosenblatt_power, H), times, edges))
    return variance, len(edges) - 1, truncated_mass(kind, H, edges[-1])


def grid_diagnostics(kind: str, H: float, grid: GridSpec) -> Dict[str, Any]:
    """Raw variance at ``t = 1`` on ``grid`` and on the grid with twice the step."""
    if kind not in (FBM, ROSENBLATT):
        raise DomainError(f"kind must be {FBM!r} or {ROSENBLATT!r}, got {kind!r}")
    raw, far_cells, mass = _raw_variance(kind, H, grid.key())
    coarse, _, _ = _raw_variance(kind, H, grid.coarsened().key())
    return {"kind": kind, "H": H, "raw_variance": raw, "coarse_variance": coarse,
            "resolution_change": abs(raw - coarse) / raw, "far_cells": far_cells, "truncated_mass": mass}


@lru_cache(maxsize=64)
def _calibration(kind: str, H: float, key: Tuple[float, float, float, float], tolerance: float) -> float:
    step, horizon = key[:2]
    raw, far_cells, mass = _raw_variance(kind, H, key)
    deficit = abs(raw - 1.0)
    if deficit > tolerance:
        raise GridTooCoarseError(
                f"{kind} variance at t=1 is {raw:.4f} on step {step}, horizon {horizon} (H={H}), "
                f"{deficit:.1%} away from 1; refine the grid")
    report = grid_diagnostics(kind, H, _grid_from_key(key))
    if report["resolution_change"] > tolerance:
        raise GridTooCoarseError(
                f"{kind} variance at t=1 moves by {report['resolution_change']:.1%} between steps "
                f"{2 * step} and {step} (H={H}); refine the grid")
    logger.info("%s H=%g on step %g, horizon %g: raw variance at t=1 %.6f, resolution change %.3g, "
                "%d far cells, truncated mass below %.2g", kind, H, step, horizon, raw,
                report["resolution_change"], far_cells, mass)
    return 1.0 / math.sqrt(raw)


def simulate_pair_kernel(H1: float, H2: float, N: int, grid: Optional[GridSpec] = None,
                         seed: int = 0, stream: Stream = ()) -> PathPair:
    """
    ``q = 1`` dependent pair at arbitrary ``(H1, H2)`` driven by one set of Brownian increments.

    With ``dB_j`` the increments on the cells and ``f``, ``g`` the exact cell
    averages of ``(u - y)^{H1 - 1/2} / (H1 - 1/2)`` and ``(u - y)^{a2}``:

    * ``Z1(t) = F(t) - F(0)`` with ``F(u) = sum_j f(u - y_j) dB_j``;
    * ``Z2(t) = int_0^t (W_u^2 - E W_u^2) du`` with ``W_u = sum_j g(u - y_j) dB_j``.

    ``Z2`` is the double sum over cell pairs of the cell-averaged kernel, its
    diagonal cells Wick ordered. The time integral uses graded nodes inside
    every cell, where ``W`` has a ``(u - y_j)^{a2 + 1}`` cusp. Far cells enter
    ``W`` through linear interpolation between integer times. Near-cell sums are
    FFT convolutions; each component is scaled to unit variance at ``t = 1``
    by the exact variance of its discretization.
    """
    check_hurst(H1, "H1")
    check_hurst(H2, "H2")
    _check_length(N)
    grid = grid or GridSpec()
    scale1 = _calibration(FBM, H1, grid.key(), grid.tolerance)
    scale2 = _calibration(ROSENBLATT, H2, grid.key(), grid.tolerance)
    far = _far_field(H1, H2, N, grid.key())

    rng = seed_stream(seed, *stream)
    n_cells = grid.cells(N)
    n_left, n_unit = grid.left_cells, grid.per_unit
    dB = rng.standard_normal(n_cells) * math.sqrt(grid.step)
    xi = rng.standard_normal(far.fbm.shape[1])
    lags = np.arange(n_cells, dtype=float)

    # F at u_m = -horizon + m step is entry m of the full convolution
    F = signal.fftconvolve(dB, _fbm_kernel(lags, H1, grid.step))
    on_integers = n_left + n_unit * np.arange(N + 1)
    values1 = norm_constant(1, H1) * scale1 * (F[on_integers] - F[n_left] + far.fbm @ xi)

    W_far = far.rosenblatt @ xi
    unit, within = np.divmod(np.arange(N * n_unit), n_unit)
    window = slice(n_left, n_cells)
    nodes, weights = graded_rule(TIME_NODES, TIME_GRADE)
    integrand = np.zeros(N * n_unit)
    for s, w in zip(nodes, weights):
        g = _rosenblatt_kernel(lags + s, H2, grid.step)
        lam = (within + s) / n_unit
        W = signal.fftconvolve(dB, g)[window] + (1.0 - lam) * W_far[unit] + lam * W_far[unit + 1]
        mean = grid.step * np.cumsum(g * g)[window] + (1.0 - lam) ** 2 * far.square[unit] \
            + 2.0 * lam * (1.0 - lam) * far.cross[unit] + lam ** 2 * far.square[unit + 1]
        integrand += w * (W * W - mean)
    cumulative = np.cumsum(integrand)[n_unit - 1::n_unit]
    values2 = norm_constant(2, H2) * scale2 * grid.step * np.concatenate([[0.0], cumulative])

    meta = {"generator": KERNEL_GRID, "step": grid.step, "horizon": grid.horizon}
    times = _unit_times(N)
    return PathPair(SamplePath(times, values1, dict(meta, order=1, H=H1)),
                    SamplePath(times, values2, dict(meta, order=2, H=H2)),
                    KERNEL_GRID, H1, H2)


def rescale_selfsimilar(pair: PathPair, gamma: float, H1: float, H2: float) -> PathPair:
    """Unit-spacing pair to spacing ``gamma``: values times ``gamma^{H1}``, ``gamma^{H2}``."""
    check_positive(gamma, "gamma")
    return PathPair(pair.component1.scaled(gamma, H1), pair.component2.scaled(gamma, H2),
                    pair.coupling, H1, H2)


class PairGenerator(Registrable):
    """Draws a unit-spacing :class:`PathPair` for a :class:`PairSpec`."""
    default_implementation = SUBORDINATED
    coupling: str = None

    def generate(self, spec: PairSpec, N: int, seed: int, stream: Stream = ()) -> PathPair:
        raise NotImplementedError

    def check(self, spec: PairSpec) -> None:
        if spec.coupling != self.coupling:
            raise DomainError(f"{type(self).__name__} cannot simulate coupling {spec.coupling!r}")

    @classmethod
    def for_spec(cls, spec: PairSpec) -> "PairGenerator":
        if spec.coupling is None:
            raise ConfigurationError(f"no coupling can simulate {spec!r}: dependent pairs with q >= 2 "
                                     f"need H2 = 1 - (q+1)(1-H1)/q")
        return cls.by_name(spec.coupling)()


@PairGenerator.register(SUBORDINATED)
class SubordinatedGenerator(PairGenerator):
    coupling = SUBORDINATED

    def __init__(self, n_inner: int = DEFAULT_INNER) -> None:
        _check_inner(n_inner)
        self.n_inner = n_inner

    @overrides
    def generate(self, spec: PairSpec, N: int, seed: int, stream: Stream = ()) -> PathPair:
        self.check(spec)
        return simulate_pair_subordinated(spec.q, spec.H1, N, self.n_inner, seed, stream)


@PairGenerator.register(KERNEL_GRID)
class KernelGridGenerator(PairGenerator):
    coupling = KERNEL_GRID

    def __init__(self, grid: GridSpec = None) -> None:
        self.grid = grid or GridSpec()

    @overrides
    def generate(self, spec: PairSpec, N: int, seed: int, stream: Stream = ()) -> PathPair:
        self.check(spec)
        return simulate_pair_kernel(spec.H1, spec.H2, N, self.grid, seed, stream)


@PairGenerator.register(INDEPENDENT_DRIVERS)
class IndependentDriversGenerator(PairGenerator):
    coupling = INDEPENDENT_DRIVERS

    def __init__(self, n_inner: int = DEFAULT_INNER) -> None:
        _check_inner(n_inner)
        self.n_inner = n_inner

    @overrides
    def generate(self, spec: PairSpec, N: int, seed: int, stream: Stream = ()) -> PathPair:
        self.check(spec)
        return simulate_pair_independent(spec.q, spec.H1, spec.H2, N, 1.0, self.n_inner, seed, stream)


def write_paths(pair: PathPair, stream: TextIO, header: bool = True) -> None:
    """CSV rows ``t,z1,z2``."""
    writer = csv.writer(stream)
    if header:
        writer.writerow(["t", "z1", "z2"])
    for t, z1, z2 in zip(pair.times, pair.component1.values, pair.component2.values):
        writer.writerow([repr(float(t)), repr(float(z1)), repr(float(z2))])
