"""
Gauss rules for integrands whose only singularities sit at panel endpoints.

Every rule here starts from Gauss-Legendre nodes on [0, 1] and pushes them
towards both ends of each panel with the sigmoidal map

    phi(t) = t^p / (t^p + (1 - t)^p),

so that an endpoint behaviour like ``(x - a)^(-s)`` turns into
``t^(p(1-s) - 1)``, which Gauss quadrature handles well once ``p(1 - s) >= 1``.
Panels are cut at caller supplied breakpoints, which may differ for every
outer node, so nested integrals over moving singular sets can be evaluated
with plain array arithmetic.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.hermqv.checks import QuadratureConvergenceError

logger = logging.getLogger(__name__)

MAX_GRADE = 6


@lru_cache(maxsize=64)
def graded_rule(n: int, grade: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights of an ``n`` point rule on [0, 1], graded towards both ends.

    ``grade=1`` gives plain Gauss-Legendre. The returned arrays are read-only.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    if grade < 1:
        raise ValueError(f"grade must be >= 1, got {grade}")
    t, w = leggauss(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    if grade > 1:
        tp = t ** grade
        sp = (1.0 - t) ** grade
        denom = tp + sp
        nodes = tp / denom
        jacobian = grade * (t * (1.0 - t)) ** (grade - 1) / denom ** 2
        t, w = nodes, w * jacobian
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def grade_for(exponent: float) -> int:
    """Smallest grading power that makes ``x^(-exponent)`` bounded after the map."""
    if exponent <= 0:
        return 3
    if exponent >= 1:
        return MAX_GRADE
    return int(min(MAX_GRADE, max(3, math.ceil(1.5 / (1.0 - exponent)))))


def composite_rule(lower, upper, breakpoints, n: int,
                   grade: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite graded rule on ``[lower, upper]`` cut at ``breakpoints``.

    Parameters
    ----------
    lower, upper : array_like
        Interval ends, broadcastable to a common batch shape ``S``.
    breakpoints : array_like
        Shape ``S + (k,)``. Values outside the interval are clipped onto its
        ends, which produces zero width panels with zero weight.
    n : int
        Nodes per panel.
    grade : int
        Grading power of :func:`graded_rule`.

    Returns
    -------
    nodes, weights : np.ndarray
        Both of shape ``S + (n * (k + 1),)``.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    breakpoints = np.asarray(breakpoints, dtype=float)
    if breakpoints.ndim == 0:
        breakpoints = breakpoints.reshape(1)
    shape = np.broadcast_shapes(lower.shape, upper.shape, breakpoints.shape[:-1])
    lower = np.broadcast_to(lower, shape)
    upper = np.broadcast_to(upper, shape)
    breakpoints = np.broadcast_to(breakpoints, shape + breakpoints.shape[-1:])

    inner = np.sort(np.clip(breakpoints, lower[..., None], upper[..., None]), axis=-1)
    edges = np.concatenate([lower[..., None], inner, upper[..., None]], axis=-1)
    widths = np.diff(edges, axis=-1)

    t, w = graded_rule(n, grade)
    nodes = edges[..., :-1, None] + widths[..., None] * t
    weights = widths[..., None] * w
    return nodes.reshape(shape + (-1,)), weights.reshape(shape + (-1,))


def weighted_sum(values: np.ndarray, weights: np.ndarray, axis=None):
    """
    Sum of ``values * weights`` that ignores zero weight nodes and non-finite values.

    Graded nodes can land exactly on a singular endpoint in floating point;
    those nodes carry weights far below rounding level of the total.
    """
    with np.errstate(invalid="ignore", over="ignore"):
        terms = np.where((weights > 0) & np.isfinite(values), values * weights, 0.0)
    return terms.sum(axis=axis)


def refine_until_stable(evaluate: Callable[[int], float],
                        n_start: int,
                        rtol: float,
                        max_doublings: int = 3,
                        label: str = "integral") -> float:
    """
    Evaluate ``evaluate(n)`` for n = n_start, 2 n_start, ... until two consecutive
    values agree to ``rtol``; returns the finer value.
    """
    previous = evaluate(n_start)
    n = n_start
    for _ in range(max_doublings):
        n *= 2
        current = evaluate(n)
        scale = max(abs(current), abs(previous))
        change = abs(current - previous) / scale if scale > 0 else 0.0
        logger.debug("%s: n=%d value=%.12g relative change=%.3g", label, n, current, change)
        if change < rtol:
            return current
        previous = current
    raise QuadratureConvergenceError(
            f"{label} did not stabilise to relative tolerance {rtol} "
            f"after {max_doublings} doublings (last relative change {change:.3g} at n={n})")
