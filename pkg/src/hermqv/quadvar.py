"""
Centered quadratic variation ``V_N`` and its split ``V_N = V1 + V2 + 2 V3``.
"""
import csv
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, TextIO

import numpy as np

from src.hermqv.checks import DecompositionError, GridMismatchError, check_positive
from src.hermqv.hermpath import PathPair, SamplePath
from src.hermqv.specs import ScaleSchedule

logger = logging.getLogger(__name__)

IDENTITY_RTOL = 1e-10
DECOMPOSITION_FIELDS = ["rep", "N", "gamma", "V", "V1", "V2", "V3"]


@dataclass(frozen=True)
class QVDecomposition:
    N: int
    gamma: float
    V: float
    V1: float
    V2: float
    V3: float

    def statistic(self, name: str) -> float:
        return getattr(self, name)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def gamma_of(schedule: ScaleSchedule, N: int) -> float:
    return schedule.gamma(N)


def _spacing(times: np.ndarray) -> float:
    """The common step of ``times``, which must be ``0, gamma, 2 gamma, ...``."""
    if len(times) < 2:
        raise GridMismatchError("a path needs at least two time points")
    gamma = float(times[1] - times[0])
    expected = gamma * np.arange(len(times))
    if times[0] != 0.0 or gamma <= 0 or not np.allclose(times, expected, rtol=1e-12, atol=0.0):
        raise GridMismatchError("path times are not an arithmetic progression starting at 0")
    return gamma


def qv_centered(path: SamplePath, H: float) -> float:
    """``sum_i (Delta_i^2 - gamma^{2H})``, summed exactly rounded."""
    gamma = _spacing(path.times)
    increments = path.increments()
    return math.fsum(increments * increments) - len(increments) * gamma ** (2.0 * H)


def qv_cross(pair: PathPair) -> float:
    """``sum_i Delta1_i Delta2_i``; no centering, the mean is zero."""
    _spacing(pair.times)
    return math.fsum(pair.component1.increments() * pair.component2.increments())


def qv_decompose(pair: PathPair) -> QVDecomposition:
    gamma = _spacing(pair.times)
    d1 = pair.component1.increments()
    d2 = pair.component2.increments()
    N = len(d1)
    centre = N * (gamma ** (2.0 * pair.H1) + gamma ** (2.0 * pair.H2))
    total = d1 + d2
    V = math.fsum(total * total) - centre
    V1 = qv_centered(pair.component1, pair.H1)
    V2 = qv_centered(pair.component2, pair.H2)
    V3 = qv_cross(pair)

    scale = float(np.max(total * total, initial=0.0)) + float(np.max(d1 * d1, initial=0.0)) \
        + float(np.max(d2 * d2, initial=0.0))
    tolerance = IDENTITY_RTOL * N * max(scale, gamma ** (2.0 * min(pair.H1, pair.H2)))
    if abs(V - (V1 + V2 + 2.0 * V3)) > tolerance:
        raise DecompositionError(f"V = {V} but V1 + V2 + 2 V3 = {V1 + V2 + 2.0 * V3} (N={N})")
    return QVDecomposition(N=N, gamma=gamma, V=V, V1=V1, V2=V2, V3=V3)


def scale_decomposition(decomposition: QVDecomposition, gamma: float, H1: float, H2: float) -> QVDecomposition:
    """
    The decomposition of the same pair observed with spacing ``gamma`` times larger:
    ``(V1, V2, V3)`` scale by ``(gamma^{2H1}, gamma^{2H2}, gamma^{H1+H2})``.
    """
    check_positive(gamma, "gamma")
    V1 = decomposition.V1 * gamma ** (2.0 * H1)
    V2 = decomposition.V2 * gamma ** (2.0 * H2)
    V3 = decomposition.V3 * gamma ** (H1 + H2)
    return QVDecomposition(N=decomposition.N, gamma=decomposition.gamma * gamma,
                           V=V1 + V2 + 2.0 * V3, V1=V1, V2=V2, V3=V3)


def write_decompositions(rows: Iterable[Dict[str, Any]], stream: TextIO, header: bool = True) -> None:
    """CSV ``rep,N,gamma,V,V1,V2,V3``; each row is a decomposition dict plus ``rep``."""
    writer = csv.DictWriter(stream, fieldnames=DECOMPOSITION_FIELDS, extrasaction="ignore")
    if header:
        writer.writeheader()
    for row in rows:
        writer.writerow({key: (repr(float(value)) if isinstance(value, float) else value)
                         for key, value in row.items()})
