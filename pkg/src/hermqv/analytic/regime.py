"""
Exponent arithmetic and the regime classifier.

With ``gamma_N = c N^rho`` every comparison between the three terms of
``V_N = V1 + V2 + 2 V3`` reduces to comparing ``rho (H2 - H1)`` with the
thresholds ``nu1 < nu2``; the classifier below does exactly that and reports
which term carries the fluctuations and with which limit law.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.hermqv.checks import DomainError, UnsupportedScheduleError, check_hurst, check_order
from src.hermqv.specs import DEPENDENCE_MODES, DEPENDENT, INDEPENDENT, PairSpec, ScaleSchedule

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12

V1 = "V1"
V2 = "V2"
V3 = "V3"
BOUNDARY = "boundary"
TERMS = [V1, V2, V3]

GAUSSIAN = "Gaussian"
ROSENBLATT = "Rosenblatt"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Exponents:
    h1: float
    delta: int
    nu1: float
    nu2: float
    H1_star: float

    def to_dict(self) -> Dict[str, Any]:
        return {"h1": self.h1, "delta": self.delta, "nu1": self.nu1,
                "nu2": self.nu2, "H1_star": self.H1_star}


@dataclass(frozen=True)
class Rate:
    """``sd ~ gamma^exponent_gamma N^exponent_N (log N)^(log_half_power / 2)``."""
    exponent_N: float
    exponent_gamma: float
    log_half_power: int = 0

    def folded(self, rho: float) -> float:
        """Exponent of N once ``gamma_N = c N^rho`` is substituted."""
        return self.exponent_N + rho * self.exponent_gamma

    def to_dict(self) -> Dict[str, Any]:
        return {"exponent_N": self.exponent_N, "exponent_gamma": self.exponent_gamma,
                "log_half_power": self.log_half_power}


@dataclass(frozen=True)
class LimitLaw:
    family: str
    index: Optional[float] = None

    @property
    def gaussian(self) -> bool:
        return self.family == GAUSSIAN

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "index": self.index}

    def __str__(self) -> str:
        if self.index is None:
            return self.family
        return f"{self.family}({self.index:g})"


@dataclass(frozen=True)
class RegimeReport:
    q: int
    H1: float
    H2: float
    dependence: str
    rho: float
    exponents: Exponents
    dominant: str
    limit_law: LimitLaw
    rate: Rate
    term_rates: Dict[str, Rate] = field(default_factory=dict)
    term_laws: Dict[str, LimitLaw] = field(default_factory=dict)

    @property
    def nu1(self) -> float:
        return self.exponents.nu1

    @property
    def nu2(self) -> float:
        return self.exponents.nu2

    @property
    def delta(self) -> int:
        return self.exponents.delta

    @property
    def h1(self) -> float:
        return self.exponents.h1

    @property
    def is_boundary(self) -> bool:
        return self.dominant == BOUNDARY

    def predicted_slope(self, statistic: str = "V") -> float:
        """Slope of log sd against log N for ``statistic`` in {V, V1, V2, V3}."""
        if statistic == "V":
            return self.rate.folded(self.rho)
        if statistic not in self.term_rates:
            raise DomainError(f"unknown statistic {statistic!r}")
        return self.term_rates[statistic].folded(self.rho)

    def predicted_law(self, statistic: str = "V") -> LimitLaw:
        if statistic == "V":
            return self.limit_law
        if statistic not in self.term_laws:
            raise DomainError(f"unknown statistic {statistic!r}")
        return self.term_laws[statistic]

    def to_dict(self) -> Dict[str, Any]:
        payload = {
                "q": self.q,
                "H1": self.H1,
                "H2": self.H2,
                "dependence": self.dependence,
                "rho": self.rho,
                "dominant": self.dominant,
                "limit_law": self.limit_law.to_dict(),
                "rate": self.rate.to_dict(),
                "term_rates": {name: rate.to_dict() for name, rate in self.term_rates.items()},
        }
        payload.update(self.exponents.to_dict())
        return payload


def exponents(q: int, H1: float, H2: float) -> Exponents:
    check_order(q)
    check_hurst(H1, "H1")
    check_hurst(H2, "H2")
    h1 = max(0.5, 1.0 - 2.0 * (1.0 - H1) / q)
    delta = 1 if q == 1 and math.isclose(H1, 0.75, rel_tol=0.0, abs_tol=TIE_TOL) else 0
    nu2 = (1.0 - H2) / (1.0 + q)
    nu1 = nu2 - 1.0 + h1
    H1_star = (1.0 - H1) / q + (1.0 - H2) / (q + 1)
    assert nu1 < nu2, (q, H1, H2)
    return Exponents(h1=h1, delta=delta, nu1=nu1, nu2=nu2, H1_star=H1_star)


def alpha_k(q: int, k: int, H1: float, H2: float) -> float:
    """Power of ``|i - j|`` decay in the k-th chaos term of V3."""
    check_order(q)
    check_hurst(H1, "H1")
    check_hurst(H2, "H2")
    if not (isinstance(k, (int, np.integer)) and 0 <= k <= q):
        raise DomainError(f"k must be an integer in [0, {q}], got {k}")
    return 2.0 * (q - k) * (1.0 - H1) / q + 2.0 * (q + 1 - k) * (1.0 - H2) / (q + 1)


def limit_law_v1(q: int, H1: float) -> LimitLaw:
    check_order(q)
    check_hurst(H1, "H1")
    if q == 1 and H1 <= 0.75 + TIE_TOL:
        return LimitLaw(GAUSSIAN)
    return LimitLaw(ROSENBLATT, 1.0 - 2.0 * (1.0 - H1) / q)


def limit_law_v2(q: int, H2: float) -> LimitLaw:
    return LimitLaw(ROSENBLATT, 1.0 - 2.0 * (1.0 - H2) / (q + 1))


def _term_rates(q: int, H1: float, H2: float, dependence: str, ex: Exponents) -> Dict[str, Rate]:
    """
    Standard deviation rates of the three terms.

    For independent components ``E[V3^2] = sum_{i,j<N} r1(i-j) r2(i-j)``, the
    increment covariances multiplied, and ``r1(k) r2(k) ~ H1(2H1-1) H2(2H2-1) k^{2H1+2H2-4}``.
    ``sum_{i,j<N} c(i-j) = N sum_{|k|<N} (1 - |k|/N) c(k)`` is then of order ``N``
    when ``2H1 + 2H2 - 4 < -1``, ``N log N`` at ``H1 + H2 = 3/2`` and
    ``N^{2H1+2H2-2}`` above. The standard deviation grows like
    ``N^{max(1/2, H1+H2-1)}``, with an extra ``(log N)^{1/2}`` at the tie.
    """
    rates = {
            V1: Rate(ex.h1, 2.0 * H1, ex.delta),
            V2: Rate(1.0 - 2.0 * (1.0 - H2) / (q + 1), 2.0 * H2, 0),
    }
    if dependence == DEPENDENT:
        rates[V3] = Rate(1.0 - (1.0 - H2) / (q + 1), H1 + H2, 0)
    else:
        total = H1 + H2
        log_flag = 1 if math.isclose(total, 1.5, rel_tol=0.0, abs_tol=TIE_TOL) else 0
        rates[V3] = Rate(max(0.5, total - 1.0), total, log_flag)
    return rates


def _term_laws(q: int, H1: float, H2: float, dependence: str) -> Dict[str, LimitLaw]:
    laws = {V1: limit_law_v1(q, H1), V2: limit_law_v2(q, H2)}
    laws[V3] = LimitLaw(GAUSSIAN) if dependence == DEPENDENT else LimitLaw(INDETERMINATE)
    return laws


def _compare(x: float, threshold: float) -> int:
    if math.isclose(x, threshold, rel_tol=0.0, abs_tol=TIE_TOL):
        return 0
    return -1 if x < threshold else 1


def classify_regime(spec: PairSpec, schedule: ScaleSchedule) -> RegimeReport:
    """
    Dominant term, limit law and rate of ``V_N`` for a power-law schedule.

    Only the exponent ``rho`` of the schedule matters, never its constant.
    """
    rho = schedule.exponent
    if rho is None:
        raise UnsupportedScheduleError(
                f"schedule {type(schedule).__name__} is not a power law; regimes are undecidable")
    q, H1, H2 = spec.q, spec.H1, spec.H2
    ex = exponents(q, H1, H2)
    rates = _term_rates(q, H1, H2, spec.dependence, ex)
    laws = _term_laws(q, H1, H2, spec.dependence)

    if spec.dependence == DEPENDENT:
        x = rho * (H2 - H1)
        low = _compare(x, ex.nu1)
        high = _compare(x, ex.nu2)
        if low < 0 or (low == 0 and ex.delta == 1):
            dominant, tied = V1, None
        elif low == 0:
            dominant, tied = BOUNDARY, V3
        elif high < 0:
            dominant, tied = V3, None
        elif high == 0:
            dominant, tied = BOUNDARY, V2
        else:
            dominant, tied = V2, None
    else:
        x = 2.0 * rho * (H2 - H1)
        side = _compare(x, ex.nu1 + ex.nu2)
        if side < 0 or (side == 0 and ex.delta == 1):
            dominant, tied = V1, None
        elif side == 0:
            dominant, tied = BOUNDARY, V2
        else:
            dominant, tied = V2, None

    if dominant == BOUNDARY:
        # tied terms share the folded slope
        rate, law = rates[tied], LimitLaw(INDETERMINATE)
    else:
        rate, law = rates[dominant], laws[dominant]
    logger.debug("classified q=%d H1=%g H2=%g %s rho=%g: %s, %s",
                 q, H1, H2, spec.dependence, rho, dominant, law)
    return RegimeReport(q=q, H1=H1, H2=H2, dependence=spec.dependence, rho=float(rho),
                        exponents=ex, dominant=dominant, limit_law=law, rate=rate,
                        term_rates=rates, term_laws=laws)


def _check_mode(mode: str) -> None:
    if mode not in DEPENDENCE_MODES:
        raise DomainError(f"mode must be one of {DEPENDENCE_MODES}, got {mode!r}")


def _boundary_value(q: int, mode: str, H1: float) -> float:
    factor = 2.0 if mode == DEPENDENT else 1.0
    return 1.0 - factor * (q + 1) * (1.0 - H1) / q


def boundary_curve(q: int, mode: str, H1: float) -> Optional[float]:
    """
    ``H2`` on the curve ``nu1 = 0`` (dependent) or ``nu1 + nu2 = 0`` (independent),
    or ``None`` when that value leaves (1/2, 1).
    """
    check_order(q)
    _check_mode(mode)
    check_hurst(H1, "H1")
    H2 = _boundary_value(q, mode, H1)
    if not 0.5 < H2 < 1.0:
        return None
    return H2


def boundary_endpoint(q: int, mode: str) -> float:
    """``H1`` where the boundary curve meets ``H2 = 1/2``."""
    check_order(q)
    _check_mode(mode)
    if mode == DEPENDENT:
        return 1.0 - q / (4.0 * (q + 1))
    return 1.0 - q / (2.0 * (q + 1))


def boundary_table(q: int, mode: str, points: int) -> List[Dict[str, Any]]:
    """
    ``points`` rows ``H1, H2, q, mode`` from the endpoint on ``H2 = 1/2`` up to ``(1, 1)``.

    Both ends of the closed segment are included so the rows plot directly.
    """
    if points < 2:
        raise DomainError(f"points must be >= 2, got {points}")
    start = boundary_endpoint(q, mode)
    rows = []
    for H1 in np.linspace(start, 1.0, points):
        rows.append({"H1": float(H1), "H2": _boundary_value(q, mode, float(H1)), "q": q, "mode": mode})
    rows[0]["H2"] = 0.5
    rows[-1]["H2"] = 1.0
    return rows


__all__ = [
    "Exponents", "Rate", "LimitLaw", "RegimeReport",
    "exponents", "alpha_k", "limit_law_v1", "limit_law_v2", "classify_regime",
    "boundary_curve", "boundary_endpoint", "boundary_table",
    "V1", "V2", "V3", "BOUNDARY", "TERMS", "GAUSSIAN", "ROSENBLATT", "INDETERMINATE",
    "DEPENDENT", "INDEPENDENT",
]
