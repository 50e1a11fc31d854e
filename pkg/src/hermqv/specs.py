"""
The objects every experiment is parameterized by: the pair model and the
interspacing schedule, plus JSON load/save helpers for configs and reports.
"""
import json
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import jsonschema
from allennlp.common import Params, Registrable
from allennlp.common.checks import ConfigurationError
from overrides import overrides
from referencing import Registry, Resource

from src.hermqv.checks import DomainError, check_hurst, check_order

logger = logging.getLogger(__name__)

DEPENDENT = "dependent"
INDEPENDENT = "independent"
DEPENDENCE_MODES = [DEPENDENT, INDEPENDENT]

SUBORDINATED = "subordinated"
KERNEL_GRID = "kernel-grid"
INDEPENDENT_DRIVERS = "independent-drivers"
COUPLINGS = [SUBORDINATED, KERNEL_GRID, INDEPENDENT_DRIVERS]

CONSTRAINT_TOL = 1e-12

SCHEMA_DIR = Path(__file__).resolve().parents[2] / "schemas"
MC_REPORT_SCHEMA = "mc_report.json"
REGIME_REPORT_SCHEMA = "regime_report.json"
ORACLE_REPORT_SCHEMA = "oracle_report.json"


def load_json(path: str) -> Dict[str, Any]:
    with open(path) as json_file:
        return json.load(json_file)


def save_json(payload: Dict[str, Any], path: str) -> None:
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


@lru_cache(maxsize=1)
def _schema_registry() -> Registry:
    resources = [(path.name, Resource.from_contents(load_json(str(path))))
                 for path in sorted(SCHEMA_DIR.glob("*.json"))]
    return Registry().with_resources(resources)


def validate_report(payload: Dict[str, Any], schema_name: str) -> None:
    """
    Checks a JSON report against ``schemas/<schema_name>``; references between
    the shipped schemas resolve by file name.
    Raises ``jsonschema.ValidationError`` on the first mismatch.
    """
    registry = _schema_registry()
    jsonschema.validate(payload, registry.contents(schema_name), registry=registry)


def constraint_line(q: int, H1: float) -> float:
    """``1 - (q+1)(1-H1)/q``: the index of ``H_{q+1}`` partial sums when ``H_q`` sums have index H1."""
    return 1.0 - (q + 1) * (1.0 - H1) / q


def default_coupling(q: int, H1: float, H2: float, dependence: str) -> Optional[str]:
    """
    The coupling able to simulate the model, or ``None`` when none is (dependent,
    ``q >= 2`` and off the constraint line); such specs are for analysis only.
    """
    if dependence == INDEPENDENT:
        return INDEPENDENT_DRIVERS
    if q == 1:
        return KERNEL_GRID
    if abs(H2 - constraint_line(q, H1)) <= CONSTRAINT_TOL:
        return SUBORDINATED
    return None


class PairSpec:
    """
    Model of ``Z = Z^{H1,q} + Z^{H2,q+1}``: orders, indices, whether the two
    components share their Brownian motion, and how pairs are simulated.
    """

    def __init__(self,
                 q: int,
                 H1: float,
                 H2: float,
                 dependence: str = DEPENDENT,
                 coupling: Optional[str] = None) -> None:
        check_order(q)
        check_hurst(H1, "H1")
        check_hurst(H2, "H2")
        if dependence not in DEPENDENCE_MODES:
            raise ConfigurationError(f"dependence must be one of {DEPENDENCE_MODES}, got {dependence!r}")
        if coupling is None:
            coupling = default_coupling(q, H1, H2, dependence)
        if coupling is not None and coupling not in COUPLINGS:
            raise ConfigurationError(f"coupling must be one of {COUPLINGS}, got {coupling!r}")

        if coupling == SUBORDINATED:
            if dependence != DEPENDENT:
                raise ConfigurationError("subordinated coupling produces dependent pairs only")
            expected = constraint_line(q, H1)
            if abs(H2 - expected) > CONSTRAINT_TOL:
                raise ConfigurationError(
                        f"subordinated coupling needs H2 = 1 - (q+1)(1-H1)/q = {expected}, got H2 = {H2}")
        elif coupling == KERNEL_GRID:
            if dependence != DEPENDENT or q != 1:
                raise ConfigurationError("kernel-grid coupling supports dependent pairs with q = 1 only")
        elif coupling == INDEPENDENT_DRIVERS and dependence != INDEPENDENT:
            raise ConfigurationError("independent-drivers coupling produces independent pairs only")

        self.q = int(q)
        self.H1 = float(H1)
        self.H2 = float(H2)
        self.dependence = dependence
        self.coupling = coupling

    @property
    def dependent(self) -> bool:
        return self.dependence == DEPENDENT

    @classmethod
    def from_params(cls, params: Params) -> "PairSpec":  # type: ignore
        q = params.pop_int("q")
        H1 = params.pop_float("H1")
        H2 = params.pop_float("H2")
        dependence = params.pop("dependence", DEPENDENT)
        coupling = params.pop("coupling", None)
        params.assert_empty(cls.__name__)
        return cls(q=q, H1=H1, H2=H2, dependence=dependence, coupling=coupling)

    def to_dict(self) -> Dict[str, Any]:
        return {"q": self.q, "H1": self.H1, "H2": self.H2,
                "dependence": self.dependence, "coupling": self.coupling}

    def with_indices(self, H1: float, H2: float) -> "PairSpec":
        """Same model with other indices; subordinated specs fall back to the default coupling."""
        coupling = self.coupling
        if coupling == SUBORDINATED and abs(H2 - constraint_line(self.q, H1)) > CONSTRAINT_TOL:
            coupling = None
        return PairSpec(self.q, H1, H2, self.dependence, coupling)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PairSpec) and self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.to_dict().items())))

    def __repr__(self) -> str:
        return (f"PairSpec(q={self.q}, H1={self.H1}, H2={self.H2}, "
                f"dependence={self.dependence!r}, coupling={self.coupling!r})")


class ScaleSchedule(Registrable):
    """
    Interspacing ``gamma_N`` between observation times.

    Power laws (including fixed spacing) carry an ``exponent`` and can be
    classified; other schedules report ``None``.
    """
    default_implementation = "fixed"
    kind: str = None

    def gamma(self, N: int) -> float:
        raise NotImplementedError

    @property
    def exponent(self) -> Optional[float]:
        return None

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


def _check_scale(c: float) -> None:
    if not (math.isfinite(c) and c > 0):
        raise DomainError(f"schedule constant c must be positive, got {c}")


def _check_n(N: int) -> None:
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")


@ScaleSchedule.register("fixed")
class FixedSchedule(ScaleSchedule):
    kind = "fixed"

    def __init__(self, c: float = 1.0) -> None:
        _check_scale(c)
        self.c = float(c)

    @overrides
    def gamma(self, N: int) -> float:
        _check_n(N)
        return self.c

    @property
    @overrides
    def exponent(self) -> Optional[float]:
        return 0.0

    @overrides
    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.kind, "c": self.c}


@ScaleSchedule.register("power")
class PowerSchedule(ScaleSchedule):
    """``gamma_N = c N^rho``; ``rho = -1`` is in-fill."""
    kind = "power"

    def __init__(self, rho: float, c: float = 1.0) -> None:
        _check_scale(c)
        if not math.isfinite(rho):
            raise DomainError(f"schedule exponent rho must be finite, got {rho}")
        self.c = float(c)
        self.rho = float(rho)

    @overrides
    def gamma(self, N: int) -> float:
        _check_n(N)
        return self.c * float(N) ** self.rho

    @property
    @overrides
    def exponent(self) -> Optional[float]:
        return self.rho

    @overrides
    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.kind, "c": self.c, "rho": self.rho}


@ScaleSchedule.register("tabulated")
class TabulatedSchedule(ScaleSchedule):
    """Explicit ``gamma_N`` for each N of an experiment."""
    kind = "tabulated"

    def __init__(self, values: Dict[str, float]) -> None:
        if not values:
            raise ConfigurationError("tabulated schedule needs at least one value")
        self.values = {int(N): float(g) for N, g in values.items()}
        for g in self.values.values():
            _check_scale(g)

    @overrides
    def gamma(self, N: int) -> float:
        _check_n(N)
        if N not in self.values:
            raise ConfigurationError(f"tabulated schedule has no value for N={N}")
        return self.values[N]

    @overrides
    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.kind, "values": {str(N): g for N, g in sorted(self.values.items())}}
