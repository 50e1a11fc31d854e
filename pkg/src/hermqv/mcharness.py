"""
Replication engine: simulate ``R`` pairs at every ``N`` of a grid, summarize the
chosen statistic with mergeable moment accumulators, regress ``log sd`` on
``log N`` and compare with the regime prediction.

Replication ``r`` at size ``N`` always uses the seed stream ``(seed, N, r)``.
Replications are cut into consecutive chunks of ``chunk_size`` in replication
order; each chunk is accumulated left to right and the chunk accumulators are
merged left to right, whatever the number of workers, so a report is a
function of its config alone.
"""
import csv
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, TextIO, Tuple

import numpy as np
from allennlp.common import Params
from allennlp.common.checks import ConfigurationError
from tqdm import tqdm

from src.hermqv.analytic.regime import BOUNDARY, INDETERMINATE, TERMS, RegimeReport, classify_regime
from src.hermqv.checks import DegenerateSampleError, DomainError
from src.hermqv.hermpath import PairGenerator, rescale_selfsimilar
from src.hermqv.quadvar import QVDecomposition, qv_decompose
from src.hermqv.specs import PairSpec, ScaleSchedule
from src.moments import MomentAccumulator

logger = logging.getLogger(__name__)

STATISTICS = ["V", "V1", "V2", "V3"]
MIN_REPLICATIONS = 100
MIN_GRID = 3
MIN_SHAPE_SAMPLES = 500
DEFAULT_CHUNK = 64
SLOPE_SLACK = 0.03
WIDEN_ABOVE_SE = 0.02
WORKERS_ENV = "HERMQV_NUM_WORKERS"


class ExperimentConfig:
    def __init__(self,
                 spec: PairSpec,
                 schedule: ScaleSchedule,
                 N_grid: List[int],
                 R: int,
                 seed: int = 0,
                 statistic: str = "V",
                 generator: Optional[PairGenerator] = None,
                 chunk_size: int = DEFAULT_CHUNK) -> None:
        N_grid = [int(N) for N in N_grid]
        if len(N_grid) < MIN_GRID:
            raise ConfigurationError(f"N_grid needs at least {MIN_GRID} sizes for a regression, got {N_grid}")
        if any(b <= a for a, b in zip(N_grid, N_grid[1:])) or N_grid[0] < 1:
            raise ConfigurationError(f"N_grid must be positive and strictly increasing, got {N_grid}")
        if R < MIN_REPLICATIONS:
            raise ConfigurationError(f"R must be >= {MIN_REPLICATIONS}, got {R}")
        if statistic not in STATISTICS:
            raise ConfigurationError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
        if seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {seed}")
        if chunk_size < 1:
            raise ConfigurationError(f"chunk_size must be >= 1, got {chunk_size}")
        generator = generator or PairGenerator.for_spec(spec)
        if generator.coupling != spec.coupling:
            raise ConfigurationError(f"generator {generator.coupling!r} does not match "
                                     f"the coupling {spec.coupling!r} of the model")
        self.spec = spec
        self.schedule = schedule
        self.N_grid = N_grid
        self.R = int(R)
        self.seed = int(seed)
        self.statistic = statistic
        self.generator = generator
        self.chunk_size = int(chunk_size)

    @classmethod
    def from_params(cls, params: Params) -> "ExperimentConfig":  # type: ignore
        spec = PairSpec.from_params(params.pop("spec"))
        schedule = ScaleSchedule.from_params(params.pop("schedule", Params({})))
        N_grid = params.pop("N_grid")
        R = params.pop_int("R")
        seed = params.pop_int("seed", 0)
        statistic = params.pop_choice("statistic", STATISTICS, default_to_first_choice=True)
        generator_params = params.pop("generator", None)
        generator = PairGenerator.from_params(generator_params) if generator_params is not None else None
        chunk_size = params.pop_int("chunk_size", DEFAULT_CHUNK)
        params.assert_empty(cls.__name__)
        return cls(spec=spec, schedule=schedule, N_grid=N_grid, R=R, seed=seed,
                   statistic=statistic, generator=generator, chunk_size=chunk_size)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        return cls.from_params(Params.from_file(path))

    def with_overrides(self,
                       R: Optional[int] = None,
                       seed: Optional[int] = None,
                       statistic: Optional[str] = None) -> "ExperimentConfig":
        return ExperimentConfig(self.spec, self.schedule, self.N_grid,
                                self.R if R is None else R,
                                self.seed if seed is None else seed,
                                self.statistic if statistic is None else statistic,
                                self.generator, self.chunk_size)

    def to_dict(self) -> Dict[str, Any]:
        return {"spec": self.spec.to_dict(),
                "schedule": self.schedule.to_dict(),
                "N_grid": list(self.N_grid),
                "R": self.R,
                "seed": self.seed,
                "statistic": self.statistic,
                "chunk_size": self.chunk_size}


def resolve_workers(flag: Optional[int] = None) -> int:
    if flag is not None:
        workers = flag
    elif os.environ.get(WORKERS_ENV):
        try:
            workers = int(os.environ[WORKERS_ENV])
        except ValueError:
            raise ConfigurationError(f"{WORKERS_ENV} must be an integer, got {os.environ[WORKERS_ENV]!r}")
    else:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise ConfigurationError(f"worker count must be >= 1, got {workers}")
    return workers


def replicate(config: ExperimentConfig, N: int, r: int) -> QVDecomposition:
    """Replication ``r`` at size ``N``: one pair on stream ``(seed, N, r)``."""
    pair = config.generator.generate(config.spec, N, config.seed, (N, r))
    gamma = config.schedule.gamma(N)
    if gamma != 1.0:
        pair = rescale_selfsimilar(pair, gamma, config.spec.H1, config.spec.H2)
    return qv_decompose(pair)


def decompositions(config: ExperimentConfig, N: int) -> Iterator[Dict[str, Any]]:
    """Per-replication rows ``rep, N, gamma, V, V1, V2, V3``."""
    for r in range(config.R):
        row = replicate(config, N, r).to_dict()
        row["rep"] = r
        yield row


def _run_chunk(config: ExperimentConfig, N: int, start: int, stop: int) -> Dict[str, MomentAccumulator]:
    accumulators = {name: MomentAccumulator() for name in STATISTICS}
    for r in range(start, stop):
        decomposition = replicate(config, N, r)
        for name, accumulator in accumulators.items():
            accumulator(decomposition.statistic(name))
    return accumulators


def _chunks(R: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + size, R)) for start in range(0, R, size)]


@dataclass
class NSummary:
    N: int
    gamma: float
    count: int
    mean: float
    sd: float
    skew: float
    exkurt: float
    rms: Dict[str, float]
    slope_running: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"N": self.N, "gamma": self.gamma, "count": self.count, "mean": self.mean,
                "sd": self.sd, "skew": self.skew, "exkurt": self.exkurt,
                "rms": dict(self.rms), "slope_running": self.slope_running}


@dataclass
class MCReport:
    config: Dict[str, Any]
    statistic: str
    per_N: List[NSummary]
    slope: float
    slope_se: float
    intercept: float
    predicted_slope: Optional[float]
    regime: Optional[Dict[str, Any]]
    shape: Optional[Dict[str, Any]]
    dominance: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"config": self.config,
                "statistic": self.statistic,
                "per_N": [summary.to_dict() for summary in self.per_N],
                "slope": self.slope,
                "slope_se": self.slope_se,
                "intercept": self.intercept,
                "predicted_slope": self.predicted_slope,
                "regime": self.regime,
                "shape": self.shape,
                "dominance": self.dominance}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "MCReport":
        per_N = [NSummary(**summary) for summary in payload["per_N"]]
        return cls(config=payload["config"], statistic=payload["statistic"], per_N=per_N,
                   slope=payload["slope"], slope_se=payload["slope_se"],
                   intercept=payload["intercept"], predicted_slope=payload["predicted_slope"],
                   regime=payload["regime"], shape=payload["shape"],
                   dominance=payload.get("dominance", {}))

    def write_csv(self, stream: TextIO) -> None:
        """Per-N rows ``N,mean,sd,skew,exkurt,slope_running``."""
        writer = csv.writer(stream)
        writer.writerow(["N", "mean", "sd", "skew", "exkurt", "slope_running"])
        for s in self.per_N:
            running = "" if s.slope_running is None else repr(s.slope_running)
            writer.writerow([s.N, repr(s.mean), repr(s.sd), repr(s.skew), repr(s.exkurt), running])


def fit_power_law(N: List[int], sd: List[float],
                  weights: Optional[List[float]] = None) -> Tuple[float, float, float]:
    """
    Weighted least squares of ``log sd`` on ``log N``.

    Returns ``(slope, intercept, slope standard error)``. ``weights`` are
    ``1 / sd(log sd)``; the standard error takes them as known variances.
    """
    x = np.log(np.asarray(N, dtype=float))
    y = np.log(np.asarray(sd, dtype=float))
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    coefficients, covariance = np.polyfit(x, y, 1, w=w, cov="unscaled")
    return float(coefficients[0]), float(coefficients[1]), float(math.sqrt(max(covariance[0, 0], 0.0)))


def log_sd_weight(exkurt: float, R: int) -> float:
    """``1 / sd(log s)`` by the delta method: ``Var(log s) = (kappa - 1) / (4R)``."""
    kappa = exkurt + 3.0
    return 1.0 / math.sqrt(max(kappa - 1.0, 1e-12) / (4.0 * R))


def _gaussian_bands(count: int) -> Tuple[float, float]:
    return 4.0 * math.sqrt(6.0 / count), 4.0 * math.sqrt(24.0 / count)


def shape_from_moments(skewness: float, excess_kurtosis: float, count: int) -> Dict[str, Any]:
    if count < MIN_SHAPE_SAMPLES:
        raise DomainError(f"shape tests need at least {MIN_SHAPE_SAMPLES} samples, got {count}")
    skew_band, kurt_band = _gaussian_bands(count)
    return {"skewness": skewness,
            "excess_kurtosis": excess_kurtosis,
            "skew_band": skew_band,
            "kurtosis_band": kurt_band,
            "gaussian_compatible": bool(abs(skewness) < skew_band and abs(excess_kurtosis) < kurt_band)}


def shape_test(samples) -> Dict[str, Any]:
    """Moment test of Gaussian shape: ``|skew| < 4 sqrt(6/R)`` and ``|exkurt| < 4 sqrt(24/R)``."""
    accumulator = MomentAccumulator()
    accumulator(np.asarray(samples, dtype=float))
    return shape_from_moments(accumulator.skewness, accumulator.excess_kurtosis, accumulator.count)


def _contributions(rms: Dict[str, float]) -> Dict[str, float]:
    return {"V1": rms["V1"], "V2": rms["V2"], "V3": 2.0 * rms["V3"]}


def dominance_record(per_N: List[NSummary], designated: Optional[str] = None) -> Dict[str, Any]:
    """
    RMS contributions of ``V1``, ``V2`` and ``2 V3`` per N, and whether the
    dominated/dominant ratios shrink along the grid.

    The dominant term is ``designated`` when given, else the empirical one at
    the largest N.
    """
    contributions = [_contributions(s.rms) for s in per_N]
    empirical = [max(TERMS, key=c.get) for c in contributions]
    dominant = designated if designated in TERMS else empirical[-1]
    rows = []
    for s, c, top in zip(per_N, contributions, empirical):
        ratios = {name: (c[name] / c[dominant] if c[dominant] > 0 else math.inf)
                  for name in TERMS if name != dominant}
        rows.append({"N": s.N, "contributions": c, "empirical_dominant": top, "ratios": ratios})
    decreasing = {name: all(b["ratios"][name] < a["ratios"][name] for a, b in zip(rows, rows[1:]))
                  for name in TERMS if name != dominant}
    return {"dominant": dominant,
            "empirical_dominant": empirical[-1],
            "per_N": rows,
            "decreasing": decreasing,
            "all_decreasing": all(decreasing.values())}


def _regime_for(config: ExperimentConfig) -> Optional[RegimeReport]:
    if config.schedule.exponent is None:
        logger.info("schedule %s is not a power law; no predicted slope", config.schedule.to_dict())
        return None
    return classify_regime(config.spec, config.schedule)


def _accumulate(config: ExperimentConfig, N: int, workers: int, progress: bool) -> Dict[str, MomentAccumulator]:
    chunks = _chunks(config.R, config.chunk_size)
    totals = {name: MomentAccumulator() for name in STATISTICS}
    with tqdm(total=config.R, desc=f"N={N}", disable=not progress, file=sys.stderr) as bar:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_run_chunk, config, N, start, stop) for start, stop in chunks]
                results = []
                for future, (start, stop) in zip(futures, chunks):
                    results.append(future.result())
                    bar.update(stop - start)
        else:
            results = []
            for start, stop in chunks:
                results.append(_run_chunk(config, N, start, stop))
                bar.update(stop - start)
    for chunk in results:
        for name in STATISTICS:
            totals[name].merge(chunk[name])
    return totals


def run(config: ExperimentConfig, workers: int = 1, progress: bool = False) -> MCReport:
    regime = _regime_for(config)
    per_N: List[NSummary] = []
    top_accumulator = None
    for N in config.N_grid:
        logger.info("simulating N=%d (R=%d, statistic %s)", N, config.R, config.statistic)
        accumulators = _accumulate(config, N, workers, progress)
        selected = accumulators[config.statistic]
        if not selected.sd > 0:
            raise DegenerateSampleError(f"statistic {config.statistic} has zero spread at N={N}")
        per_N.append(NSummary(N=N, gamma=config.schedule.gamma(N), count=selected.count,
                              mean=selected.mean, sd=selected.sd, skew=selected.skewness,
                              exkurt=selected.excess_kurtosis,
                              rms={name: accumulators[name].rms for name in STATISTICS}))
        if len(per_N) >= 2:
            running, _, _ = fit_power_law([s.N for s in per_N], [s.sd for s in per_N])
            per_N[-1].slope_running = running
        top_accumulator = selected

    weights = [log_sd_weight(s.exkurt, s.count) for s in per_N]
    slope, intercept, se = fit_power_law([s.N for s in per_N], [s.sd for s in per_N], weights)
    predicted = regime.predicted_slope(config.statistic) if regime is not None else None
    logger.info("fitted slope %.4f (se %.4f), predicted %s", slope, se, predicted)

    shape = None
    if top_accumulator.count >= MIN_SHAPE_SAMPLES:
        shape = shape_from_moments(top_accumulator.skewness, top_accumulator.excess_kurtosis,
                                   top_accumulator.count)
    else:
        logger.info("R=%d < %d: shape test skipped", top_accumulator.count, MIN_SHAPE_SAMPLES)

    designated = regime.dominant if regime is not None and not regime.is_boundary else None
    return MCReport(config=config.to_dict(), statistic=config.statistic, per_N=per_N,
                    slope=slope, slope_se=se, intercept=intercept, predicted_slope=predicted,
                    regime=regime.to_dict() if regime is not None else None,
                    shape=shape, dominance=dominance_record(per_N, designated))


def slope_band(se: float) -> float:
    band = 2.0 * (se + SLOPE_SLACK)
    if se > WIDEN_ABOVE_SE:
        logger.warning("regression se %.4f exceeds %.2f; widening the slope band to %.4f",
                       se, WIDEN_ABOVE_SE, band + se)
        band += se
    return band


def compare(report: MCReport, regime: RegimeReport, check_shape: bool = True,
            check_dominance: bool = False) -> Dict[str, Any]:
    """
    PASS iff the fitted slope is within the band of the slope predicted by
    ``regime`` and, when checked, the shape and dominance match.
    """
    predicted = regime.predicted_slope(report.statistic)
    band = slope_band(report.slope_se)
    slope_ok = abs(report.slope - predicted) < band
    verdict = {"slope": {"fitted": report.slope, "predicted": predicted, "band": band, "pass": slope_ok}}
    passed = slope_ok

    law = regime.predicted_law(report.statistic)
    shape_record = {"predicted_law": law.to_dict(), "pass": None}
    if check_shape and law.family != INDETERMINATE and report.shape is not None:
        shape_record["pass"] = report.shape["gaussian_compatible"] == law.gaussian
        passed = passed and shape_record["pass"]
    verdict["shape"] = shape_record

    if check_dominance:
        empirical = report.dominance.get("empirical_dominant")
        dominance_ok = regime.dominant != BOUNDARY and empirical == regime.dominant
        verdict["dominance"] = {"predicted": regime.dominant, "empirical": empirical, "pass": dominance_ok}
        passed = passed and dominance_ok
    verdict["verdict"] = "PASS" if passed else "FAIL"
    return verdict
