"""
Exact stationary Gaussian sequences by circulant embedding.

The covariance ``r(0..n-1)`` is embedded in the first row
``[r(0), ..., r(m/2), r(m/2-1), ..., r(1)]`` of an ``m x m`` circulant, whose
eigenvalues come from one FFT. When they are nonnegative, the real part of
``fft(sqrt(lambda/m) (Z1 + i Z2))`` has covariance ``r`` on its first ``n``
entries.
"""
import logging
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from allennlp.common import Registrable
from overrides import overrides

from src.hermqv.analytic.covariance import fgn_autocovariance
from src.hermqv.checks import DomainError, EmbeddingError

logger = logging.getLogger(__name__)

EIGENVALUE_RTOL = 1e-10
MAX_DOUBLINGS = 4

SeedLike = Union[int, np.random.Generator]


def seed_stream(seed: int, *keys: int) -> np.random.Generator:
    """
    Generator for the stream ``(seed, *keys)``.

    Streams are addressed, not spawned, so any two distinct key tuples give
    independent generators whatever order they are created in.
    """
    if seed is None or seed < 0:
        raise DomainError(f"master seed must be a non-negative integer, got {seed}")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return seed_stream(seed)


class AutocovModel(Registrable):
    """Autocovariance of a stationary sequence with ``r(0) = 1``."""
    default_implementation = "fgn"

    def values(self, max_lag: int) -> np.ndarray:
        """``[r(0), ..., r(max_lag)]``."""
        raise NotImplementedError


@AutocovModel.register("fgn")
class FgnModel(AutocovModel):
    """Fractional Gaussian noise with index ``h``."""

    def __init__(self, h: float) -> None:
        if not 0.0 < h < 1.0:
            raise DomainError(f"fGn index h must lie in (0, 1), got {h}")
        self.h = float(h)

    @overrides
    def values(self, max_lag: int) -> np.ndarray:
        return fgn_autocovariance(self.h, np.arange(max_lag + 1))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FgnModel) and other.h == self.h

    def __hash__(self) -> int:
        return hash(("fgn", self.h))

    def __repr__(self) -> str:
        return f"FgnModel(h={self.h})"


class CirculantSampler:
    def __init__(self,
                 model: AutocovModel,
                 n: int,
                 m: int,
                 eigenvalues: np.ndarray,
                 clamped_mass: float,
                 doublings: int) -> None:
        self.model = model
        self.n = n
        self.m = m
        self.eigenvalues = eigenvalues
        self.clamped_mass = clamped_mass
        self.doublings = doublings
        self._scale = np.sqrt(eigenvalues / m)
        self._scale.setflags(write=False)

    def sample(self, seed: SeedLike) -> np.ndarray:
        return sample(self, seed)

    def __repr__(self) -> str:
        return f"CirculantSampler({self.model!r}, n={self.n}, m={self.m})"


def _embedding_length(n: int) -> int:
    m = 2
    while m < 2 * (n - 1):
        m *= 2
    return m


def _embedding_eigenvalues(model: AutocovModel, m: int) -> np.ndarray:
    r = model.values(m // 2)
    row = np.concatenate([r, r[-2:0:-1]])
    return np.fft.fft(row).real


@lru_cache(maxsize=32)
def build_sampler(model: AutocovModel, n: int, max_doublings: int = MAX_DOUBLINGS) -> CirculantSampler:
    """
    Circulant sampler of ``n`` consecutive values of ``model``.

    The embedding length starts at the smallest power of two ``>= 2n - 2`` and
    is doubled while an eigenvalue is more negative than
    ``-1e-10 * max eigenvalue``, at most ``max_doublings`` times. Negative
    eigenvalues within that tolerance are clamped to zero.
    """
    if n < 2:
        raise DomainError(f"circulant embedding needs n >= 2, got {n}")
    m = _embedding_length(n)
    for doubling in range(max_doublings + 1):
        eigenvalues = _embedding_eigenvalues(model, m)
        tolerance = EIGENVALUE_RTOL * eigenvalues.max()
        most_negative = float(eigenvalues.min())
        if most_negative >= -tolerance:
            break
        logger.info("embedding of length %d for %r has eigenvalue %.3g; doubling",
                    m, model, most_negative)
        m *= 2
    else:
        raise EmbeddingError(f"circulant embedding of {model!r} for n={n} is not nonnegative "
                             f"after {max_doublings} doublings (most negative eigenvalue "
                             f"{most_negative:.6g})", most_negative)

    negative = eigenvalues < 0
    clamped_mass = float(-eigenvalues[negative].sum())
    if negative.any():
        logger.warning("clamped %d negative eigenvalues of total mass %.3g (trace %.6g) for %r",
                       int(negative.sum()), clamped_mass, float(eigenvalues.sum()), model)
        eigenvalues = np.where(negative, 0.0, eigenvalues)
    eigenvalues.setflags(write=False)
    logger.info("built circulant sampler for %r: n=%d, m=%d, doublings=%d",
                model, n, m, doubling)
    return CirculantSampler(model, n, m, eigenvalues, clamped_mass, doubling)


def sample(sampler: CirculantSampler, seed: SeedLike) -> np.ndarray:
    """A mean-zero Gaussian vector with covariance ``[r(|i - j|)]``, determined by ``seed``."""
    rng = _as_generator(seed)
    noise = rng.standard_normal(sampler.m) + 1j * rng.standard_normal(sampler.m)
    return np.fft.fft(sampler._scale * noise).real[:sampler.n]


def fgn(h: float, n: int, seed: SeedLike) -> np.ndarray:
    """``n`` values of unit-variance fGn with index ``h``."""
    if n == 1:
        return _as_generator(seed).standard_normal(1)
    return sample(build_sampler(FgnModel(h), n), seed)


def empirical_autocovariance(samples: np.ndarray, lags: Sequence[int]) -> np.ndarray:
    """Averages of ``X_0 X_lag`` over rows of ``samples`` (one draw per row)."""
    samples = np.atleast_2d(samples)
    return np.array([np.mean(samples[:, 0] * samples[:, lag]) for lag in lags])
