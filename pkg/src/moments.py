import math
from typing import Dict, Union

import numpy as np
from overrides import overrides

from allennlp.training.metrics.metric import Metric


@Metric.register("moments")
class MomentAccumulator(Metric):
    """
    This :class:`Metric` accumulates the first four central moments of a stream of
    values in one pass. Two accumulators combine with :func:`merge` (pairwise
    update formulas of Chan et al. and Pebay), so partial results from
    different workers reduce to the same numbers as a single pass up to
    rounding, and to exactly the same numbers for a fixed merge order.

    Skewness and excess kurtosis use the population (biased) moments, as
    ``scipy.stats.skew`` and ``scipy.stats.kurtosis`` do by default.
    """
    def __init__(self) -> None:
        self._count = 0
        self._mean = 0.0
        self._m2 = 0.0
        self._m3 = 0.0
        self._m4 = 0.0

    @overrides
    def __call__(self, values: Union[float, np.ndarray]):  # type: ignore
        """
        Parameters
        ----------
        values: ``Union[float, np.ndarray]``
            One value or a batch of values; a batch is summarized and then merged in.
        """
        values = np.atleast_1d(np.asarray(values, dtype=float)).ravel()
        if values.size == 0:
            return
        batch = MomentAccumulator()
        batch._count = values.size
        batch._mean = float(values.mean())
        centred = values - batch._mean
        squares = centred * centred
        batch._m2 = math.fsum(squares)
        batch._m3 = math.fsum(squares * centred)
        batch._m4 = math.fsum(squares * squares)
        self.merge(batch)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other._count == 0:
            return self
        if self._count == 0:
            self._count, self._mean = other._count, other._mean
            self._m2, self._m3, self._m4 = other._m2, other._m3, other._m4
            return self
        n_a, n_b = self._count, other._count
        n = n_a + n_b
        delta = other._mean - self._mean
        delta_n = delta / n
        m2 = self._m2 + other._m2 + delta * delta_n * n_a * n_b
        m3 = (self._m3 + other._m3
              + delta * delta_n ** 2 * n_a * n_b * (n_a - n_b)
              + 3.0 * delta_n * (n_a * other._m2 - n_b * self._m2))
        m4 = (self._m4 + other._m4
              + delta * delta_n ** 3 * n_a * n_b * (n_a * n_a - n_a * n_b + n_b * n_b)
              + 6.0 * delta_n ** 2 * (n_a * n_a * other._m2 + n_b * n_b * self._m2)
              + 4.0 * delta_n * (n_a * other._m3 - n_b * self._m3))
        self._count = n
        self._mean = self._mean + delta_n * n_b
        self._m2, self._m3, self._m4 = m2, m3, m4
        return self

    @property
    def count(self) -> int:
        return self._count

    @property
    def mean(self) -> float:
        return self._mean

    @property
    def variance(self) -> float:
        """Sample variance (``ddof = 1``)."""
        return self._m2 / (self._count - 1) if self._count > 1 else 0.0

    @property
    def sd(self) -> float:
        return math.sqrt(max(self.variance, 0.0))

    @property
    def rms(self) -> float:
        if self._count == 0:
            return 0.0
        return math.sqrt(self._m2 / self._count + self._mean * self._mean)

    @property
    def skewness(self) -> float:
        if self._m2 <= 0:
            return 0.0
        return math.sqrt(self._count) * self._m3 / self._m2 ** 1.5

    @property
    def excess_kurtosis(self) -> float:
        if self._m2 <= 0:
            return 0.0
        return self._count * self._m4 / (self._m2 * self._m2) - 3.0

    @overrides
    def get_metric(self, reset: bool = False) -> Dict[str, float]:
        """
        Returns
        -------
        Count, mean, sample standard deviation, skewness and excess kurtosis.
        """
        metrics = {"count": self._count,
                   "mean": self.mean,
                   "sd": self.sd,
                   "skew": self.skewness,
                   "exkurt": self.excess_kurtosis}
        if reset:
            self.reset()
        return metrics

    @overrides
    def reset(self):
        self._count = 0
        self._mean = 0.0
        self._m2 = 0.0
        self._m3 = 0.0
        self._m4 = 0.0

    def __str__(self):
        return f"MomentAccumulator(count={self._count}, mean={self._mean}, sd={self.sd})"
