import numpy as np
from numpy.testing import assert_allclose
from scipy import stats

from src.moments import MomentAccumulator


class TestMomentAccumulator:
    def setup_method(self):
        self.values = np.random.default_rng(3).gamma(2.0, size=2000)

    def test_matches_scipy(self):
        accumulator = MomentAccumulator()
        accumulator(self.values)
        metrics = accumulator.get_metric()
        assert metrics["count"] == self.values.size
        assert_allclose(metrics["mean"], self.values.mean(), rtol=1e-12)
        assert_allclose(metrics["sd"], self.values.std(ddof=1), rtol=1e-12)
        assert_allclose(metrics["skew"], stats.skew(self.values), rtol=1e-10)
        assert_allclose(metrics["exkurt"], stats.kurtosis(self.values), rtol=1e-10)
        assert_allclose(accumulator.rms, np.sqrt(np.mean(self.values ** 2)), rtol=1e-12)

    def test_merge_of_chunks_equals_single_pass(self):
        whole = MomentAccumulator()
        whole(self.values)
        merged = MomentAccumulator()
        for chunk in np.array_split(self.values, 7):
            part = MomentAccumulator()
            for value in chunk:
                part(value)
            merged.merge(part)
        for key, value in whole.get_metric().items():
            assert_allclose(merged.get_metric()[key], value, rtol=1e-9)

    def test_fixed_merge_order_is_bitwise_reproducible(self):
        def reduce():
            total = MomentAccumulator()
            for chunk in np.array_split(self.values, 5):
                part = MomentAccumulator()
                part(chunk)
                total.merge(part)
            return total.get_metric()
        assert reduce() == reduce()

    def test_reset_and_empty_input(self):
        accumulator = MomentAccumulator()
        accumulator(np.array([]))
        assert accumulator.count == 0
        accumulator([1.0, 2.0, 3.0])
        metrics = accumulator.get_metric(reset=True)
        assert metrics["mean"] == 2.0
        assert accumulator.count == 0
        assert accumulator.sd == 0.0
        assert accumulator.skewness == 0.0
