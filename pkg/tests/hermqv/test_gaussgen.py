import logging

import numpy as np
import pytest
from allennlp.common import Params
from numpy.testing import assert_allclose
from scipy import linalg

from src.hermqv.analytic.covariance import fgn_autocovariance
from src.hermqv.checks import DomainError, EmbeddingError
from src.hermqv.gaussgen import (AutocovModel, FgnModel, build_sampler, empirical_autocovariance, fgn,
                                 sample, seed_stream)


class _OscillatingModel(AutocovModel):
    """Not positive definite: no circulant embedding is nonnegative."""

    def values(self, max_lag):
        r = np.zeros(max_lag + 1)
        r[0] = 1.0
        r[1:3] = 0.9
        return r


class TestSeedStreams:
    def test_addressed_streams_are_reproducible(self):
        a = seed_stream(7, 128, 3).standard_normal(5)
        b = seed_stream(7, 128, 3).standard_normal(5)
        assert np.array_equal(a, b)

    def test_distinct_keys_give_distinct_streams(self):
        draws = {tuple(seed_stream(7, *keys).standard_normal(3)) for keys in [(), (1,), (2,), (1, 0), (0, 1)]}
        assert len(draws) == 5

    def test_creation_order_does_not_matter(self):
        first = [seed_stream(1, k).standard_normal() for k in range(4)]
        second = [seed_stream(1, k).standard_normal() for k in reversed(range(4))][::-1]
        assert first == second

    def test_uses_philox(self):
        assert isinstance(seed_stream(0).bit_generator, np.random.Philox)

    def test_negative_seed(self):
        with pytest.raises(DomainError):
            seed_stream(-1)


class TestCirculantSampler:
    def test_eigenvalues_nonnegative_and_read_only(self):
        sampler = build_sampler(FgnModel(0.8), 100)
        assert sampler.m >= 2 * 99
        assert sampler.eigenvalues.min() >= 0
        with pytest.raises(ValueError):
            sampler.eigenvalues[0] = 1.0

    def test_sampler_is_cached(self):
        assert build_sampler(FgnModel(0.7), 64) is build_sampler(FgnModel(0.7), 64)

    def test_exact_covariance_of_the_linear_map(self):
        # sample = Re(F diag(sqrt(lambda/m)) (Z1 + i Z2)); its covariance is exact
        n = 20
        sampler = build_sampler(FgnModel(0.9), n)
        m = sampler.m
        F = np.fft.fft(np.eye(m))[:n]
        scaled = F * np.sqrt(sampler.eigenvalues / m)
        covariance = (scaled.real @ scaled.real.T + scaled.imag @ scaled.imag.T)
        expected = linalg.toeplitz(fgn_autocovariance(0.9, np.arange(n)))
        assert_allclose(covariance, expected, atol=1e-12)

    def test_empirical_autocovariance(self):
        n, draws = 16, 20000
        sampler = build_sampler(FgnModel(0.75), n)
        samples = np.stack([sample(sampler, seed_stream(5, r)) for r in range(draws)])
        empirical = empirical_autocovariance(samples, [0, 1, 5])
        assert_allclose(empirical, fgn_autocovariance(0.75, [0, 1, 5]), atol=0.05)

    @pytest.mark.slow
    def test_empirical_covariance_matrix(self):
        n, draws, h = 64, 200000, 0.85
        sampler = build_sampler(FgnModel(h), n)
        samples = np.stack([sample(sampler, seed_stream(7, r)) for r in range(draws)])
        covariance = samples.T @ samples / draws
        assert_allclose(covariance, linalg.toeplitz(fgn_autocovariance(h, np.arange(n))), atol=0.02)

    def test_embedding_failure(self, caplog):
        with caplog.at_level(logging.INFO):
            with pytest.raises(EmbeddingError) as error:
                build_sampler(_OscillatingModel(), 50, max_doublings=1)
        assert error.value.most_negative < 0
        assert "doubling" in caplog.text

    def test_domain(self):
        with pytest.raises(DomainError):
            build_sampler(FgnModel(0.7), 1)
        with pytest.raises(DomainError):
            FgnModel(1.0)


def test_fgn_is_a_function_of_its_seed():
    assert np.array_equal(fgn(0.7, 33, 4), fgn(0.7, 33, 4))
    assert not np.array_equal(fgn(0.7, 33, 4), fgn(0.7, 33, 5))
    assert fgn(0.7, 1, 0).shape == (1,)


def test_model_registry():
    model = AutocovModel.from_params(Params({"h": 0.6}))
    assert model == FgnModel(0.6)
    assert_allclose(model.values(2), fgn_autocovariance(0.6, [0, 1, 2]))
