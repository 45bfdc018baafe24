import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from dpadmm import noise


def draws(d, zeta, n=100_000, seed=0):
    return noise.sample_noise_batch(d, zeta, n, noise.stream(seed, 0, 0, noise.MONTE_CARLO))


@pytest.mark.parametrize("d,zeta", [(1, 2.0), (3, 2.0)])
def test_mean_norm(d, zeta):
    eps = draws(d, zeta)
    assert np.linalg.norm(eps, axis=1).mean() == pytest.approx(d / zeta, rel=0.02)
    se = eps.std(axis=0) / math.sqrt(len(eps))
    assert np.all(np.abs(eps.mean(axis=0)) <= 3 * se)


def test_same_spec_same_vector():
    spec = noise.NoiseSpec(4, 0.7, seed=9, node=2, iteration=5)
    np.testing.assert_array_equal(noise.sample_noise(spec), noise.sample_noise(spec))


def test_streams_differ_by_counter():
    a = noise.sample_noise(noise.NoiseSpec(3, 1.0, seed=1, node=1, iteration=1))
    b = noise.sample_noise(noise.NoiseSpec(3, 1.0, seed=1, node=2, iteration=1))
    c = noise.sample_noise(noise.NoiseSpec(3, 1.0, seed=1, node=1, iteration=2))
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_mix64_reference_values():
    # first two outputs of the public SplitMix64 generator seeded with 0
    assert noise.mix64(0) == 0xE220A8397B1DCDAF
    assert noise.mix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def splitmix_reference(x):
    x = (x + 0x9E3779B97F4A7C15) % 2**64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) % 2**64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) % 2**64
    return x ^ (x >> 31)


@given(st.integers(0, 2**64 - 1))
def test_mix64_matches_reference(x):
    assert noise.mix64(x) == splitmix_reference(x)


def test_stream_key_composition():
    h = splitmix_reference(5)
    for v in (noise.NOISE, 3, 7):
        h = splitmix_reference(h ^ v)
    assert noise.stream_key(5, 3, 7, noise.NOISE) == h


@pytest.mark.parametrize("d", [1, 3, 10])
def test_norm_distribution_ks(d):
    zeta = 1.5
    r = np.linalg.norm(draws(d, zeta, seed=d), axis=1)
    assert stats.kstest(r, stats.gamma(a=d, scale=1 / zeta).cdf).statistic <= 0.01


@pytest.mark.parametrize("d", [2, 3, 10])
def test_direction_uniform(d):
    eps = draws(d, 1.0, seed=11)
    u = eps / np.linalg.norm(eps, axis=1, keepdims=True)
    assert np.linalg.norm(u.mean(axis=0)) <= 0.02


def test_gamma_threshold_examples():
    assert noise.gamma_tail_threshold(3, 2, 0.05) == pytest.approx(6 * math.log(60))
    assert noise.gamma_tail_threshold(3, 2, 0.05) == pytest.approx(24.566, abs=1e-3)
    assert noise.gamma_tail_threshold(1, 1, math.exp(-1)) == pytest.approx(1.0)


def test_gamma_threshold_monte_carlo():
    z = noise.stream(0, 0, 0, noise.MONTE_CARLO).gamma(3, 2, size=100_000)
    assert np.mean(z < 24.566) >= 0.95


@pytest.mark.parametrize("k", [1, 3, 10])
@pytest.mark.parametrize("delta", [0.2, 0.05, 0.01])
def test_tail_threshold_grid_coverage(k, delta):
    theta = 0.5
    r = np.linalg.norm(draws(k, 1 / theta, seed=100 * k), axis=1)
    assert np.mean(r < noise.gamma_tail_threshold(k, theta, delta)) >= 1 - delta


def test_domain_errors():
    with pytest.raises(ValueError):
        noise.NoiseSpec(3, 0.0)
    with pytest.raises(ValueError):
        noise.NoiseSpec(0, 1.0)
    for args in [(0, 1, 0.1), (2, -1, 0.1), (2, 1, 1.0), (2, 1, 0.0)]:
        with pytest.raises(ValueError):
            noise.gamma_tail_threshold(*args)
