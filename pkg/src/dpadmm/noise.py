"""Exponential-norm noise with density proportional to exp(-zeta * ||e||).

Every draw comes from its own counter-based stream. The 64-bit key of a
stream is

    h = mix64(seed)
    h = mix64(h ^ channel)
    h = mix64(h ^ node)
    h = mix64(h ^ iteration)

where ``mix64`` is the SplitMix64 finalizer (all arithmetic mod 2**64)::

    z = x + 0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

and the key seeds a Philox-4x64 generator (``numpy.random.Philox(key=h)``).
The stream therefore depends only on ``(seed, channel, node, iteration)``,
never on the order in which nodes are processed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

# stream channels
NOISE = 0
INIT = 1
AUDIT = 2
MONTE_CARLO = 3


def mix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, node: int, iteration: int, channel: int = NOISE) -> int:
    h = mix64(seed & MASK64)
    h = mix64(h ^ (channel & MASK64))
    h = mix64(h ^ (node & MASK64))
    return mix64(h ^ (iteration & MASK64))


def stream(seed: int, node: int = 0, iteration: int = 0, channel: int = NOISE) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, node, iteration, channel)))


@dataclass(frozen=True)
class NoiseSpec:
    dim: int
    zeta: float
    seed: int = 0
    node: int = 0
    iteration: int = 0
    channel: int = NOISE

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("noise dimension must be >= 1")
        if not self.zeta > 0:
            raise ValueError(f"zeta must be positive, got {self.zeta}")

    def generator(self) -> np.random.Generator:
        return stream(self.seed, self.node, self.iteration, self.channel)


def _draw(rng: np.random.Generator, dim: int, zeta: float, n: int) -> np.ndarray:
    # radius ~ Gamma(dim, 1/zeta) as a sum of dim exponentials
    radius = rng.exponential(scale=1.0 / zeta, size=(n, dim)).sum(axis=1)
    direction = rng.standard_normal((n, dim))
    norms = np.linalg.norm(direction, axis=1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        direction[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(direction, axis=1)
    return direction * (radius / norms)[:, None]


def sample_noise(spec: NoiseSpec) -> np.ndarray:
    """One draw ``r * u`` with ``r ~ Gamma(d, 1/zeta)`` and ``u`` uniform on the sphere."""
    return _draw(spec.generator(), spec.dim, spec.zeta, 1)[0]


def sample_noise_batch(dim: int, zeta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` independent draws from one generator, shape ``(n, dim)``."""
    if dim < 1:
        raise ValueError("noise dimension must be >= 1")
    if not zeta > 0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    return _draw(rng, dim, zeta, n)


def gamma_tail_threshold(k: int, theta: float, delta: float) -> float:
    """``k * theta * ln(k / delta)``; a Gamma(k, theta) draw falls below it w.p. >= 1 - delta."""
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    if not theta > 0:
        raise ValueError("theta must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return k * theta * math.log(k / delta)
