"""Histogram audit of the per-iteration privacy loss on scalar outputs.

For two neighboring datasets the released value of one node after one
round is sampled many times; the largest absolute log-ratio of the bin
counts estimates the privacy loss. Bins are quantiles of the pooled sample,
and adjacent bins are merged until every compared count reaches
``min_count``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .. import noise
from ..data import DataPoint
from ..dvp import dvp_calibrate
from ..pvp import pvp_zeta
from .instances import LocalInstance, random_instance

MECHANISMS = ("dvp", "pvp")


@dataclass(frozen=True)
class AuditConfig:
    """Monte Carlo settings.

    Attributes:
        runs: Samples per dataset.
        bins: Number of pooled-quantile bins before merging.
        slack: Allowed overshoot of the estimate above ``alpha``.
        min_count: Smallest count kept in a compared bin.
    """

    runs: int = 100_000
    bins: int = 20
    slack: float = 0.2
    min_count: int = 100

    def __post_init__(self):
        if self.runs < 1 or self.bins < 1 or self.min_count < 1:
            raise ValueError("runs, bins and min_count must be positive")
        if self.slack < 0:
            raise ValueError("slack must be nonnegative")


@dataclass
class AuditReport:
    mechanism: str
    alpha: float
    epsilon_hat: float
    edges: np.ndarray
    counts: np.ndarray
    counts_neighbor: np.ndarray
    merged_bins: int
    slack: float = 0.2
    samples: tuple = field(default=(), repr=False)

    @property
    def passed(self) -> bool:
        return self.epsilon_hat <= self.alpha + self.slack

    def as_dict(self) -> dict:
        return {"name": f"audit_{self.mechanism}", "alpha": self.alpha,
                "epsilon_hat": self.epsilon_hat, "bound": self.alpha + self.slack,
                "pass": self.passed, "bins": len(self.counts),
                "counts": self.counts.tolist(), "counts_neighbor": self.counts_neighbor.tolist()}


def default_audit_instance(seed: int = 0) -> LocalInstance:
    return random_instance(seed=seed, dim=1, b_p=20, n_p=0, c_r=1.0, rho=0.1, eta=1.0)


def flipped_point(inst: LocalInstance, index: int) -> DataPoint:
    """Unit-norm replacement whose margin has the opposite sign of the original's."""
    old = inst.dataset.point(index)
    margin = old.y * float(old.x[0])
    return DataPoint(np.array([-1.0 if margin >= 0 else 1.0]) * old.y, old.y)


def solve_scalar(margins, c_r, loss, quad, linear, tol=1e-12, max_iter=100) -> np.ndarray:
    """Roots of ``(C_R/B) sum_i m_i L'(m_i f) + quad f + linear = 0`` for a vector of ``linear``.

    Newton steps safeguarded by false position; the root lies within
    ``C_R / quad`` of ``-linear / quad`` because ``|L'| <= 1`` and ``|m_i| <= 1``.
    """
    m = np.asarray(margins, dtype=float)
    b = np.asarray(linear, dtype=float)
    B = len(m)

    def residual(f):
        z = np.outer(f, m)
        return (c_r / B * (loss.first_derivative(z) @ m) + quad * f + b,
                c_r / B * (loss.second_derivative(z) @ (m * m)) + quad)

    lo, hi = (-b - c_r) / quad, (-b + c_r) / quad
    h_lo, h_hi = residual(lo)[0], residual(hi)[0]
    f = -b / quad
    for _ in range(max_iter):
        h, dh = residual(f)
        if np.max(np.abs(h)) <= tol * (1.0 + np.max(np.abs(b))):
            return f
        below = h < 0
        lo, h_lo = np.where(below, f, lo), np.where(below, h, h_lo)
        hi, h_hi = np.where(~below, f, hi), np.where(~below, h, h_hi)
        step = f - h / dh
        width = h_hi - h_lo
        secant = np.where(width > 0, lo - h_lo * (hi - lo) / np.where(width > 0, width, 1.0),
                          0.5 * (lo + hi))
        f = np.where((step > lo) & (step < hi), step, secant)
    raise RuntimeError("scalar solver did not converge")


def _release_samples(mechanism, inst: LocalInstance, alpha, runs, rng, zeta_rule) -> np.ndarray:
    if inst.dim != 1:
        raise ValueError("histogram auditing needs one-dimensional classifiers")
    if inst.reg.name != "l2":
        raise ValueError("the scalar solver assumes the l2 regularizer")
    m = inst.dataset.margins_matrix[:, 0]
    anchors_sum = 0.5 * (inst.n_p * inst.f_own[0] + inst.f_nbrs[:, 0].sum())
    if mechanism == "dvp":
        params = dvp_calibrate(alpha, inst.loss.c1, inst.b_p, inst.c_r, inst.rho, inst.eta,
                               inst.n_p, zeta_rule)
        eps = noise.sample_noise_batch(1, params.zeta, runs, rng)[:, 0]
        mu = inst.lam[0] + inst.c_r / (2.0 * inst.b_p) * eps
        quad = inst.rho + params.phi + 2.0 * inst.eta * inst.n_p
        return solve_scalar(m, inst.c_r, inst.loss, quad, 2.0 * mu - 2.0 * inst.eta * anchors_sum)
    if mechanism == "pvp":
        # the node's previous noise is zero, so its minimizer does not depend on the draw
        quad = inst.rho + 2.0 * inst.eta * inst.n_p
        lin = np.array([2.0 * inst.lam[0] - 2.0 * inst.eta * anchors_sum])
        f = solve_scalar(m, inst.c_r, inst.loss, quad, lin)[0]
        zeta = pvp_zeta(inst.rho, inst.b_p, alpha, inst.c_r)
        return f + noise.sample_noise_batch(1, zeta, runs, rng)[:, 0]
    raise ValueError(f"mechanism must be one of {MECHANISMS}")


def merge_bins(edges, c1, c2, min_count):
    """Merge adjacent bins left to right until both counts reach ``min_count``."""
    out_edges, out1, out2 = [edges[0]], [], []
    a = b = 0
    for k in range(len(c1)):
        a += c1[k]
        b += c2[k]
        if a >= min_count and b >= min_count:
            out_edges.append(edges[k + 1])
            out1.append(a)
            out2.append(b)
            a = b = 0
    if a or b:
        if out1:
            out1[-1] += a
            out2[-1] += b
            out_edges[-1] = edges[-1]
        else:
            out_edges.append(edges[-1])
            out1.append(a)
            out2.append(b)
    return np.array(out_edges), np.array(out1), np.array(out2)


def histogram_epsilon(sample, sample_neighbor, bins: int = 20, min_count: int = 100):
    """Largest ``|ln(c / c')|`` over merged pooled-quantile bins."""
    pooled = np.concatenate([sample, sample_neighbor])
    inner = np.unique(np.quantile(pooled, np.linspace(0, 1, bins + 1)[1:-1]))
    edges = np.concatenate([[-np.inf], inner, [np.inf]])
    c1 = np.bincount(np.searchsorted(inner, sample, side="right"), minlength=len(inner) + 1)
    c2 = np.bincount(np.searchsorted(inner, sample_neighbor, side="right"), minlength=len(inner) + 1)
    merged_edges, m1, m2 = merge_bins(edges, c1, c2, min_count)
    merged = len(c1) - len(m1)
    if np.any(m1 == 0) or np.any(m2 == 0):
        return math.inf, merged_edges, m1, m2, merged
    return float(np.max(np.abs(np.log(m1 / m2)))), merged_edges, m1, m2, merged


def audit_privacy(mechanism: str, instance: LocalInstance | None = None, neighbor_index: int = 0,
                  replacement: DataPoint | None = None, alpha: float = 0.5,
                  audit: AuditConfig | None = None, seed: int = 0,
                  zeta_rule: str = "proof_half") -> AuditReport:
    """Estimate the privacy loss of one node's single-round release.

    ``replacement`` defaults to :func:`flipped_point`. Pass the original
    point to audit two identical datasets.
    """
    audit = audit or AuditConfig()
    inst = instance or default_audit_instance()
    if replacement is None:
        replacement = flipped_point(inst, neighbor_index)
    neighbor = inst.with_point(neighbor_index, replacement)
    s1 = _release_samples(mechanism, inst, alpha, audit.runs,
                          noise.stream(seed, 1, 0, noise.AUDIT), zeta_rule)
    s2 = _release_samples(mechanism, neighbor, alpha, audit.runs,
                          noise.stream(seed, 2, 0, noise.AUDIT), zeta_rule)
    eps_hat, edges, c1, c2, merged = histogram_epsilon(s1, s2, audit.bins, audit.min_count)
    if merged:
        warnings.warn(f"{merged} sparse bins merged to reach {audit.min_count} counts", stacklevel=2)
    return AuditReport(mechanism, alpha, eps_hat, edges, c1, c2, merged, audit.slack, (s1, s2))
