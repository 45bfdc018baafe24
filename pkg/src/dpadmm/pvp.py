"""Primal variable perturbation.

During intermediate rounds a node broadcasts ``V = f + eps`` instead of its
exact minimizer and updates its dual variable from the noisy broadcasts.
At the stop round it runs one dual-perturbed round and broadcasts the exact
minimizer of that perturbed Lagrangian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model, noise
from .admm import (AdmmConfig, NodeState, check_inputs, dual_update, initial_states, make_record,
                   map_nodes)
from .dvp import dvp_round
from .schedule import as_schedule
from .solver import SolverError, consensus_problem
from .trace import RunTrace


@dataclass(frozen=True)
class PvpParams:
    alpha: float
    zeta: float
    t_stop: int

    def __post_init__(self):
        if not self.zeta > 0:
            raise ValueError("zeta must be positive")
        if self.t_stop < 0:
            raise ValueError("t_stop must be >= 0")


def pvp_zeta(rho, b_p, alpha, c_r) -> float:
    """Noise rate ``rho B_p alpha / (2 C_R)``."""
    if not (rho > 0 and b_p > 0 and alpha > 0 and c_r > 0):
        raise ValueError("rho, b_p, alpha and c_r must be positive")
    return rho * b_p * alpha / (2.0 * c_r)


def pvp_sensitivity_bound(c_r, rho, b_p) -> float:
    """Largest change of the exact local minimizer between neighboring datasets."""
    return 2.0 * c_r / (rho * b_p)


def primal_lagrangian(state: NodeState, neighbor_v_snapshot, dataset, loss, reg, config: AdmmConfig):
    """Anchors ``(f_p + V_i - eps_p) / 2`` correct the neighbor messages by the node's own noise."""
    own_noise = state.last_noise if state.last_noise is not None else np.zeros_like(state.f)
    anchors = [0.5 * (state.f + np.asarray(vi, dtype=float) - own_noise)
               for vi in neighbor_v_snapshot]
    return consensus_problem(dataset, loss, reg, config.erm, config.eta, anchors,
                             linear_extra=2.0 * state.lam)


def primal_update_pvp(state: NodeState, neighbor_v_snapshot, dataset, loss, reg,
                      config: AdmmConfig) -> np.ndarray:
    problem = primal_lagrangian(state, neighbor_v_snapshot, dataset, loss, reg, config)
    return problem.solve(state.f, config.inner_tol, config.max_inner_iters)


def perturb_primal(f, eps) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if f.shape != eps.shape:
        raise model.DimensionError("classifier and noise dimensions differ")
    return f + eps


def dual_update_pvp(lam, own_v, neighbor_v, eta: float) -> np.ndarray:
    """Dual step on the noisy broadcasts ``V``."""
    return dual_update(lam, own_v, neighbor_v, eta)


def run_pvp(partitioned, graph, loss, reg, config: AdmmConfig, alpha_schedule, t_stop=None,
            seed: int = 0, zeta_rule: str = "proof_half") -> RunTrace:
    """Run rounds ``0 .. t_stop``; round ``t_stop`` is the dual-perturbed release.

    ``t_stop`` defaults to ``max_iters - 1`` so the trace has ``max_iters``
    records. ``V(0) = f(0)`` and ``eps_p(0) = 0``.
    """
    check_inputs(partitioned, graph, config)
    t_stop = config.max_iters - 1 if t_stop is None else int(t_stop)
    if not 0 <= t_stop <= config.max_iters:
        raise ValueError(f"t_stop must lie in [0, {config.max_iters}], got {t_stop}")
    schedule = as_schedule(alpha_schedule)
    P, d = graph.node_count, partitioned.dim
    states = initial_states(P, d, seed, config.init_scale)
    for s in states:
        s.v = s.f.copy()
    trace = RunTrace("pvp", P, d, np.array([s.f for s in states]))
    c_r, rho = config.erm.c_r, config.erm.rho

    for t in range(t_stop):
        v_snapshot = [s.v.copy() for s in states]

        def primal(p):
            state, dataset = states[p - 1], partitioned[p]
            try:
                f_new = primal_update_pvp(state, [v_snapshot[i - 1] for i in graph.sorted_neighbors(p)],
                                          dataset, loss, reg, config)
            except SolverError as exc:
                raise SolverError(f"node {p}, iteration {t}: {exc}") from exc
            zeta = pvp_zeta(rho, len(dataset), schedule(p, t), c_r)
            eps = noise.sample_noise(noise.NoiseSpec(d, zeta, seed, p, t + 1))
            return f_new, eps, zeta

        out = map_nodes(primal, graph.nodes, config.workers)
        for p in graph.nodes:
            s = states[p - 1]
            s.f, s.last_noise = out[p - 1][0], out[p - 1][1]
            s.v = perturb_primal(s.f, s.last_noise)
        for p in graph.nodes:
            states[p - 1].lam = dual_update_pvp(states[p - 1].lam, states[p - 1].v,
                                                [states[j - 1].v for j in graph.sorted_neighbors(p)],
                                                config.eta)
        trace.append(make_record(
            t + 1, [s.f for s in states], [s.lam for s in states], [s.v for s in states], graph,
            partitioned, loss, c_r, noise_norm=[np.linalg.norm(o[1]) for o in out],
            zeta=[o[2] for o in out], v_norm=[np.linalg.norm(s.v) for s in states]))

    # release round: neighbors' last noisy broadcasts stand in for their classifiers
    v_snapshot = [s.v.copy() for s in states]
    out = dvp_round(states, graph, partitioned, loss, reg, config, schedule, t_stop, seed,
                    zeta_rule, neighbor_values=v_snapshot)
    new_f = [o[0] for o in out]
    for p in graph.nodes:
        s = states[p - 1]
        s.f, s.mu, s.v = new_f[p - 1], out[p - 1][2], new_f[p - 1]
    for p in graph.nodes:
        states[p - 1].lam = dual_update(states[p - 1].lam, new_f[p - 1],
                                        [new_f[j - 1] for j in graph.sorted_neighbors(p)], config.eta)
    params = [o[3] for o in out]
    trace.append(make_record(
        t_stop + 1, new_f, [s.lam for s in states], new_f, graph, partitioned, loss, c_r,
        noise_norm=[np.linalg.norm(o[1]) for o in out], alpha_hat=[q.alpha_hat for q in params],
        phi=[q.phi for q in params], zeta=[q.zeta for q in params],
        v_norm=[np.linalg.norm(f) for f in new_f], is_final=True))
    return trace
