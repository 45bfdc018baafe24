"""Dual variable perturbation.

Before its primal minimization a node replaces its dual variable by
``mu = lam + (C_R / (2 B_p)) * eps`` with exponential-norm noise ``eps``
and adds the penalty ``(Phi / 2) ||f||^2``. The minimizer is broadcast.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import model, noise
from .admm import (AdmmConfig, NodeState, check_inputs, dual_update, initial_states, make_record,
                   map_nodes)
from .schedule import as_schedule
from .solver import SolverError, consensus_problem
from .trace import RunTrace

ZETA_RULES = ("proof_half", "algorithm_full")


@dataclass(frozen=True)
class DvpParams:
    alpha: float
    alpha_hat: float
    phi: float
    zeta: float
    zeta_rule: str = "proof_half"


def jacobian_log_ratio(c1, b_p, c_r, rho, eta, n_p, phi=0.0) -> float:
    """``2 ln(1 + c1 / ((B_p / C_R)(rho + Phi + 2 eta N_p)))``, the Jacobian part of the loss."""
    if c_r == 0:
        return 0.0
    return 2.0 * math.log1p(c1 / ((b_p / c_r) * (rho + phi + 2.0 * eta * n_p)))


def dvp_calibrate(alpha, c1, b_p, c_r, rho, eta, n_p, zeta_rule: str = "proof_half") -> DvpParams:
    """Split the budget ``alpha`` between the Jacobian ratio and the noise density.

    If the Jacobian term at ``Phi = 0`` leaves a positive remainder, that
    remainder is ``alpha_hat``. Otherwise the extra ridge ``Phi`` is chosen so
    the Jacobian term is exactly ``alpha / 2`` and ``alpha_hat = alpha / 2``.
    ``zeta`` is ``alpha_hat / 2`` (``proof_half``) or ``alpha_hat``
    (``algorithm_full``).
    """
    for name, val in (("alpha", alpha), ("b_p", b_p), ("rho", rho), ("eta", eta)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    for name, val in (("c1", c1), ("c_r", c_r), ("n_p", n_p)):
        if val < 0:
            raise ValueError(f"{name} must be nonnegative, got {val}")
    if zeta_rule not in ZETA_RULES:
        raise ValueError(f"zeta_rule must be one of {ZETA_RULES}")
    if alpha > 1:
        warnings.warn(f"alpha = {alpha} > 1 is outside the range the accuracy analysis assumes",
                      stacklevel=2)
    alpha_hat = alpha - jacobian_log_ratio(c1, b_p, c_r, rho, eta, n_p)
    phi = 0.0
    if alpha_hat <= 0:
        phi = c1 / ((b_p / c_r) * math.expm1(alpha / 4)) - rho - 2.0 * eta * n_p
        alpha_hat = alpha / 2
        if phi < 0:
            warnings.warn(f"extra ridge Phi = {phi:.4g} < 0 clamped to 0", stacklevel=2)
            phi = 0.0
    zeta = alpha_hat / 2 if zeta_rule == "proof_half" else alpha_hat
    return DvpParams(alpha, alpha_hat, phi, zeta, zeta_rule)


def perturb_dual(lam, eps, c_r, b_p) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if lam.shape != eps.shape:
        raise model.DimensionError("dual variable and noise dimensions differ")
    return lam + c_r / (2.0 * b_p) * eps


def dual_lagrangian(state: NodeState, neighbor_snapshot, dataset, loss, reg, config: AdmmConfig,
                    params: DvpParams, mu):
    anchors = [0.5 * (state.f + np.asarray(fi, dtype=float)) for fi in neighbor_snapshot]
    return consensus_problem(dataset, loss, reg, config.erm, config.eta, anchors,
                             linear_extra=2.0 * np.asarray(mu, dtype=float), extra_quad=params.phi)


def primal_update_dvp(state: NodeState, neighbor_snapshot, dataset, loss, reg, config: AdmmConfig,
                      params: DvpParams, mu) -> np.ndarray:
    problem = dual_lagrangian(state, neighbor_snapshot, dataset, loss, reg, config, params, mu)
    return problem.solve(state.f, config.inner_tol, config.max_inner_iters)


def kkt_recover_noise(f_opt, state_at_t: NodeState, neighbor_snapshot, dataset, loss, reg,
                      config: AdmmConfig, params: DvpParams) -> np.ndarray:
    """The unique noise vector for which ``f_opt`` minimizes the perturbed Lagrangian."""
    f = np.asarray(f_opt, dtype=float)
    if f.shape != (dataset.dim,):
        raise model.DimensionError(f"f_opt has shape {f.shape}, expected ({dataset.dim},)")
    B, c_r, rho, eta = len(dataset), config.erm.c_r, config.erm.rho, config.eta
    nbrs = [np.asarray(fi, dtype=float) for fi in neighbor_snapshot]
    A = dataset.margins_matrix
    eps = -(A.T @ loss.first_derivative(A @ f))
    eps -= B / c_r * rho * reg.gradient(f)
    eps -= 2.0 * B / c_r * state_at_t.lam
    eps -= B / c_r * (params.phi + 2.0 * eta * len(nbrs)) * f
    if nbrs:
        eps += B * eta / c_r * np.sum([state_at_t.f + fi for fi in nbrs], axis=0)
    return eps


def dvp_round(states, graph, partitioned, loss, reg, config, schedule, t, seed, zeta_rule,
              neighbor_values=None):
    """One synchronous perturbed round; returns (new f, noise, params) per node.

    ``neighbor_values`` replaces the broadcast classifiers as the neighbor
    snapshot (the primal-perturbation final round passes its last V here).
    """
    snapshot = neighbor_values if neighbor_values is not None else [s.f.copy() for s in states]
    d = partitioned.dim

    def primal(p):
        state, dataset = states[p - 1], partitioned[p]
        nbrs = graph.sorted_neighbors(p)
        params = dvp_calibrate(schedule(p, t), loss.c1, len(dataset), config.erm.c_r,
                               config.erm.rho, config.eta, len(nbrs), zeta_rule)
        eps = noise.sample_noise(noise.NoiseSpec(d, params.zeta, seed, p, t + 1))
        mu = perturb_dual(state.lam, eps, config.erm.c_r, len(dataset))
        try:
            f_new = primal_update_dvp(state, [snapshot[i - 1] for i in nbrs], dataset, loss, reg,
                                      config, params, mu)
        except SolverError as exc:
            raise SolverError(f"node {p}, iteration {t}: {exc}") from exc
        return f_new, eps, mu, params

    return map_nodes(primal, graph.nodes, config.workers)


def run_dvp(partitioned, graph, loss, reg, config: AdmmConfig, alpha_schedule, seed: int = 0,
            zeta_rule: str = "proof_half") -> RunTrace:
    check_inputs(partitioned, graph, config)
    schedule = as_schedule(alpha_schedule)
    P, d = graph.node_count, partitioned.dim
    states = initial_states(P, d, seed, config.init_scale)
    trace = RunTrace("dvp", P, d, np.array([s.f for s in states]))
    for t in range(config.max_iters):
        out = dvp_round(states, graph, partitioned, loss, reg, config, schedule, t, seed, zeta_rule)
        new_f = [o[0] for o in out]
        for p in graph.nodes:
            s = states[p - 1]
            s.f, s.last_noise, s.mu = new_f[p - 1], out[p - 1][1], out[p - 1][2]
        for p in graph.nodes:
            states[p - 1].lam = dual_update(states[p - 1].lam, new_f[p - 1],
                                            [new_f[j - 1] for j in graph.sorted_neighbors(p)],
                                            config.eta)
        params = [o[3] for o in out]
        trace.append(make_record(
            t + 1, new_f, [s.lam for s in states], new_f, graph, partitioned, loss, config.erm.c_r,
            noise_norm=[np.linalg.norm(o[1]) for o in out],
            alpha_hat=[q.alpha_hat for q in params], phi=[q.phi for q in params],
            zeta=[q.zeta for q in params]))
    return trace
