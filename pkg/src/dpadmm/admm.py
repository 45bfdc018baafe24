"""Consensus ADMM for distributed regularized ERM (non-private baseline).

Each synchronous round t -> t+1 runs three phases separated by barriers:
every node minimizes its augmented Lagrangian against the neighbor values
broadcast in round t, every node broadcasts, then every node updates its
dual variable from the round t+1 broadcasts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import model, noise
from .solver import SolverError, consensus_problem, newton
from .trace import RoundRecord, RunTrace


@dataclass
class NodeState:
    f: np.ndarray
    lam: np.ndarray
    mu: np.ndarray | None = None
    v: np.ndarray | None = None
    last_noise: np.ndarray | None = None

    def __post_init__(self):
        d = len(self.f)
        for name in ("lam", "mu", "v", "last_noise"):
            val = getattr(self, name)
            if val is not None and np.shape(val) != (d,):
                raise model.DimensionError(f"{name} has shape {np.shape(val)}, expected ({d},)")


@dataclass
class AdmmConfig:
    erm: model.ErmParams
    eta: float = 1.0
    max_iters: int = 100
    inner_tol: float = 1e-8
    init_scale: float = 0.01
    max_inner_iters: int = 200
    workers: int = 1

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.inner_tol > 0:
            raise ValueError("inner_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def initial_states(node_count: int, dim: int, seed: int, init_scale: float = 0.01) -> list[NodeState]:
    """Random small classifiers from each node's init stream and zero duals."""
    states = []
    for p in range(1, node_count + 1):
        rng = noise.stream(seed, p, 0, noise.INIT)
        states.append(NodeState(f=init_scale * rng.standard_normal(dim), lam=np.zeros(dim),
                                last_noise=np.zeros(dim)))
    return states


def map_nodes(fn, nodes, workers: int = 1) -> list:
    if workers <= 1:
        return [fn(p) for p in nodes]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, nodes))


def nonprivate_lagrangian(state: NodeState, neighbor_primal_snapshot, dataset, loss, reg, config: AdmmConfig):
    anchors = [0.5 * (state.f + np.asarray(fi, dtype=float)) for fi in neighbor_primal_snapshot]
    return consensus_problem(dataset, loss, reg, config.erm, config.eta, anchors,
                             linear_extra=2.0 * state.lam)


def primal_update_nonprivate(state: NodeState, neighbor_primal_snapshot, dataset, loss, reg,
                             config: AdmmConfig) -> np.ndarray:
    """Minimize ``L^N`` warm-started at the node's current classifier."""
    problem = nonprivate_lagrangian(state, neighbor_primal_snapshot, dataset, loss, reg, config)
    return problem.solve(state.f, config.inner_tol, config.max_inner_iters)


def dual_update(lam, own_f_new, neighbor_f_new, eta: float) -> np.ndarray:
    """``lam + (eta / 2) * sum_j (f_p - f_j)``."""
    lam = np.asarray(lam, dtype=float)
    own = np.asarray(own_f_new, dtype=float)
    if own.shape != lam.shape:
        raise model.DimensionError("dual and primal dimensions differ")
    gap = np.zeros_like(lam)
    for fj in neighbor_f_new:
        fj = np.asarray(fj, dtype=float)
        if fj.shape != lam.shape:
            raise model.DimensionError("neighbor dimension differs")
        gap += own - fj
    return lam + 0.5 * eta * gap


def consensus_residual(f, graph) -> float:
    """Largest ``||f_p - f_j||`` over the graph's edges (0 without edges)."""
    if isinstance(f, (list, tuple)) and f and isinstance(f[0], NodeState):
        f = [s.f for s in f]
    f = np.asarray(f, dtype=float)
    if not graph.edges:
        return 0.0
    return max(float(np.linalg.norm(f[p - 1] - f[j - 1])) for p, j in graph.edges)


def centralized_solve(partitioned, loss, reg, params: model.ErmParams, tol: float = 1e-10,
                      per_node_reg: bool = False, x0=None, max_iter: int = 200) -> np.ndarray:
    """Damped Newton on the network-wide objective (see ``model.centralized_objective``)."""
    args = (partitioned, loss, reg, params, per_node_reg)
    x0 = np.zeros(partitioned.dim) if x0 is None else x0
    return newton(lambda f: model.centralized_objective(f, *args),
                  lambda f: model.centralized_gradient(f, *args),
                  lambda f: model.centralized_hessian(f, *args), x0, tol, max_iter)


def node_empirical_losses(f, partitioned, loss, c_r) -> np.ndarray:
    return np.array([model.empirical_loss(f[k], d, loss, c_r) for k, d in enumerate(partitioned)])


def make_record(iteration, f, lam, broadcast, graph, partitioned, loss, c_r, *, noise_norm=None,
                alpha_hat=None, phi=None, zeta=None, v_norm=None, is_final=False) -> RoundRecord:
    P = graph.node_count
    nan = np.full(P, np.nan)

    def arr(x):
        return nan.copy() if x is None else np.asarray(x, dtype=float)

    f = np.array(f)
    return RoundRecord(
        iteration=iteration, f=f, lam=np.array(lam), broadcast=np.array(broadcast),
        residual=consensus_residual(f, graph),
        empirical_loss=node_empirical_losses(f, partitioned, loss, c_r),
        noise_norm=arr(noise_norm), alpha_hat=arr(alpha_hat), phi=arr(phi), zeta=arr(zeta),
        v_norm=arr(v_norm), is_final=is_final,
    )


def check_inputs(partitioned, graph, config: AdmmConfig) -> None:
    from .network import is_connected
    if partitioned.node_count != graph.node_count:
        raise ValueError(f"{partitioned.node_count} datasets for {graph.node_count} nodes")
    if not is_connected(graph):
        raise ValueError("graph is disconnected")


def run_nonprivate(partitioned, graph, loss, reg, config: AdmmConfig, seed: int = 0) -> RunTrace:
    """Consensus ADMM without perturbation; returns the full per-round trace."""
    check_inputs(partitioned, graph, config)
    P, d = graph.node_count, partitioned.dim
    states = initial_states(P, d, seed, config.init_scale)
    trace = RunTrace("none", P, d, np.array([s.f for s in states]))
    for t in range(config.max_iters):
        snapshot = [s.f.copy() for s in states]

        def primal(p):
            try:
                return primal_update_nonprivate(
                    states[p - 1], [snapshot[i - 1] for i in graph.sorted_neighbors(p)],
                    partitioned[p], loss, reg, config)
            except SolverError as exc:
                raise SolverError(f"node {p}, iteration {t}: {exc}") from exc

        new_f = map_nodes(primal, graph.nodes, config.workers)
        for p in graph.nodes:
            states[p - 1].f = new_f[p - 1]
        for p in graph.nodes:
            states[p - 1].lam = dual_update(states[p - 1].lam, new_f[p - 1],
                                            [new_f[j - 1] for j in graph.sorted_neighbors(p)],
                                            config.eta)
        trace.append(make_record(t + 1, new_f, [s.lam for s in states], new_f, graph,
                                 partitioned, loss, config.erm.c_r))
    return trace
