"""Monte Carlo checks of the high-probability objective-gap inequalities.

Each checker draws the mechanism's noise ``trials`` times on a fixed small
instance, solves the perturbed local problem, and counts how often the gap
stays below the analytic bound. A check passes when the observed frequency
is at least ``1 - delta`` minus two binomial standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import noise
from ..model import local_objective
from ..dvp import jacobian_log_ratio
from ..pvp import pvp_zeta
from ..solver import LocalProblem
from .instances import LocalInstance, random_instance

SOLVE_TOL = 1e-10


@dataclass(frozen=True)
class LemmaReport:
    name: str
    bound: float
    frequency: float
    threshold: float
    trials: int
    delta: float
    max_gap: float

    @property
    def passed(self) -> bool:
        return self.frequency >= self.threshold

    def as_dict(self) -> dict:
        return {"name": self.name, "bound": self.bound, "frequency": self.frequency,
                "pass": self.passed, "threshold": self.threshold, "trials": self.trials,
                "delta": self.delta, "max_gap": self.max_gap}


def pass_threshold(delta: float, trials: int) -> float:
    return 1.0 - delta - 2.0 * math.sqrt(delta * (1.0 - delta) / trials)


def _check_args(delta, trials):
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if trials < 1:
        raise ValueError("trials must be >= 1")


def _tilted_problem(inst: LocalInstance, linear) -> LocalProblem:
    """``Z_p(f) + linear @ f``."""
    return LocalProblem(inst.dataset, inst.loss, inst.reg, inst.erm, 0.0, np.asarray(linear, float))


def _unperturbed_minimizer(inst: LocalInstance) -> np.ndarray:
    return _tilted_problem(inst, np.zeros(inst.dim)).solve(None, SOLVE_TOL)


def _report(name, gaps, bound, delta, trials) -> LemmaReport:
    gaps = np.asarray(gaps)
    return LemmaReport(name, bound, float(np.mean(gaps <= bound)), pass_threshold(delta, trials),
                       trials, delta, float(gaps.max()))


def lemma8_bound(inst: LocalInstance, alpha: float, delta: float) -> float:
    d = inst.dim
    return 16 * d ** 2 * math.log(d / delta) ** 2 / (inst.rho * inst.b_p ** 2 * alpha ** 2)


def check_lemma8(instance: LocalInstance | None = None, alpha_hat: float = 0.5, delta: float = 0.05,
                 trials: int = 10_000, seed: int = 0) -> LemmaReport:
    """Objective gap of the dual-perturbed minimizer.

    The perturbed minimizer solves ``Z_p(f) + (C_R / B_p) eps @ f`` with
    ``eps`` at rate ``alpha_hat / 2``. The bound is stated in the privacy
    parameter ``alpha``, recovered as ``alpha_hat`` plus the Jacobian term.
    """
    _check_args(delta, trials)
    if not alpha_hat > 0:
        raise ValueError("the dual-perturbation gap bound needs alpha_hat > 0 (no extra ridge)")
    inst = instance or random_instance()
    alpha = alpha_hat + jacobian_log_ratio(inst.loss.c1, inst.b_p, inst.c_r, inst.rho, inst.eta,
                                           inst.n_p)
    f_star = _unperturbed_minimizer(inst)
    z_star = inst.objective(f_star)
    eps = noise.sample_noise_batch(inst.dim, alpha_hat / 2, trials,
                                   noise.stream(seed, 8, 0, noise.MONTE_CARLO))
    scale = inst.c_r / inst.b_p
    gaps = [inst.objective(_tilted_problem(inst, scale * e).solve(f_star, SOLVE_TOL)) - z_star
            for e in eps]
    return _report("lemma8", gaps, lemma8_bound(inst, alpha, delta), delta, trials)


def lemma11_bound(inst: LocalInstance, alpha: float, delta: float) -> float:
    d = inst.dim
    return (16 * inst.c_r ** 2 * inst.eta ** 2 * inst.n_p ** 2 * d ** 2 * math.log(d / delta) ** 2
            / (inst.rho ** 3 * inst.b_p ** 2 * alpha ** 2))


def primal_perturbed_objective(inst: LocalInstance, f, eps_own, eps_nbrs) -> float:
    """``Z_p(f) - eta * sum_i [(f - (f_p + f_i) / 2) @ e_pi + ||e_pi||^2 / 4]`` with ``e_pi = eps_p - eps_i``."""
    f = np.asarray(f, dtype=float)
    total = inst.objective(f)
    for fi, ei in zip(inst.f_nbrs, eps_nbrs):
        e_pi = eps_own - ei
        total -= inst.eta * (float((f - 0.5 * (inst.f_own + fi)) @ e_pi) + 0.25 * float(e_pi @ e_pi))
    return total


def _primal_perturbed_minimizer(inst, eps_own, eps_nbrs, x0):
    g = inst.eta * np.sum([eps_own - ei for ei in eps_nbrs], axis=0)
    return _tilted_problem(inst, -g).solve(x0, SOLVE_TOL)


def _pvp_draws(inst, alpha, trials, seed, node):
    zeta = pvp_zeta(inst.rho, inst.b_p, alpha, inst.c_r)
    return noise.sample_noise_batch(inst.dim, zeta, trials,
                                    noise.stream(seed, node, 0, noise.MONTE_CARLO))


def check_lemma11(instance: LocalInstance | None = None, alpha: float = 0.5, delta: float = 0.05,
                  trials: int = 10_000, seed: int = 0) -> LemmaReport:
    """Objective gap of the primal-perturbed minimizer; all nodes share ``alpha``."""
    _check_args(delta, trials)
    inst = instance or random_instance()
    f_star = _unperturbed_minimizer(inst)
    z_star = inst.objective(f_star)
    own = _pvp_draws(inst, alpha, trials, seed, 110)
    nbrs = [_pvp_draws(inst, alpha, trials, seed, 111 + i) for i in range(inst.n_p)]
    gaps = []
    for k in range(trials):
        f = _primal_perturbed_minimizer(inst, own[k], [e[k] for e in nbrs], f_star)
        gaps.append(inst.objective(f) - z_star)
    return _report("lemma11", gaps, lemma11_bound(inst, alpha, delta), delta, trials)


def lemma12_bound(inst: LocalInstance, alpha: float, delta: float) -> float:
    d = inst.dim
    return (4 * inst.c_r ** 2 * d ** 2 * (inst.rho * inst.reg.tau + inst.loss.c4_lipschitz * inst.c_r)
            * math.log(d / delta) ** 2 / (inst.rho ** 2 * inst.b_p ** 2 * alpha ** 2))


def check_lemma12(instance: LocalInstance | None = None, alpha: float = 0.5, delta: float = 0.05,
                  trials: int = 10_000, seed: int = 0) -> LemmaReport:
    """Cost of broadcasting ``V = f* + eps`` instead of the primal-perturbed minimizer ``f*``.

    ``eps`` is a fresh draw, as in the broadcast step.
    """
    _check_args(delta, trials)
    inst = instance or random_instance()
    f_star = _unperturbed_minimizer(inst)
    prev = _pvp_draws(inst, alpha, trials, seed, 120)
    nbrs = [_pvp_draws(inst, alpha, trials, seed, 121 + i) for i in range(inst.n_p)]
    fresh = _pvp_draws(inst, alpha, trials, seed, 130)
    gaps = []
    for k in range(trials):
        eps_nbrs = [e[k] for e in nbrs]
        f = _primal_perturbed_minimizer(inst, prev[k], eps_nbrs, f_star)
        v = f + fresh[k]
        gaps.append(primal_perturbed_objective(inst, v, prev[k], eps_nbrs)
                    - primal_perturbed_objective(inst, f, prev[k], eps_nbrs))
    return _report("lemma12", gaps, lemma12_bound(inst, alpha, delta), delta, trials)


class NotConvergedError(ValueError):
    pass


def network_objective(f, partitioned, loss, reg, params) -> float:
    """``sum_p Z_p(f_p)`` with each node evaluated at its own classifier."""
    return float(sum(local_objective(f[k], ds, loss, reg, params) for k, ds in enumerate(partitioned)))


def measure_gap(trace, t: int, partitioned, loss, reg, params, tol: float = 1e-4) -> float:
    """Network objective at ``f(t)`` minus its value at the final iterate.

    Raises:
        NotConvergedError: if the final consensus residual exceeds ``tol``.
    """
    if not trace.records:
        raise NotConvergedError("empty trace")
    if trace.records[-1].residual > tol:
        raise NotConvergedError(f"final residual {trace.records[-1].residual:.3e} exceeds {tol:g}")
    if not 0 <= t <= len(trace):
        raise IndexError(f"t = {t} outside [0, {len(trace)}]")
    return (network_objective(trace.state_at(t), partitioned, loss, reg, params)
            - network_objective(trace.final(), partitioned, loss, reg, params))


__all__ = ["LemmaReport", "check_lemma8", "check_lemma11", "check_lemma12", "measure_gap",
           "pass_threshold"]
