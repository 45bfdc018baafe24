"""Damped Newton minimization of the per-node augmented Lagrangians.

Every node subproblem in the three algorithms has the form

    F(f) = (C_R / B) sum_i L(y_i f @ x_i) + rho R(f)
           + (quad / 2) ||f||^2 + linear @ f + const,

so one solver covers the non-private, dual-perturbed and primal-perturbed
updates; only ``quad``, ``linear`` and ``const`` change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model

ARMIJO = 1e-4
UNRESOLVED = 1e-10


class SolverError(RuntimeError):
    pass


def newton(value, gradient, hessian, x0, tol: float = 1e-8, max_iter: int = 200) -> np.ndarray:
    """Minimize a smooth strongly convex function until ``||grad|| <= tol``.

    Steps are Newton directions with Armijo backtracking; a failed Cholesky
    factorization falls back to the steepest-descent direction.
    """
    x = np.array(x0, dtype=float)
    F = value(x)
    for _ in range(max_iter):
        g = gradient(x)
        gnorm = np.linalg.norm(g)
        if gnorm <= tol:
            return x
        try:
            L = np.linalg.cholesky(hessian(x))
            step = -np.linalg.solve(L.T, np.linalg.solve(L, g))
        except np.linalg.LinAlgError:
            step = -g
        slope = float(g @ step)
        if not slope < 0:
            step, slope = -g, -float(g @ g)
        # F is a sum of large canceling terms (expanded penalties, noisy duals), so
        # near the minimum the predicted decrease drops below its rounding error;
        # there the gradient norm is the only usable merit function
        unresolved = -slope < UNRESOLVED * max(abs(F), 1.0)
        t = 1.0
        while True:
            x_new = x + t * step
            F_new = value(x_new)
            if F_new <= F + ARMIJO * t * slope:
                break
            if unresolved and np.linalg.norm(gradient(x_new)) < gnorm:
                break
            t *= 0.5
            if t < 1e-14:
                raise SolverError(f"line search stalled at gradient norm {gnorm:.3e}")
        x, F = x_new, F_new
    gnorm = np.linalg.norm(gradient(x))
    if gnorm <= tol:
        return x
    raise SolverError(f"no convergence in {max_iter} iterations (gradient norm {gnorm:.3e})")


@dataclass
class LocalProblem:
    dataset: object
    loss: model.LossModel
    reg: model.Regularizer
    params: model.ErmParams
    quad: float
    linear: np.ndarray
    const: float = 0.0

    def value(self, f) -> float:
        f = np.asarray(f, dtype=float)
        return (model.local_objective(f, self.dataset, self.loss, self.reg, self.params)
                + 0.5 * self.quad * float(f @ f) + float(self.linear @ f) + self.const)

    def gradient(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return (model.local_gradient(f, self.dataset, self.loss, self.reg, self.params)
                + self.quad * f + self.linear)

    def hessian(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        H = model.local_hessian(f, self.dataset, self.loss, self.reg, self.params)
        H[np.diag_indices_from(H)] += self.quad
        return H

    def solve(self, x0=None, tol: float = 1e-8, max_iter: int = 200) -> np.ndarray:
        if x0 is None:
            x0 = np.zeros(self.dataset.dim)
        return newton(self.value, self.gradient, self.hessian, x0, tol, max_iter)


def consensus_problem(dataset, loss, reg, params, eta: float, anchors, linear_extra=None,
                      extra_quad: float = 0.0) -> LocalProblem:
    """Lagrangian with penalty ``eta * sum_i ||f - a_i||^2`` over the anchors ``a_i``.

    ``linear_extra`` is the dual term (``2 * lambda`` or ``2 * mu``) and
    ``extra_quad`` adds ``(extra_quad / 2) ||f||^2``.
    """
    d = dataset.dim
    anchors = [np.asarray(a, dtype=float) for a in anchors]
    for a in anchors:
        if a.shape != (d,):
            raise model.DimensionError(f"anchor shape {a.shape} != ({d},)")
    n = len(anchors)
    asum = np.sum(anchors, axis=0) if n else np.zeros(d)
    lin = np.zeros(d) if linear_extra is None else np.asarray(linear_extra, dtype=float).copy()
    if lin.shape != (d,):
        raise model.DimensionError(f"dual term shape {lin.shape} != ({d},)")
    lin -= 2.0 * eta * asum
    const = eta * float(sum(a @ a for a in anchors))
    return LocalProblem(dataset, loss, reg, params, extra_quad + 2.0 * eta * n, lin, const)
