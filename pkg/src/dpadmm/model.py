"""Losses, regularizers and the regularized ERM objectives.

A loss acts on the scalar margin ``z = y * f @ x``. The local objective of
node p is

    Z_p(f) = (C_R / B_p) * sum_i L(y_i f @ x_i) + rho * R(f).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class LossModel:
    name: str
    value: Callable[[np.ndarray], np.ndarray]
    first_derivative: Callable[[np.ndarray], np.ndarray]
    second_derivative: Callable[[np.ndarray], np.ndarray]
    c1: float
    c4_lipschitz: float


@dataclass(frozen=True)
class Regularizer:
    name: str
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    # bound on the spectral norm of the Hessian
    tau: float = 1.0


@dataclass(frozen=True)
class ErmParams:
    c_r: float
    rho: float

    def __post_init__(self):
        if self.c_r < 0:
            raise ValueError("c_r must be nonnegative")
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    def check_dataset(self, size: int) -> None:
        if self.c_r > size:
            raise ValueError(f"C_R = {self.c_r} exceeds B_p = {size}")


def _logistic_value(z):
    return np.logaddexp(0.0, -np.asarray(z, dtype=float))


def _logistic_d1(z):
    return -expit(-np.asarray(z, dtype=float))


def _logistic_d2(z):
    z = np.asarray(z, dtype=float)
    return expit(z) * expit(-z)


def logistic_loss() -> LossModel:
    """``L(z) = log(1 + exp(-z))`` with ``|L''| <= 1/4``."""
    return LossModel("logistic", _logistic_value, _logistic_d1, _logistic_d2,
                     c1=0.25, c4_lipschitz=0.25)


def l2_regularizer() -> Regularizer:
    return Regularizer(
        "l2",
        value=lambda f: 0.5 * float(np.dot(f, f)),
        gradient=lambda f: np.array(f, dtype=float),
        hessian=lambda f: np.eye(len(f)),
        tau=1.0,
    )


LOSSES = {"logistic": logistic_loss}
REGULARIZERS = {"l2": l2_regularizer}


def get_loss(name: str) -> LossModel:
    try:
        return LOSSES[name]()
    except KeyError:
        raise ValueError(f"unknown loss {name!r}") from None


def get_regularizer(name: str) -> Regularizer:
    try:
        return REGULARIZERS[name]()
    except KeyError:
        raise ValueError(f"unknown regularizer {name!r}") from None


def _check_dim(f, dataset):
    f = np.asarray(f, dtype=float)
    if f.shape != (dataset.dim,):
        raise DimensionError(f"classifier has shape {f.shape}, data dimension is {dataset.dim}")
    return f


def empirical_loss(f, dataset, loss: LossModel, c_r: float) -> float:
    """``(C_R / B_p) * sum_i L(y_i f @ x_i)``."""
    f = _check_dim(f, dataset)
    z = dataset.margins_matrix @ f
    return c_r / len(dataset) * float(np.sum(loss.value(z)))


def empirical_gradient(f, dataset, loss: LossModel, c_r: float) -> np.ndarray:
    f = _check_dim(f, dataset)
    A = dataset.margins_matrix
    return c_r / len(dataset) * (A.T @ loss.first_derivative(A @ f))


def empirical_hessian(f, dataset, loss: LossModel, c_r: float) -> np.ndarray:
    f = _check_dim(f, dataset)
    A = dataset.margins_matrix
    w = loss.second_derivative(A @ f)
    return c_r / len(dataset) * (A.T * w) @ A


def local_objective(f, dataset, loss: LossModel, reg: Regularizer, params: ErmParams) -> float:
    f = _check_dim(f, dataset)
    return empirical_loss(f, dataset, loss, params.c_r) + params.rho * reg.value(f)


def local_gradient(f, dataset, loss: LossModel, reg: Regularizer, params: ErmParams) -> np.ndarray:
    f = _check_dim(f, dataset)
    return empirical_gradient(f, dataset, loss, params.c_r) + params.rho * reg.gradient(f)


def local_hessian(f, dataset, loss: LossModel, reg: Regularizer, params: ErmParams) -> np.ndarray:
    f = _check_dim(f, dataset)
    return empirical_hessian(f, dataset, loss, params.c_r) + params.rho * reg.hessian(f)


def _balanced_size(partitioned) -> int:
    sizes = set(partitioned.sizes)
    if len(sizes) != 1:
        raise ValueError(f"centralized objective needs equal node sample counts, got {sorted(sizes)}")
    return sizes.pop()


def centralized_objective(f, partitioned, loss: LossModel, reg: Regularizer, params: ErmParams,
                          per_node_reg: bool = False) -> float:
    """Network-wide objective ``(C_R / B) * sum_p sum_i L + rho * R(f)``.

    With ``per_node_reg=True`` the regularizer is counted once per node,
    i.e. the consensus problem ``sum_p Z_p(f)`` whose minimizer is the
    fixed point of the distributed iteration.
    """
    _balanced_size(partitioned)
    f = np.asarray(f, dtype=float)
    emp = sum(empirical_loss(f, d, loss, params.c_r) for d in partitioned)
    copies = partitioned.node_count if per_node_reg else 1
    return emp + copies * params.rho * reg.value(f)


def centralized_gradient(f, partitioned, loss, reg, params, per_node_reg: bool = False) -> np.ndarray:
    _balanced_size(partitioned)
    f = np.asarray(f, dtype=float)
    g = sum(empirical_gradient(f, d, loss, params.c_r) for d in partitioned)
    copies = partitioned.node_count if per_node_reg else 1
    return g + copies * params.rho * reg.gradient(f)


def centralized_hessian(f, partitioned, loss, reg, params, per_node_reg: bool = False) -> np.ndarray:
    _balanced_size(partitioned)
    f = np.asarray(f, dtype=float)
    H = sum(empirical_hessian(f, d, loss, params.c_r) for d in partitioned)
    copies = partitioned.node_count if per_node_reg else 1
    return H + copies * params.rho * reg.hessian(f)
