"""Single-node problem instances for the lemma checkers and the privacy auditor."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .. import model
from ..data import DataPoint, NodeDataset, neighboring_dataset, synthetic_dataset


@dataclass(frozen=True)
class LocalInstance:
    """One node at one round: its data, hyperparameters and the state at round t.

    Attributes:
        f_own: The node's classifier f_p(t).
        f_nbrs: Neighbor classifiers f_i(t), shape (N_p, d).
        lam: The node's dual variable at round t.
    """

    dataset: NodeDataset
    c_r: float
    rho: float
    eta: float
    f_own: np.ndarray
    f_nbrs: np.ndarray
    lam: np.ndarray
    loss: model.LossModel = model.logistic_loss()
    reg: model.Regularizer = model.l2_regularizer()

    @property
    def dim(self) -> int:
        return self.dataset.dim

    @property
    def b_p(self) -> int:
        return len(self.dataset)

    @property
    def n_p(self) -> int:
        return len(self.f_nbrs)

    @property
    def erm(self) -> model.ErmParams:
        return model.ErmParams(self.c_r, self.rho)

    def objective(self, f) -> float:
        """Regularized empirical risk ``Z_p``."""
        return model.local_objective(f, self.dataset, self.loss, self.reg, self.erm)

    def with_point(self, index: int, replacement: DataPoint) -> "LocalInstance":
        return replace(self, dataset=neighboring_dataset(self.dataset, index, replacement))


def random_instance(seed: int = 0, dim: int = 3, b_p: int = 50, n_p: int = 2, c_r: float = 1.0,
                    rho: float = 0.1, eta: float = 1.0, state_scale: float = 0.1) -> LocalInstance:
    """Synthetic node data with a small random round-t state."""
    data = synthetic_dataset(b_p, dim, seed=seed, separable=False)
    rng = np.random.default_rng([seed, 1])
    return LocalInstance(
        dataset=NodeDataset(data.X, data.y, 1), c_r=c_r, rho=rho, eta=eta,
        f_own=state_scale * rng.standard_normal(dim),
        f_nbrs=state_scale * rng.standard_normal((n_p, dim)),
        lam=state_scale * rng.standard_normal(dim),
    )
