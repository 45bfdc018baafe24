"""Sample-complexity calculators for the non-private and private algorithms.

Each calculator returns the number of local samples ``B_p`` above which the
released classifier is ``alpha_acc``-accurate with probability ``1 - delta``.
The constant ``beta`` is unknown in the analysis and defaults to 1, so the
values are only meaningful for comparing settings with each other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by all calculators.

    Attributes:
        norm_f0: Norm bound of the reference classifier.
        alpha_acc: Generalization slack in (0, 1].
        delta: Failure probability in (0, 1).
        c_b: Constant of the loss-gradient term in ``bound_pvp_full``;
            ``None`` uses ``c_r``.
    """

    norm_f0: float
    alpha_acc: float
    delta: float
    c_r: float = 1.0
    rho: float = 1.0
    eta: float = 1.0
    n_p: int = 1
    d: int = 1
    c1: float = 0.25
    beta: float = 1.0
    c_b: float | None = None

    def __post_init__(self):
        for name in ("norm_f0", "alpha_acc", "c_r", "rho", "eta", "n_p", "d", "c1", "beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.c_b is not None and not self.c_b > 0:
            raise ValueError("c_b must be positive")
        if self.alpha_acc > 1:
            warnings.warn("alpha_acc > 1 is outside the range of the accuracy analysis", stacklevel=3)

    @property
    def cb(self) -> float:
        return self.c_r if self.c_b is None else self.c_b


def _check_alpha(alpha_min):
    if not alpha_min > 0:
        raise ValueError("alpha_min must be positive")


def nonprivate_term(x: BoundInputs) -> float:
    # grouped so that exact inputs (e.g. delta = e^-1) give exact outputs
    return x.c_r * math.log(1 / x.delta) * (x.norm_f0 / x.alpha_acc) ** 2


def bound_nonprivate(x: BoundInputs) -> float:
    return x.beta * nonprivate_term(x)


def dvp_terms(x: BoundInputs, alpha_min: float) -> list[float]:
    _check_alpha(alpha_min)
    return [
        x.norm_f0 * x.d * math.log(x.d / x.delta) / (x.alpha_acc * alpha_min),
        x.c_r * x.c1 * x.norm_f0 ** 2 / (x.alpha_acc * alpha_min),
        nonprivate_term(x),
    ]


def bound_dvp(x: BoundInputs, alpha_min: float) -> float:
    """``alpha_min`` is the smallest privacy parameter in the schedule."""
    return x.beta * max(dvp_terms(x, alpha_min))


def pvp_intermediate_terms(x: BoundInputs, alpha_min: float) -> list[float]:
    _check_alpha(alpha_min)
    return [
        x.c_r * x.norm_f0 ** 3 * x.eta * x.n_p * x.d * math.log(x.d / x.delta)
        / (x.alpha_acc ** 2 * alpha_min),
        nonprivate_term(x),
    ]


def bound_pvp_intermediate(x: BoundInputs, alpha_min: float) -> float:
    return x.beta * max(pvp_intermediate_terms(x, alpha_min))


def pvp_full_terms(x: BoundInputs, alpha_min: float) -> list[float]:
    ln = math.log(x.d / x.delta)
    aa = x.alpha_acc
    return pvp_intermediate_terms(x, alpha_min) + [
        4 * x.cb * x.norm_f0 * x.d * ln ** 2 / (aa * alpha_min),
        4 * x.norm_f0 ** 3 * x.eta * x.n_p * x.d * ln / (aa ** 2 * alpha_min),
        4 * x.c_r ** 1.5 * x.norm_f0 ** 2 * x.d * ln / (aa ** 1.5 * alpha_min),
    ]


def bound_pvp_full(x: BoundInputs, alpha_min: float) -> float:
    return x.beta * max(pvp_full_terms(x, alpha_min))


def all_bounds(x: BoundInputs, alpha_min: float) -> dict[str, float]:
    return {
        "nonprivate": bound_nonprivate(x),
        "dvp": bound_dvp(x, alpha_min),
        "pvp_intermediate": bound_pvp_intermediate(x, alpha_min),
        "pvp_full": bound_pvp_full(x, alpha_min),
    }
