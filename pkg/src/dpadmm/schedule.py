"""Privacy-parameter schedules alpha_p(t)."""

from __future__ import annotations

from pathlib import Path

import numpy as np


class AlphaSchedule:
    """Per-node, per-round privacy parameters.

    Built from a scalar (constant), a 1-D sequence indexed by round, a 2-D
    array indexed ``[round, node - 1]`` or a callable ``(node, round)``.
    """

    def __init__(self, spec):
        if callable(spec):
            self._fn = spec
        else:
            arr = np.asarray(spec, dtype=float)
            if arr.ndim == 0:
                value = float(arr)
                self._fn = lambda p, t: value
            elif arr.ndim == 1:
                self._fn = lambda p, t: float(arr[t])
                self._len = len(arr)
            elif arr.ndim == 2:
                self._fn = lambda p, t: float(arr[t, p - 1])
                self._len = arr.shape[0]
            else:
                raise ValueError("alpha schedule must be scalar, 1-D or 2-D")
            if np.any(arr <= 0):
                raise ValueError("alpha values must be positive")

    def __call__(self, p: int, t: int) -> float:
        if hasattr(self, "_len") and t >= self._len:
            raise ValueError(f"alpha schedule has {self._len} rounds, round {t} requested")
        a = self._fn(p, t)
        if not a > 0:
            raise ValueError(f"alpha_{p}({t}) = {a} is not positive")
        return a

    def min_over(self, nodes, rounds) -> float:
        return min(self(p, t) for p in nodes for t in rounds)

    @classmethod
    def from_file(cls, path) -> "AlphaSchedule":
        """One alpha per line, line k giving round k; blank lines and ``#`` comments skipped."""
        values = []
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                values.append(float(line))
        return cls(values)


def as_schedule(spec) -> AlphaSchedule:
    return spec if isinstance(spec, AlphaSchedule) else AlphaSchedule(spec)
