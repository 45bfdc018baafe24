"""Per-round records of a distributed run and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCALAR_COLUMNS = ["residual", "empirical_loss", "noise_norm", "alpha_hat", "phi", "zeta",
                  "v_norm"]


@dataclass
class RoundRecord:
    """State after round ``iteration`` (the values indexed t+1 in the update rules).

    Per-node arrays have a leading axis of length P in node order.
    ``broadcast`` is exactly what each node sent to its neighbors.
    """

    iteration: int
    f: np.ndarray
    lam: np.ndarray
    broadcast: np.ndarray
    residual: float
    empirical_loss: np.ndarray
    noise_norm: np.ndarray
    alpha_hat: np.ndarray
    phi: np.ndarray
    zeta: np.ndarray
    v_norm: np.ndarray
    is_final: bool = False


def _nan(P):
    return np.full(P, np.nan)


@dataclass
class RunTrace:
    mechanism: str
    node_count: int
    dim: int
    f0: np.ndarray
    records: list = field(default_factory=list)

    def append(self, record: RoundRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise ValueError("trace records must be appended in iteration order")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, k):
        return self.records[k]

    @property
    def f(self) -> np.ndarray:
        """Classifiers, shape (T, P, d); row k is the state after round k + 1."""
        return np.array([r.f for r in self.records])

    @property
    def lam(self) -> np.ndarray:
        return np.array([r.lam for r in self.records])

    @property
    def broadcast(self) -> np.ndarray:
        return np.array([r.broadcast for r in self.records])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])

    @property
    def empirical_losses(self) -> np.ndarray:
        """Shape (T, P)."""
        return np.array([r.empirical_loss for r in self.records])

    @property
    def noise_norms(self) -> np.ndarray:
        return np.array([r.noise_norm for r in self.records])

    def state_at(self, t: int) -> np.ndarray:
        """Classifiers f(t): ``f0`` for t = 0, else the state after round t."""
        if t == 0:
            return self.f0
        return self.records[t - 1].f

    def final(self) -> np.ndarray:
        return self.records[-1].f if self.records else self.f0

    # CSV ------------------------------------------------------------------

    def header(self) -> list[str]:
        d = self.dim
        return (["iteration", "node"] + SCALAR_COLUMNS + ["is_final_iteration"]
                + [f"f_{k}" for k in range(d)] + [f"lambda_{k}" for k in range(d)]
                + [f"broadcast_{k}" for k in range(d)])

    def to_csv(self, path=None) -> str:
        """One row per node per round; the initial classifiers go in iteration-0 rows."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["# mechanism", self.mechanism, "nodes", self.node_count, "dim", self.dim])
        w.writerow(self.header())
        P, d = self.node_count, self.dim
        for p in range(P):
            row = [0, p + 1] + ["nan"] * len(SCALAR_COLUMNS) + [0]
            row += [repr(float(v)) for v in self.f0[p]] + ["nan"] * (2 * d)
            w.writerow(row)
        for r in self.records:
            for p in range(P):
                row = [r.iteration, p + 1, repr(float(r.residual))]
                row += [repr(float(getattr(r, c)[p])) for c in SCALAR_COLUMNS[1:]]
                row += [int(r.is_final)]
                row += [repr(float(v)) for v in r.f[p]]
                row += [repr(float(v)) for v in r.lam[p]]
                row += [repr(float(v)) for v in r.broadcast[p]]
                w.writerow(row)
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def load(cls, path) -> "RunTrace":
        return cls.from_csv(Path(path).read_text())

    @classmethod
    def from_csv(cls, text: str) -> "RunTrace":
        rows = list(csv.reader(io.StringIO(text)))
        meta = rows[0]
        mechanism, P, d = meta[1], int(meta[3]), int(meta[5])
        header = rows[1]
        col = {name: i for i, name in enumerate(header)}
        body = rows[2:]
        f0 = np.zeros((P, d))
        by_iter: dict[int, list] = {}
        for row in body:
            it, p = int(row[0]), int(row[1])
            if it == 0:
                f0[p - 1] = [float(row[col[f"f_{k}"]]) for k in range(d)]
            else:
                by_iter.setdefault(it, []).append(row)
        trace = cls(mechanism, P, d, f0)
        for it in sorted(by_iter):
            rs = sorted(by_iter[it], key=lambda r: int(r[1]))

            def vec(prefix):
                return np.array([[float(r[col[f"{prefix}_{k}"]]) for k in range(d)] for r in rs])

            def per_node(name):
                return np.array([float(r[col[name]]) for r in rs])

            trace.append(RoundRecord(
                iteration=it, f=vec("f"), lam=vec("lambda"), broadcast=vec("broadcast"),
                residual=float(rs[0][col["residual"]]),
                empirical_loss=per_node("empirical_loss"), noise_norm=per_node("noise_norm"),
                alpha_hat=per_node("alpha_hat"), phi=per_node("phi"), zeta=per_node("zeta"),
                v_norm=per_node("v_norm"), is_final=bool(int(rs[0][col["is_final_iteration"]])),
            ))
        return trace

    def equals(self, other: "RunTrace") -> bool:
        if (self.mechanism, self.node_count, self.dim) != (other.mechanism, other.node_count, other.dim):
            return False
        if not np.array_equal(self.f0, other.f0) or len(self) != len(other):
            return False
        for a, b in zip(self.records, other.records):
            if a.iteration != b.iteration or a.is_final != b.is_final:
                return False
            if not np.array_equal(a.residual, b.residual, equal_nan=True):
                return False
            for name in ("f", "lam", "broadcast", "empirical_loss", "noise_norm", "alpha_hat",
                         "phi", "zeta", "v_norm"):
                if not np.array_equal(getattr(a, name), getattr(b, name), equal_nan=True):
                    return False
        return True
