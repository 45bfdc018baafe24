"""Datasets: loading, normalization, partitioning across nodes, neighbors.

Features are kept as dense ``(B, d)`` float arrays and labels as ``(B,)``
integer arrays in {-1, +1}.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12


class DataError(ValueError):
    """Raised for malformed datasets or invalid dataset operations."""


class ParseError(DataError):
    pass


class LabelError(DataError):
    pass


@dataclass(frozen=True)
class DataPoint:
    x: np.ndarray
    y: int

    def validate(self) -> None:
        if self.y not in (-1, 1):
            raise DataError(f"label must be -1 or +1, got {self.y!r}")
        if np.linalg.norm(self.x) > 1.0 + NORM_TOL:
            raise DataError(f"feature norm {np.linalg.norm(self.x):.6g} exceeds 1")

    def __eq__(self, other):
        if not isinstance(other, DataPoint):
            return NotImplemented
        return self.y == other.y and np.array_equal(self.x, other.x)

    def __hash__(self):
        return hash((self.y, np.asarray(self.x, dtype=float).tobytes()))


@dataclass
class Dataset:
    """A labelled sample before it is split across nodes.

    ``scale`` is the factor the raw features were divided by (1.0 if the
    features were never rescaled); ``raw_max_norm`` is the largest raw
    feature norm seen at load time.
    """

    X: np.ndarray
    y: np.ndarray
    raw_max_norm: float = 0.0
    scale: float = 1.0
    label_map: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=int).reshape(-1)
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("feature and label counts differ")
        if self.raw_max_norm == 0.0 and len(self.y):
            self.raw_max_norm = float(np.linalg.norm(self.X, axis=1).max())

    def __len__(self):
        return len(self.y)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def points(self) -> list[DataPoint]:
        return [DataPoint(self.X[i].copy(), int(self.y[i])) for i in range(len(self))]


@dataclass
class NodeDataset:
    """The local sample held by one node (ids are 1-based)."""

    X: np.ndarray
    y: np.ndarray
    node_id: int = 1

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=int).reshape(-1)
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("feature and label counts differ")
        if len(self.y) < 1:
            raise DataError("a node dataset needs at least one point")
        if not np.all(np.isin(self.y, (-1, 1))):
            raise DataError("labels must be in {-1, +1}")
        if np.linalg.norm(self.X, axis=1).max() > 1.0 + NORM_TOL:
            raise DataError("feature vectors must satisfy ||x|| <= 1")

    @classmethod
    def from_points(cls, points: Sequence[DataPoint], node_id: int = 1) -> "NodeDataset":
        X = np.array([p.x for p in points], dtype=float)
        y = np.array([p.y for p in points], dtype=int)
        return cls(X, y, node_id)

    def __len__(self):
        return len(self.y)

    @property
    def size(self) -> int:
        return len(self.y)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def margins_matrix(self) -> np.ndarray:
        """Rows ``y_i * x_i``; margins are ``margins_matrix @ f``."""
        return self.y[:, None] * self.X

    def points(self) -> list[DataPoint]:
        return [DataPoint(self.X[i].copy(), int(self.y[i])) for i in range(len(self))]

    def point(self, i: int) -> DataPoint:
        return DataPoint(self.X[i].copy(), int(self.y[i]))


@dataclass
class PartitionedDataset:
    per_node: list[NodeDataset]

    def __len__(self):
        return len(self.per_node)

    def __getitem__(self, p: int) -> NodeDataset:
        """Node ``p`` (1-based)."""
        return self.per_node[p - 1]

    def __iter__(self):
        return iter(self.per_node)

    @property
    def node_count(self) -> int:
        return len(self.per_node)

    @property
    def dim(self) -> int:
        return self.per_node[0].dim

    @property
    def sizes(self) -> list[int]:
        return [len(d) for d in self.per_node]

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        X = np.vstack([d.X for d in self.per_node])
        y = np.concatenate([d.y for d in self.per_node])
        return X, y


def _map_labels(raw: list[str]) -> tuple[np.ndarray, dict]:
    distinct = sorted(set(raw))
    if len(distinct) > 2:
        raise LabelError(f"expected binary labels, found {len(distinct)}: {distinct[:5]}")
    try:
        order = sorted(distinct, key=float)
        numeric = True
    except ValueError:
        order, numeric = distinct, False
    if len(order) == 2:
        mapping = {order[0]: -1, order[1]: 1}
    else:
        # a lone positive numeric label stays +1
        mapping = {order[0]: 1 if numeric and float(order[0]) > 0 else -1}
    return np.array([mapping[r] for r in raw], dtype=int), mapping


def _load_csv(path: Path) -> tuple[np.ndarray, list[str]]:
    rows, labels = [], []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ParseError(f"{path}:{lineno}: need at least one feature and a label")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
            try:
                rows.append([float(c) for c in row[:-1]])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            labels.append(row[-1].strip())
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows, dtype=float), labels


def _load_libsvm(path: Path) -> tuple[np.ndarray, list[str]]:
    entries, labels = [], []
    dim = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            label, *items = line.split()
            feats = {}
            for item in items:
                try:
                    idx, val = item.split(":")
                    idx, val = int(idx), float(val)
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad item {item!r}") from None
                if idx < 1:
                    raise ParseError(f"{path}:{lineno}: indices are 1-based, got {idx}")
                feats[idx] = val
                dim = max(dim, idx)
            entries.append(feats)
            labels.append(label)
    if not entries:
        raise ParseError(f"{path}: no data rows")
    X = np.zeros((len(entries), max(dim, 1)))
    for i, feats in enumerate(entries):
        for idx, val in feats.items():
            X[i, idx - 1] = val
    return X, labels


def load_dataset(path, format: str = "csv") -> Dataset:
    """Read a binary classification file.

    CSV rows are ``x_1,...,x_d,label``; LIBSVM rows are
    ``label idx:val ...`` with 1-based indices. The smaller of the two raw
    labels (numerically when both parse as numbers, else as strings) maps
    to -1. Features are returned unscaled.
    """
    path = Path(path)
    if format == "csv":
        X, raw = _load_csv(path)
    elif format == "libsvm":
        X, raw = _load_libsvm(path)
    else:
        raise ValueError(f"unknown format {format!r}")
    y, mapping = _map_labels(raw)
    return Dataset(X, y, label_map=mapping)


def normalize(data: Dataset) -> Dataset:
    """Divide every feature vector by the global max norm when it exceeds 1."""
    if len(data) == 0:
        raise DataError("cannot normalize an empty dataset")
    max_norm = float(np.linalg.norm(data.X, axis=1).max())
    if max_norm <= 1.0:
        return Dataset(data.X.copy(), data.y.copy(), data.raw_max_norm, data.scale, dict(data.label_map))
    X = data.X / max_norm
    # guard against 1 + ulp after division
    over = np.linalg.norm(X, axis=1) > 1.0
    if over.any():
        X[over] /= np.linalg.norm(X[over], axis=1)[:, None]
    return Dataset(X, data.y.copy(), data.raw_max_norm, data.scale * max_norm, dict(data.label_map))


def partition(data: Dataset, graph, strategy: str = "even", seed: int = 0,
              weights: Sequence[float] | None = None) -> PartitionedDataset:
    """Shuffle with ``seed`` and split the sample over the graph's nodes."""
    P = graph.node_count if hasattr(graph, "node_count") else int(graph)
    n = len(data)
    if n < P:
        raise DataError(f"{n} points cannot cover {P} nodes")
    perm = np.random.default_rng(seed).permutation(n)
    if strategy == "even":
        chunks = np.array_split(perm, P)
    elif strategy == "by_weights":
        if weights is None or len(weights) != P:
            raise DataError("by_weights needs one weight per node")
        w = np.asarray(weights, dtype=float)
        if np.any(w <= 0):
            raise DataError("weights must be positive")
        # one point per node up front, the rest by largest remainder
        quota = (n - P) * w / w.sum()
        extra = np.floor(quota).astype(int)
        short = (n - P) - extra.sum()
        extra[np.argsort(-(quota - extra), kind="stable")[:short]] += 1
        bounds = np.cumsum(np.concatenate([[0], extra + 1]))
        chunks = [perm[bounds[k]:bounds[k + 1]] for k in range(P)]
    else:
        raise ValueError(f"unknown partition strategy {strategy!r}")
    return PartitionedDataset([
        NodeDataset(data.X[idx], data.y[idx], node_id=k + 1) for k, idx in enumerate(chunks)
    ])


def neighboring_dataset(dataset: NodeDataset, index: int, replacement: DataPoint) -> NodeDataset:
    """Copy of ``dataset`` with the point at ``index`` replaced."""
    if not 0 <= index < len(dataset):
        raise IndexError(f"index {index} out of range for {len(dataset)} points")
    replacement.validate()
    x = np.asarray(replacement.x, dtype=float)
    if x.shape != (dataset.dim,):
        raise DataError(f"replacement has dimension {x.shape}, expected ({dataset.dim},)")
    X = dataset.X.copy()
    y = dataset.y.copy()
    X[index] = x
    y[index] = replacement.y
    return NodeDataset(X, y, dataset.node_id)


def hamming_distance(a: NodeDataset, b: NodeDataset) -> int:
    if len(a) != len(b):
        raise DataError(f"size mismatch: {len(a)} vs {len(b)}")
    differ = np.any(a.X != b.X, axis=1) | (a.y != b.y)
    return int(differ.sum())


def synthetic_dataset(n: int, dim: int, seed: int = 0, separable: bool = True,
                      flip_prob: float = 0.1, margin: float = 0.0) -> Dataset:
    """Gaussian features labelled by a random hyperplane, normalized to the unit ball.

    With ``separable=False`` each label is flipped with probability
    ``flip_prob``. ``margin`` drops points closer than that to the plane.
    """
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(dim)
    w /= np.linalg.norm(w)
    X = np.empty((0, dim))
    while len(X) < n:
        cand = rng.standard_normal((2 * n, dim))
        cand /= np.linalg.norm(cand, axis=1).max()
        cand = cand[np.abs(cand @ w) >= margin]
        X = np.vstack([X, cand])
    X = X[:n]
    y = np.where(X @ w >= 0, 1, -1)
    if not separable:
        flip = rng.random(n) < flip_prob
        y[flip] *= -1
    return normalize(Dataset(X, y))
