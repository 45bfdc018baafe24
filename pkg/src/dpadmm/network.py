"""Undirected communication graphs with 1-based node ids."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

MAX_ATTEMPTS = 1000


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class NetworkGraph:
    node_count: int
    edges: frozenset

    def __post_init__(self):
        if self.node_count < 1:
            raise TopologyError("a graph needs at least one node")
        norm = set()
        for e in self.edges:
            p, j = tuple(e) if len(e) == 2 else (None, None)
            if p is None or p == j:
                raise TopologyError(f"self-loop or malformed edge {e!r}")
            if not (1 <= p <= self.node_count and 1 <= j <= self.node_count):
                raise TopologyError(f"edge {e!r} references a missing node")
            norm.add((min(p, j), max(p, j)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = {p: set() for p in range(1, self.node_count + 1)}
        for p, j in norm:
            adj[p].add(j)
            adj[j].add(p)
        object.__setattr__(self, "_adj", {p: frozenset(s) for p, s in adj.items()})

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def neighbors(self, p: int) -> frozenset:
        if not 1 <= p <= self.node_count:
            raise TopologyError(f"node {p} out of range 1..{self.node_count}")
        return self._adj[p]

    def degree(self, p: int) -> int:
        return len(self.neighbors(p))

    def sorted_neighbors(self, p: int) -> list[int]:
        return sorted(self.neighbors(p))

    def serialize(self) -> str:
        return f"{self.node_count};" + ",".join(f"{p}-{j}" for p, j in sorted(self.edges))


def is_connected(graph: NetworkGraph) -> bool:
    seen = {1}
    queue = deque([1])
    while queue:
        p = queue.popleft()
        for j in graph.neighbors(p):
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == graph.node_count


def neighbors(graph: NetworkGraph, p: int) -> frozenset:
    return graph.neighbors(p)


def _edges(kind: str, n: int, prob: float, rng) -> set:
    if kind == "complete":
        return set(combinations(range(1, n + 1), 2))
    if kind == "line":
        return {(p, p + 1) for p in range(1, n)}
    if kind == "ring":
        edges = {(p, p + 1) for p in range(1, n)}
        if n > 2:
            edges.add((1, n))
        return edges
    if kind == "erdos_renyi":
        pairs = list(combinations(range(1, n + 1), 2))
        keep = rng.random(len(pairs)) < prob
        return {e for e, k in zip(pairs, keep) if k}
    raise TopologyError(f"unknown topology {kind!r}")


def build_topology(kind: str, node_count: int, seed: int = 0, prob: float = 0.5) -> NetworkGraph:
    """Build a connected graph.

    Random graphs are redrawn with sub-seeds ``(seed, attempt)`` until
    connected, giving up after 1000 attempts.
    """
    if node_count < 1:
        raise TopologyError("node_count must be >= 1")
    if kind in ("er", "erdos_renyi"):
        kind = "erdos_renyi"
        if not 0 < prob <= 1:
            raise TopologyError("edge probability must lie in (0, 1]")
        for attempt in range(MAX_ATTEMPTS):
            rng = np.random.default_rng([seed, attempt])
            g = NetworkGraph(node_count, frozenset(_edges(kind, node_count, prob, rng)))
            if is_connected(g):
                return g
        raise TopologyError(f"no connected graph after {MAX_ATTEMPTS} attempts")
    g = NetworkGraph(node_count, frozenset(_edges(kind, node_count, prob, None)))
    if not is_connected(g):
        raise TopologyError(f"{kind} graph on {node_count} nodes is disconnected")
    return g


def parse_topology(spec: str) -> NetworkGraph:
    """Parse ``ring:8``, ``complete:4``, ``line:5`` or ``er:10:0.3:seed=7``."""
    parts = [s.strip() for s in spec.split(":")]
    kind = parts[0].lower()
    try:
        n = int(parts[1])
    except (IndexError, ValueError):
        raise TopologyError(f"bad topology spec {spec!r}") from None
    prob, seed = 0.5, 0
    for extra in parts[2:]:
        if extra.startswith("seed="):
            seed = int(extra[5:])
        else:
            prob = float(extra)
    return build_topology(kind, n, seed=seed, prob=prob)
