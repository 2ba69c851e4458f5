"""Euclidean first-passage percolation: geodesics, barrier-restricted geodesics, trees.

Edge passage times are Euclidean edge lengths. Path lengths are always summed
left to right from the path's first vertex, so a search and a brute-force
enumeration produce bit-identical totals. Equal-length competitors (float ties)
are resolved by the lexicographically smallest vertex sequence.

The barrier metric forbids an oriented step u -> v whenever x(u) >= r >= x(v),
i.e. crossing or touching the vertical line x = r from right to left.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

from .graphs import ProximityGraph

INF = math.inf


@dataclass(frozen=True)
class Barrier:
    """The vertical line x = r."""

    r: float

    def __post_init__(self):
        if not math.isfinite(self.r):
            raise ValueError("barrier abscissa must be finite")

    def forbids(self, xu: float, xv: float) -> bool:
        return xu >= self.r >= xv


@dataclass(frozen=True)
class GeodesicPath:
    vertices: tuple[int, ...]
    total_length: float

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def target(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.vertices)

    def to_json(self, barrier: Barrier | None = None) -> str:
        return json.dumps({
            "source": self.source,
            "target": self.target,
            "vertices": list(self.vertices),
            "length": self.total_length,
            "restricted": barrier is not None,
            "barrier": None if barrier is None else barrier.r,
        })


@dataclass(frozen=True, eq=False)
class ShortestPathTree:
    """Single-source tree; ``parent[v] == -1`` for the root and unreachable vertices."""

    root: int
    parent: np.ndarray
    dist: np.ndarray
    barrier: Barrier | None = None

    def reachable(self, v: int) -> bool:
        return bool(np.isfinite(self.dist[v]))

    def path_to(self, v: int) -> GeodesicPath | None:
        if not self.reachable(v):
            return None
        seq = [v]
        while seq[-1] != self.root:
            seq.append(int(self.parent[seq[-1]]))
        seq.reverse()
        return GeodesicPath(tuple(seq), float(self.dist[v]))

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(len(self.parent))]
        for v, p in enumerate(self.parent.tolist()):
            if p >= 0:
                kids[p].append(v)
        return kids


def _root_path(parent: list[int], v: int) -> list[int]:
    seq = [v]
    while parent[seq[-1]] >= 0:
        seq.append(parent[seq[-1]])
    seq.reverse()
    return seq


def _search(g: ProximityGraph, source: int, barrier: Barrier | None = None,
            targets=None) -> tuple[list[float], list[int], bytearray]:
    """Dijkstra with the lexicographic tie-break on root-to-vertex sequences.

    When every vertex of ``targets`` is settled the search stops; settled
    vertices already have final distances and parents.
    """
    n = g.n
    if not 0 <= source < n:
        raise IndexError(f"vertex {source} out of range")
    adj = g.adjacency
    dist = [INF] * n
    parent = [-1] * n
    done = bytearray(n)
    dist[source] = 0.0
    heap = [(0.0, source)]
    remaining = None if targets is None else set(targets) - {source}
    if remaining is not None and not remaining:
        done[source] = 1
        return dist, parent, done
    xs = g.coords[:, 0].tolist() if barrier is not None else None
    r = barrier.r if barrier is not None else 0.0
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = 1
        if remaining is not None:
            remaining.discard(u)
            if not remaining:
                break
        xu_right = xs is not None and xs[u] >= r
        for v, w in adj[u]:
            if done[v]:
                continue
            if xu_right and r >= xs[v]:
                continue
            nd = d + w
            dv = dist[v]
            if nd < dv:
                dist[v] = nd
                parent[v] = u
                heappush(heap, (nd, v))
            elif nd == dv and _root_path(parent, u) + [v] < _root_path(parent, parent[v]) + [v]:
                parent[v] = u
    return dist, parent, done


def _tree(g, root, barrier, targets=None) -> ShortestPathTree:
    dist, parent, done = _search(g, root, barrier, targets)
    dist_a = np.array(dist)
    if targets is not None:
        # vertices left unsettled by an early stop carry tentative labels only
        unsettled = np.frombuffer(bytes(done), dtype=np.uint8) == 0
        dist_a[unsettled] = INF
        parent = [p if not u else -1 for p, u in zip(parent, unsettled.tolist())]
    return ShortestPathTree(root, np.array(parent, dtype=np.int64), dist_a, barrier)


def shortest_path_tree(g: ProximityGraph, root: int, targets=None) -> ShortestPathTree:
    """Shortest-path tree from ``root``; with ``targets`` only those need be settled."""
    return _tree(g, root, None, targets)


def restricted_tree(g: ProximityGraph, root: int, barrier: Barrier, targets=None) -> ShortestPathTree:
    """Tree of barrier-admissible geodesics oriented away from ``root``."""
    return _tree(g, root, barrier, targets)


def shortest_path(g: ProximityGraph, s: int, t: int) -> GeodesicPath | None:
    """Geodesic from s to t, or None when t is unreachable."""
    return _tree(g, s, None, targets=[t]).path_to(t)


def restricted_shortest_path(g: ProximityGraph, s: int, t: int, barrier: Barrier) -> GeodesicPath | None:
    return _tree(g, s, barrier, targets=[t]).path_to(t)


def path_length(g: ProximityGraph, vertices) -> float:
    total = 0.0
    for u, v in zip(vertices, vertices[1:]):
        total = total + g.length(u, v)
    return total


def is_valid_path(g: ProximityGraph, vertices) -> bool:
    return len(vertices) > 0 and all(g.has_edge(u, v) for u, v in zip(vertices, vertices[1:]))


def is_geodesic(g: ProximityGraph, path, rtol: float = 1e-9) -> bool:
    """True iff every contiguous subpath is a shortest path between its endpoints."""
    vs = list(path.vertices if isinstance(path, GeodesicPath) else path)
    if not is_valid_path(g, vs):
        raise ValueError("path is not a path of the graph")
    k = len(vs)
    for i in range(k - 1):
        dist, _, _ = _search(g, vs[i], None, targets=vs[i + 1:])
        run = 0.0
        for j in range(i + 1, k):
            run = run + g.length(vs[j - 1], vs[j])
            if run > dist[vs[j]] * (1 + rtol):
                return False
    return True


# ---------------------------------------------------------------------------
# bulk distances (no tie-break needed: only lengths are returned)

def restricted_csr(g: ProximityGraph, barrier: Barrier) -> csr_matrix:
    """Directed adjacency with barrier-forbidden arcs removed."""
    xs = g.coords[:, 0]
    rows = np.repeat(np.arange(g.n), g.degrees())
    allowed = ~((xs[rows] >= barrier.r) & (barrier.r >= xs[g.indices]))
    return csr_matrix((g.lengths[allowed], (rows[allowed], g.indices[allowed])), shape=(g.n, g.n))


def distances_from(g: ProximityGraph, sources, barrier: Barrier | None = None,
                   limit: float = np.inf) -> np.ndarray:
    """Geodesic lengths from each source to every vertex, shape (len(sources), n)."""
    m = g.to_csr() if barrier is None else restricted_csr(g, barrier)
    return np.atleast_2d(_sp_dijkstra(m, directed=True, indices=np.asarray(sources), limit=limit))
