"""Finite-scale directional geodesics, directed forests and highway counts.

A semi-infinite geodesic in direction u cannot be computed, so every vertex is
routed to one common far sink, the vertex nearest to R*u. Root-ward paths in
the shortest-path tree of that sink stand in for the u-directional geodesics,
and their first hops form the directed forest.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fpp import GeodesicPath, ShortestPathTree, shortest_path_tree
from .geom import Window, nearest_vertex
from .graphs import ProximityGraph


@dataclass(frozen=True)
class DirectionSpec:
    angle: float
    R: float

    def __post_init__(self):
        if not (math.isfinite(self.angle) and self.R > 0 and math.isfinite(self.R)):
            raise ValueError("direction needs a finite angle and a positive finite radius")

    @classmethod
    def from_vector(cls, u, R: float) -> "DirectionSpec":
        return cls(math.atan2(u[1], u[0]), R)

    @property
    def u(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])

    @property
    def target(self) -> np.ndarray:
        return self.R * self.u

    def reversed(self) -> "DirectionSpec":
        return DirectionSpec(self.angle + math.pi, self.R)


def sink_vertex(g: ProximityGraph, d: DirectionSpec) -> int:
    return nearest_vertex(g.points, d.target)


@dataclass(frozen=True, eq=False)
class DirectedForest:
    """Per-vertex successor toward the sink (-1 for the sink and unreachable vertices)."""

    direction: DirectionSpec
    successor: np.ndarray
    target_vertex: int
    coords: np.ndarray
    observation: Window

    def chain(self, v: int) -> list[int]:
        seq = [v]
        while self.successor[seq[-1]] >= 0:
            seq.append(int(self.successor[seq[-1]]))
        return seq

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(len(self.successor))]
        for v, s in enumerate(self.successor.tolist()):
            if s >= 0:
                kids[s].append(v)
        return kids

    def order_from_sink(self) -> list[int]:
        """Vertices in breadth-first order from the sink over reversed forest edges."""
        kids = self.children()
        order = [self.target_vertex]
        for v in order:
            order.extend(kids[v])
        return order

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        buf.write("vertex,successor\n")
        for v, s in enumerate(self.successor.tolist()):
            buf.write(f"{v},{s}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def directional_tree(g: ProximityGraph, d: DirectionSpec, targets=None) -> ShortestPathTree:
    return shortest_path_tree(g, sink_vertex(g, d), targets=targets)


def directional_geodesic(g: ProximityGraph, x: int, d: DirectionSpec,
                         tree: ShortestPathTree | None = None) -> GeodesicPath | None:
    """Path x -> sink read off the sink's shortest-path tree."""
    if tree is None:
        tree = directional_tree(g, d, targets=[x])
    p = tree.path_to(x)
    if p is None:
        return None
    return GeodesicPath(tuple(reversed(p.vertices)), p.total_length)


def build_directed_forest(g: ProximityGraph, d: DirectionSpec, margin_fraction: float = 0.1,
                          tree: ShortestPathTree | None = None) -> DirectedForest:
    if tree is None:
        tree = directional_tree(g, d)
    succ = tree.parent.copy()
    succ.setflags(write=False)
    return DirectedForest(d, succ, tree.root, g.coords,
                          g.points.window.observation(margin_fraction))


@dataclass(frozen=True)
class CoalescenceReport:
    merge_vertex: int | None
    merge_radius: float
    genuine: bool
    sink: int = -1


def coalescence(g: ProximityGraph, x: int, x2: int, d: DirectionSpec,
                tree: ShortestPathTree | None = None) -> CoalescenceReport:
    """First common vertex of the two sink-ward paths; genuine if within radius R/2 of the origin."""
    if tree is None:
        tree = directional_tree(g, d, targets=[x, x2])
    p1 = directional_geodesic(g, x, d, tree)
    p2 = directional_geodesic(g, x2, d, tree)
    if p1 is None or p2 is None:
        return CoalescenceReport(None, math.inf, False, tree.root)
    on2 = set(p2.vertices)
    merge = next(v for v in p1.vertices if v in on2)
    radius = float(np.hypot(*g.coords[merge]))
    return CoalescenceReport(merge, radius, radius <= d.R / 2, tree.root)


def cone_fraction(g: ProximityGraph, path: GeodesicPath, apex, u, half_angle: float) -> float:
    """Share of path vertices inside the cone at ``apex`` around direction ``u``."""
    p = g.coords[list(path.vertices)] - np.asarray(apex, dtype=float)
    u = np.asarray(u, dtype=float)
    r = np.hypot(p[:, 0], p[:, 1])
    cosang = np.where(r > 0, (p @ u) / np.where(r > 0, r, 1.0), 1.0)
    return float(np.mean(cosang >= math.cos(half_angle)))


def first_edge_stability(g: ProximityGraph, x: int, angle: float, radii) -> float | None:
    """Smallest R in ``radii`` from which the first hop of x toward R*u no longer changes."""
    radii = list(radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    succ = []
    for R in radii:
        p = directional_geodesic(g, x, DirectionSpec(angle, R))
        succ.append(None if p is None else (p.vertices[1] if len(p) > 1 else -1))
    return stabilization_radius(succ, radii)


def stabilization_radius(successors, radii) -> float | None:
    k = len(successors) - 1
    if k > 0 and successors[k] != successors[k - 1]:
        return None
    while k > 0 and successors[k - 1] == successors[-1]:
        k -= 1
    return radii[k]


@dataclass(frozen=True)
class HighwayCount:
    L: float
    m: float
    count: int


def _crossing_tails(coords, succ, normal, offset):
    """Tails t of forest edges t -> succ(t) that cross the line <P, normal> = offset.

    Points with <P, normal> > offset are upstream; points on the line count as downstream.
    """
    has = succ >= 0
    s = coords @ normal - offset
    up = s > 0
    cross = np.zeros(len(succ), dtype=bool)
    cross[has] = up[has] != up[succ[has]]
    return cross, s


def highway_counts(forest: DirectedForest, L: float, m_values) -> list[HighwayCount]:
    """Counts K[l0(0, L), l_m] for a forest built toward -u.

    ``l_m`` is the line through -m*u perpendicular to u and ``l0(0, L)`` the
    segment {b v : 0 <= b < L} with v = u rotated by +90 degrees. A chain
    counts as bi-infinite when its upstream tree reaches outside the
    observation window. Chains are identified by their last crossing edge.
    """
    if not L > 0:
        raise ValueError("L must be positive")
    m_values = [float(m) for m in m_values]
    if any(m < 0 for m in m_values):
        raise ValueError("m values must be non-negative")
    u = -forest.direction.u
    v = np.array([-u[1], u[0]])
    obs = forest.observation
    for m in [0.0] + m_values:
        ends = np.array([-m * u, -m * u + L * v])
        if not np.all(obs.contains(ends)):
            raise ValueError(f"segment l_{m:g}(0, L) leaves the observation region")
    coords = forest.coords
    succ = forest.successor
    sink = forest.target_vertex
    if float(coords[sink] @ u) >= -max(m_values + [0.0]):
        raise ValueError("sink must lie beyond the farthest line l_m")

    order = forest.order_from_sink()
    outside = ~obs.contains(coords)
    long_ = outside.copy()
    for w in reversed(order):
        s = succ[w]
        if s >= 0 and long_[w]:
            long_[s] = True

    def last_cross(m):
        cross, _ = _crossing_tails(coords, succ, u, -m)
        last = np.full(len(succ), -1, dtype=np.int64)
        for w in order[1:]:
            nxt = last[succ[w]]
            last[w] = nxt if nxt >= 0 else (w if cross[w] else -1)
        return last

    cross0, s0 = _crossing_tails(coords, succ, u, 0.0)
    last0 = last_cross(0.0)
    tails = np.flatnonzero(cross0 & (last0 == np.arange(len(succ))) & long_)
    if len(tails):
        a, b = coords[tails], coords[succ[tails]]
        sa, sb = s0[tails], s0[succ[tails]]
        t = sa / (sa - sb)
        at = ((a + t[:, None] * (b - a)) @ v)
        tails = tails[(at >= 0) & (at < L)]
    out = []
    for m in m_values:
        if m == 0:
            count = len(tails)
        else:
            lm = last_cross(m)[tails]
            count = len(np.unique(lm[lm >= 0]))
        out.append(HighwayCount(float(L), m, int(count)))
    return out
