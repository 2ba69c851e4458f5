"""Delaunay triangulation and relative neighborhood graph on a point set."""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay, QhullError, cKDTree

from .geom import PointSet
from .predicates import in_circle_sos, incircle_raw_many, orient2, orient2_many, sqdist_cmp_many


class GraphKind(str, enum.Enum):
    DELAUNAY = "delaunay"
    RNG = "rng"


@dataclass(frozen=True, eq=False)
class ProximityGraph:
    """Undirected straight-line graph on ``points`` stored in CSR form.

    ``lengths[k]`` is the Euclidean length of the CSR entry ``k``; both
    directions of an edge carry the identical float.
    """

    kind: GraphKind
    points: PointSet
    indptr: np.ndarray
    indices: np.ndarray
    lengths: np.ndarray
    degenerate: bool = False

    @classmethod
    def from_edges(cls, kind, ps: PointSet, edges, degenerate: bool = False) -> "ProximityGraph":
        n = len(ps)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            edges = np.sort(edges, axis=1)
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loop in edge list")
            edges = np.unique(edges, axis=0)
        pts = ps.points
        w = np.hypot(pts[edges[:, 0], 0] - pts[edges[:, 1], 0],
                     pts[edges[:, 0], 1] - pts[edges[:, 1], 1])
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        ww = np.concatenate([w, w])
        order = np.lexsort((cols, rows))
        rows, cols, ww = rows[order], cols[order], ww[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        indptr = np.cumsum(indptr)
        for a in (indptr, cols, ww):
            a.setflags(write=False)
        return cls(GraphKind(kind), ps, indptr, cols, ww, degenerate)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def coords(self) -> np.ndarray:
        return self.points.points

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def _edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        rows = np.repeat(np.arange(self.n), self.degrees())
        keep = rows < self.indices
        e = np.column_stack([rows[keep], self.indices[keep]])
        return e, self.lengths[keep]

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with i < j, sorted lexicographically."""
        return self._edge_arrays[0]

    def edge_lengths(self) -> np.ndarray:
        return self._edge_arrays[1]

    def edge_set(self) -> set[tuple[int, int]]:
        return set(map(tuple, self.edges().tolist()))

    def has_edge(self, i: int, j: int) -> bool:
        nb = self.neighbors(i)
        k = np.searchsorted(nb, j)
        return bool(k < len(nb) and nb[k] == j)

    def length(self, i: int, j: int) -> float:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        k = lo + int(np.searchsorted(self.indices[lo:hi], j))
        if k >= hi or self.indices[k] != j:
            raise KeyError(f"({i}, {j}) is not an edge")
        return float(self.lengths[k])

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-vertex python lists of (neighbour, length), for the search loops."""
        ip = self.indptr.tolist()
        idx = self.indices.tolist()
        ln = self.lengths.tolist()
        return [list(zip(idx[ip[i]:ip[i + 1]], ln[ip[i]:ip[i + 1]])) for i in range(self.n)]

    def to_csr(self) -> csr_matrix:
        return csr_matrix((self.lengths, self.indices, self.indptr), shape=(self.n, self.n))


# ---------------------------------------------------------------------------
# Delaunay

def _all_collinear(pts: np.ndarray) -> bool:
    if len(pts) < 3:
        return True
    a = np.broadcast_to(pts[0], (len(pts) - 2, 2))
    b = np.broadcast_to(pts[1], (len(pts) - 2, 2))
    return not np.any(orient2_many(a, b, pts[2:]))


def _collinear_path(pts: np.ndarray) -> np.ndarray:
    d = pts[1] - pts[0]
    t = (pts - pts[0]) @ d
    order = np.argsort(t, kind="stable")
    return np.column_stack([order[:-1], order[1:]])


class _Mesh:
    """Minimal triangle store for Lawson flips and point insertion."""

    def __init__(self, pts: np.ndarray, tris: np.ndarray):
        self.pts = pts
        self.tris: list[list[int] | None] = [list(t) for t in tris.tolist()]
        self.edge: dict[tuple[int, int], int] = {}
        for t, (a, b, c) in enumerate(self.tris):
            self.edge[(a, b)] = t
            self.edge[(b, c)] = t
            self.edge[(c, a)] = t

    def _set(self, t: int, tri: list[int]) -> None:
        self.tris[t] = tri
        a, b, c = tri
        self.edge[(a, b)] = t
        self.edge[(b, c)] = t
        self.edge[(c, a)] = t

    def _add(self, tri: list[int]) -> int:
        self.tris.append(None)
        t = len(self.tris) - 1
        self._set(t, tri)
        return t

    @staticmethod
    def _third(tri, u, v) -> int:
        for w in tri:
            if w != u and w != v:
                return w
        raise AssertionError("degenerate triangle")

    def legalize(self, stack: list[tuple[int, int]]) -> int:
        flips = 0
        pts = self.pts
        while stack:
            u, v = stack.pop()
            t1 = self.edge.get((u, v))
            t2 = self.edge.get((v, u))
            if t1 is None or t2 is None:
                continue
            w = self._third(self.tris[t1], u, v)
            x = self._third(self.tris[t2], v, u)
            if in_circle_sos(pts, u, v, w, x) <= 0:
                continue
            del self.edge[(u, v)], self.edge[(v, u)]
            # quad u, x, v, w is ccw; replace diagonal uv by wx
            self._set(t1, [u, x, w])
            self._set(t2, [x, v, w])
            flips += 1
            stack.extend([(u, x), (x, v), (v, w), (w, u)])
        return flips

    def insert(self, p: int) -> None:
        """Insert vertex ``p`` lying inside the current triangulated region."""
        pts = self.pts
        for t, tri in enumerate(self.tris):
            if tri is None:
                continue
            a, b, c = tri
            o = (orient2(pts[a], pts[b], pts[p]), orient2(pts[b], pts[c], pts[p]),
                 orient2(pts[c], pts[a], pts[p]))
            if min(o) < 0:
                continue
            if 0 not in o:
                self._set(t, [a, b, p])
                self._add([b, c, p])
                self._add([c, a, p])
                self.legalize([(a, b), (b, c), (c, a)])
                return
            # on an edge: split the two incident triangles
            u, v = [(a, b), (b, c), (c, a)][o.index(0)]
            w = self._third(tri, u, v)
            t2 = self.edge.get((v, u))
            del self.edge[(u, v)]
            self._set(t, [u, p, w])
            self._add([p, v, w])
            stack = [(v, w), (w, u)]
            if t2 is not None:
                del self.edge[(v, u)]
                x = self._third(self.tris[t2], v, u)
                self._set(t2, [v, p, x])
                self._add([p, u, x])
                stack += [(u, x), (x, v)]
            self.legalize(stack)
            return
        raise RuntimeError(f"vertex {p} lies outside the triangulated region")

    def triangles(self) -> np.ndarray:
        return np.array([t for t in self.tris if t is not None], dtype=np.int64).reshape(-1, 3)


def _interior_edge_quads(simplices: np.ndarray, neighbors: np.ndarray):
    """For each interior edge (u, v): apexes w (in the first triangle) and x (in the second)."""
    T = len(simplices)
    t_idx = np.repeat(np.arange(T), 3)
    k_idx = np.tile(np.arange(3), T)
    nb = neighbors.ravel()
    sel = (nb >= 0) & (t_idx < nb)
    t_idx, k_idx, nb = t_idx[sel], k_idx[sel], nb[sel]
    w = simplices[t_idx, k_idx]
    u = simplices[t_idx, (k_idx + 1) % 3]
    v = simplices[t_idx, (k_idx + 2) % 3]
    back = np.argmax(neighbors[nb] == t_idx[:, None], axis=1)
    x = simplices[nb, back]
    return u, v, w, x


def delaunay_triangles(pts: np.ndarray) -> np.ndarray:
    """ccw triangles of the tie-broken Delaunay triangulation (non-collinear input)."""
    tri = Delaunay(pts)
    simp = tri.simplices.astype(np.int64)
    nbrs = tri.neighbors.astype(np.int64)
    o = orient2_many(pts[simp[:, 0]], pts[simp[:, 1]], pts[simp[:, 2]])
    if np.any(o == 0):
        raise RuntimeError("triangulator returned a degenerate triangle")
    cw = o < 0
    simp[cw] = simp[cw][:, [0, 2, 1]]
    nbrs[cw] = nbrs[cw][:, [0, 2, 1]]
    u, v, w, x = _interior_edge_quads(simp, nbrs)
    # (u, v, w) is ccw by construction; x is the apex across uv
    raw = incircle_raw_many(pts[u], pts[v], pts[w], pts[x])
    suspect = np.flatnonzero(raw >= 0)
    missing = np.asarray(tri.coplanar[:, 0] if len(tri.coplanar) else [], dtype=np.int64)
    if len(suspect) == 0 and len(missing) == 0:
        return simp
    mesh = _Mesh(pts, simp)
    mesh.legalize([(int(u[k]), int(v[k])) for k in suspect])
    for p in np.unique(missing):
        mesh.insert(int(p))
    return mesh.triangles()


def triangles_to_edges(tris: np.ndarray, n: int) -> np.ndarray:
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e.sort(axis=1)
    key = np.unique(e[:, 0] * n + e[:, 1])
    return np.column_stack([key // n, key % n])


def build_delaunay(ps: PointSet) -> ProximityGraph:
    """Delaunay triangulation; cocircular ties keep the diagonal incident to the smallest index.

    All-collinear input yields the path along the line, flagged ``degenerate``.
    """
    pts = ps.points
    n = len(pts)
    if n < 2:
        raise ValueError("build_delaunay needs at least 2 points")
    if _all_collinear(pts):
        return ProximityGraph.from_edges(GraphKind.DELAUNAY, ps, _collinear_path(pts), degenerate=True)
    try:
        tris = delaunay_triangles(pts)
    except QhullError as exc:  # pragma: no cover - not reached for distinct non-collinear input
        raise RuntimeError(f"triangulation failed: {exc}") from exc
    return ProximityGraph.from_edges(GraphKind.DELAUNAY, ps, triangles_to_edges(tris, n))


# ---------------------------------------------------------------------------
# relative neighborhood graph

_LUNE_RADIUS = math.sqrt(3.0) / 2.0


def witness_free(pts: np.ndarray, pairs: np.ndarray, tree: cKDTree | None = None,
                 chunk: int = 200_000) -> np.ndarray:
    """Mask of pairs (x, y) with no z such that max(|x-z|, |y-z|) < |x-y|, decided exactly.

    Any such z lies within sqrt(3)/2 |x-y| of the midpoint, which bounds the ball query.
    """
    if tree is None:
        tree = cKDTree(pts)
    out = np.ones(len(pairs), dtype=bool)
    for s in range(0, len(pairs), chunk):
        pr = pairs[s:s + chunk]
        p, q = pts[pr[:, 0]], pts[pr[:, 1]]
        d = np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1])
        cand = tree.query_ball_point((p + q) / 2, r=d * _LUNE_RADIUS * (1 + 1e-9) + 1e-300)
        counts = np.fromiter((len(c) for c in cand), dtype=np.int64, count=len(cand))
        if counts.sum() == 0:
            continue
        z = np.fromiter((k for c in cand for k in c), dtype=np.int64, count=int(counts.sum()))
        rep = np.repeat(np.arange(len(pr)), counts)
        keep = (z != pr[rep, 0]) & (z != pr[rep, 1])
        z, rep = z[keep], rep[keep]
        x, y = pts[pr[rep, 0]], pts[pr[rep, 1]]
        pz = pts[z]
        closer_x = sqdist_cmp_many(x, pz, x, y) < 0
        idx = np.flatnonzero(closer_x)
        closer_y = sqdist_cmp_many(y[idx], pz[idx], x[idx], y[idx]) < 0
        hit = rep[idx[closer_y]]
        out[s + np.unique(hit)] = False
    return out


def _yao_candidates(pts: np.ndarray, tree: cKDTree, n_cones: int = 8) -> np.ndarray:
    """Candidate RNG pairs: the nearest points (with ties) in each of ``n_cones`` angular sectors.

    If y is an RNG neighbour of x, no closer point can lie within 60 degrees of
    y as seen from x, so y is a nearest point of its sector whenever sectors
    are narrower than 60 degrees (here 45).
    """
    n = len(pts)
    width = 2 * math.pi / n_cones
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    src = np.arange(n)
    open_ = np.ones((n, n_cones), dtype=bool)
    found: list[np.ndarray] = []
    k = min(n, 25)
    while len(src):
        dist, nb = tree.query(pts[src], k=k)
        dist, nb = dist.reshape(len(src), -1), nb.reshape(len(src), -1)
        diff = pts[nb] - pts[src][:, None, :]
        cone = np.floor(np.mod(np.arctan2(diff[..., 1], diff[..., 0]), 2 * math.pi) / width)
        cone = cone.astype(np.int64) % n_cones
        d2 = (diff ** 2).sum(axis=2)
        not_self = nb != src[:, None]
        for c in range(n_cones):
            want = open_[src, c]
            in_cone = (cone == c) & not_self & want[:, None]
            d2m = np.where(in_cone, d2, np.inf)
            best = d2m.min(axis=1)
            r_, c_ = np.nonzero(in_cone & (d2m <= best[:, None] * (1 + 1e-12)))
            found.append(np.column_stack([src[r_], nb[r_, c_]]))
            open_[src[np.isfinite(best)], c] = False
        if k >= n:
            break
        # a sector is settled as empty if its part of the bounding box lies strictly inside
        # the k-th neighbour distance (sector widened slightly against atan2 rounding)
        rows, cones = np.nonzero(open_[src])
        reach = _sector_reach(pts[src[rows]], cones * width - 1e-9, (cones + 1) * width + 1e-9,
                              (xmin, xmax, ymin, ymax))
        settled = reach < dist[rows, -1]
        open_[src[rows[settled]], cones[settled]] = False
        src = np.flatnonzero(open_.any(axis=1))
        k = min(n, k * 4)
    pairs = np.concatenate(found) if found else np.empty((0, 2), dtype=np.int64)
    pairs.sort(axis=1)
    return np.unique(pairs, axis=0)


def _sector_reach(src: np.ndarray, a0: np.ndarray, a1: np.ndarray, bbox) -> np.ndarray:
    """Largest distance from ``src`` to a point of the box within the angular sector [a0, a1]."""
    xmin, xmax, ymin, ymax = bbox
    out = np.zeros(len(src))
    for ang in (a0, a1):
        c, s = np.cos(ang), np.sin(ang)
        with np.errstate(divide="ignore", invalid="ignore"):
            tx = np.where(c > 0, (xmax - src[:, 0]) / c, np.where(c < 0, (xmin - src[:, 0]) / c, np.inf))
            ty = np.where(s > 0, (ymax - src[:, 1]) / s, np.where(s < 0, (ymin - src[:, 1]) / s, np.inf))
        out = np.maximum(out, np.maximum(np.minimum(tx, ty), 0.0))
    for cx, cy in ((xmin, ymin), (xmin, ymax), (xmax, ymin), (xmax, ymax)):
        dx, dy = cx - src[:, 0], cy - src[:, 1]
        ang = np.mod(np.arctan2(dy, dx) - a0, 2 * math.pi)
        inside = ang <= (a1 - a0)
        out = np.where(inside, np.maximum(out, np.hypot(dx, dy)), out)
    return out * (1 + 1e-9)


def build_rng(ps: PointSet) -> ProximityGraph:
    """Relative neighborhood graph, built without reference to the Delaunay triangulation."""
    pts = ps.points
    n = len(pts)
    if n < 2:
        raise ValueError("build_rng needs at least 2 points")
    tree = cKDTree(pts)
    cand = _yao_candidates(pts, tree)
    edges = cand[witness_free(pts, cand, tree)]
    return ProximityGraph.from_edges(GraphKind.RNG, ps, edges, degenerate=_all_collinear(pts))


def rng_from_delaunay(dt: ProximityGraph) -> ProximityGraph:
    """RNG obtained by discarding Delaunay edges that have a witness point."""
    if dt.kind is not GraphKind.DELAUNAY:
        raise ValueError("rng_from_delaunay expects a Delaunay graph")
    pts = dt.coords
    e = dt.edges()
    return ProximityGraph.from_edges(GraphKind.RNG, dt.points, e[witness_free(pts, e)],
                                     degenerate=dt.degenerate)


def build_graph(ps: PointSet, kind) -> ProximityGraph:
    kind = GraphKind(kind)
    if kind is GraphKind.DELAUNAY:
        return build_delaunay(ps)
    if len(ps) >= 3 and not _all_collinear(ps.points):
        return rng_from_delaunay(build_delaunay(ps))
    return build_rng(ps)


# ---------------------------------------------------------------------------
# queries

def max_degree(g: ProximityGraph) -> int:
    return int(g.degrees().max()) if g.n else 0


def edges_crossing_circle(g: ProximityGraph, center, radius: float) -> np.ndarray:
    """Edges whose closed segment meets the circle of the given centre and radius."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    e = g.edges()
    c = np.asarray(center, dtype=np.float64)
    p, q = g.coords[e[:, 0]] - c, g.coords[e[:, 1]] - c
    dp, dq = np.hypot(p[:, 0], p[:, 1]), np.hypot(q[:, 0], q[:, 1])
    d = q - p
    dd = (d ** 2).sum(axis=1)
    t = np.clip(-(p * d).sum(axis=1) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    closest = p + t[:, None] * d
    dmin = np.hypot(closest[:, 0], closest[:, 1])
    hit = (dmin <= radius) & (np.maximum(dp, dq) >= radius)
    return e[hit]


def is_connected(g: ProximityGraph) -> bool:
    if g.n <= 1:
        return True
    return connected_components(g.to_csr(), directed=False)[0] == 1


def proper_crossings(g: ProximityGraph) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Pairs of edges whose segments cross at a point interior to both (exact test)."""
    e = g.edges()
    if len(e) < 2:
        return []
    pts = g.coords
    mid = (pts[e[:, 0]] + pts[e[:, 1]]) / 2
    half = g.edge_lengths() / 2
    # short edges pair up through a KD-tree; the few long (hull) edges are tested against all
    cut = 4 * float(np.median(half))
    short = np.flatnonzero(half <= cut)
    tree = cKDTree(mid[short])
    sp = tree.query_pairs(r=2 * cut * (1 + 1e-9), output_type="ndarray")
    groups = [short[sp].reshape(-1, 2)]
    for k in np.flatnonzero(half > cut):
        others = np.flatnonzero((np.hypot(*(mid - mid[k]).T) <= (half + half[k]) * (1 + 1e-9))
                                & ((half <= cut) | (np.arange(len(e)) > k)))
        groups.append(np.column_stack([np.full(len(others), k), others]))
    pairs = np.concatenate(groups)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    if len(pairs) == 0:
        return []
    i, j = pairs[:, 0], pairs[:, 1]
    a, b, c, d = e[i, 0], e[i, 1], e[j, 0], e[j, 1]
    disjoint = (a != c) & (a != d) & (b != c) & (b != d)
    i, j, a, b, c, d = (v[disjoint] for v in (i, j, a, b, c, d))
    P = pts
    o1 = orient2_many(P[a], P[b], P[c])
    o2 = orient2_many(P[a], P[b], P[d])
    o3 = orient2_many(P[c], P[d], P[a])
    o4 = orient2_many(P[c], P[d], P[b])
    cross = (o1 * o2 < 0) & (o3 * o4 < 0)
    return [(tuple(e[x]), tuple(e[y])) for x, y in zip(i[cross], j[cross])]


def write_edges_csv(g: ProximityGraph, path: str | Path | None = None) -> str:
    buf = io.StringIO()
    buf.write("i,j,length\n")
    for (i, j), w in zip(g.edges().tolist(), g.edge_lengths().tolist()):
        buf.write(f"{i},{j},{format(w, '.17g')}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
