"""Brute-force reference implementations used to check the fast paths.

Everything here is deliberately naive: definitions are evaluated literally by
enumeration. They are only practical for a few dozen points.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .predicates import in_circle_sos, incircle_raw_many, orient2_many, sqdist_cmp_many


def delaunay_edges_oracle(pts: np.ndarray) -> set[tuple[int, int]]:
    """O(n^4): edges of every triangle whose circumcircle has no other point inside.

    Cocircular quadruples are resolved with the same symbolic perturbation as the
    construction, so the two agree on degenerate inputs as well.
    """
    n = len(pts)
    tri = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
    if len(tri) == 0:
        return set()
    o = orient2_many(pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]])
    tri = tri[o != 0]
    o = o[o != 0]
    cw = o < 0
    tri[cw] = tri[cw][:, [0, 2, 1]]
    T = len(tri)
    a = np.repeat(tri, n, axis=0)
    d = np.tile(np.arange(n), T)
    keep = (d != a[:, 0]) & (d != a[:, 1]) & (d != a[:, 2])
    a, d = a[keep], d[keep]
    raw = incircle_raw_many(pts[a[:, 0]], pts[a[:, 1]], pts[a[:, 2]], pts[d])
    inside = raw > 0
    for k in np.flatnonzero(raw == 0):
        inside[k] = in_circle_sos(pts, a[k, 0], a[k, 1], a[k, 2], d[k]) > 0
    tri_id = np.repeat(np.arange(T), n - 3)
    bad = np.zeros(T, dtype=bool)
    bad[tri_id[inside]] = True
    edges = set()
    for x, y, z in tri[~bad].tolist():
        edges.update({tuple(sorted((x, y))), tuple(sorted((y, z))), tuple(sorted((x, z)))})
    return edges


def rng_edges_oracle(pts: np.ndarray) -> set[tuple[int, int]]:
    """O(n^3): (x, y) is an edge iff no z has max(|x - z|, |y - z|) < |x - y| (exact)."""
    n = len(pts)
    pairs = np.array(list(itertools.combinations(range(n), 2)), dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        return set()
    P = len(pairs)
    pr = np.repeat(pairs, n, axis=0)
    z = np.tile(np.arange(n), P)
    x, y, pz = pts[pr[:, 0]], pts[pr[:, 1]], pts[z]
    w = (sqdist_cmp_many(x, pz, x, y) < 0) & (sqdist_cmp_many(y, pz, x, y) < 0)
    w &= (z != pr[:, 0]) & (z != pr[:, 1])
    has_witness = w.reshape(P, n).any(axis=1)
    return set(map(tuple, pairs[~has_witness].tolist()))


def path_length(lengths, seq) -> float:
    """Left-to-right sum along the sequence; the same summation order as the searches."""
    total = 0.0
    for u, v in zip(seq, seq[1:]):
        total = total + lengths[(u, v)]
    return total


def _edge_lengths(g) -> dict:
    out = {}
    for (i, j), w in zip(g.edges().tolist(), g.edge_lengths().tolist()):
        out[(i, j)] = w
        out[(j, i)] = w
    return out


def best_path_enumeration(g, s: int, t: int, barrier: float | None = None):
    """Exhaustive search over simple s-t paths; returns (length, vertex tuple) or None.

    With a barrier abscissa r, a step u -> v is forbidden when x(u) >= r >= x(v).
    Ties in length go to the lexicographically smallest sequence.
    """
    lengths = _edge_lengths(g)
    xs = g.coords[:, 0]
    nbrs = {i: [int(j) for j in g.neighbors(i)] for i in range(g.n)}
    best = None

    def ok(u, v):
        return barrier is None or not (xs[u] >= barrier >= xs[v])

    def rec(path, visited):
        nonlocal best
        u = path[-1]
        if u == t:
            cand = (path_length(lengths, path), tuple(path))
            if best is None or cand < best:
                best = cand
            return
        for v in nbrs[u]:
            if v not in visited and ok(u, v):
                visited.add(v)
                path.append(v)
                rec(path, visited)
                path.pop()
                visited.discard(v)

    rec([s], {s})
    return best


def longest_descending_chain_oracle(pts: np.ndarray, b: float, starts) -> int:
    """Longest sequence of distinct points b >= d1 >= d2 >= ... starting in ``starts``.

    Plain recursive enumeration of every valid sequence (no pruning beyond validity).
    """
    n = len(pts)
    best = 0

    def rec(seq, last):
        nonlocal best
        best = max(best, len(seq))
        u = seq[-1]
        for v in range(n):
            if v in seq:
                continue
            d = math.dist(pts[u], pts[v])
            if d <= last:
                seq.append(v)
                rec(seq, d)
                seq.pop()

    for s in starts:
        rec([int(s)], b)
    return best
