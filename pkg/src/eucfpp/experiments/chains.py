"""Longest b-bounded descending chains: b >= |X1 - X2| >= |X2 - X3| >= ... over distinct points."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..geom import EmptyInputError, PointSet, Window

EXACT_COMPONENT_SIZE = 12


@dataclass(frozen=True)
class ChainReport:
    b: float
    max_chain_length: int
    start_region: Window
    exact: bool
    chain: tuple[int, ...]


def _hop_lists(pts: np.ndarray, b: float) -> list[list[tuple[float, int]]]:
    nbrs: list[list[tuple[float, int]]] = [[] for _ in range(len(pts))]
    if len(pts) < 2:
        return nbrs
    pairs = cKDTree(pts).query_pairs(b * (1 + 1e-9), output_type="ndarray")
    for i, j in pairs.tolist():
        d = math.dist(pts[i], pts[j])
        if d <= b:
            nbrs[i].append((d, j))
            nbrs[j].append((d, i))
    for lst in nbrs:
        lst.sort(reverse=True)
    return nbrs


def _components(n: int, nbrs) -> np.ndarray:
    rows = [i for i, lst in enumerate(nbrs) for _ in lst]
    cols = [j for lst in nbrs for _, j in lst]
    m = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return connected_components(m, directed=False)[1]


def _longest_from(start: int, nbrs, b: float, cap: int, budget: int | None):
    """Depth-first search over chains from ``start``; returns (best chain, finished)."""
    best = [start]
    path = [start]
    on_path = {start}
    steps = 0
    finished = True

    def rec(u: int, last: float) -> None:
        nonlocal best, steps, finished
        if len(path) > len(best):
            best = path.copy()
        if len(best) >= cap:
            return
        for d, v in nbrs[u]:
            if d > last or v in on_path:
                continue
            steps += 1
            if budget is not None and steps > budget:
                finished = False
                return
            path.append(v)
            on_path.add(v)
            rec(v, d)
            path.pop()
            on_path.discard(v)
            if not finished:
                return

    rec(start, b)
    return best, finished


def descending_chains(ps: PointSet | np.ndarray, b: float, start_region: Window,
                      budget: int = 200_000) -> ChainReport:
    """Maximum chain length over starts inside ``start_region``.

    Hops are at most b, so a chain never leaves the start's component of the
    "distance <= b" graph, whose size caps the length. Components of at most
    12 points are searched exhaustively; larger ones get a step budget per start
    and the report says whether every search ran to completion.
    """
    if not b > 0:
        raise ValueError("b must be positive")
    pts = ps.points if isinstance(ps, PointSet) else np.asarray(ps, dtype=float).reshape(-1, 2)
    starts = np.flatnonzero(start_region.contains(pts)) if len(pts) else np.array([], dtype=int)
    if len(starts) == 0:
        raise EmptyInputError("no points in the start region")
    nbrs = _hop_lists(pts, b)
    comp = _components(len(pts), nbrs)
    sizes = np.bincount(comp)
    best: list[int] = []
    exact = True
    for s in starts.tolist():
        size = int(sizes[comp[s]])
        if size <= len(best):
            continue
        chain, done = _longest_from(s, nbrs, b, size,
                                    None if size <= EXACT_COMPONENT_SIZE else budget)
        exact &= done
        if len(chain) > len(best):
            best = chain
    return ChainReport(float(b), len(best), start_region, exact, tuple(best))
