"""Counting long branches of the shortest-path tree that leave a disk.

For a tree rooted inside the disk B_r(o), delete every vertex whose whole
root path stays in B_r(o). What remains is a set of subtrees, each entered
through one edge [x_{n-1}, x_n] from a deleted vertex to a kept one. A subtree
is "unbounded" when it contains a vertex farther than ``R_obs`` from the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..fpp import ShortestPathTree
from ..graphs import ProximityGraph


@dataclass(frozen=True)
class Exits:
    """Entry edges (parent, child) of the unbounded subtrees, with their circle-crossing angles."""

    parent: np.ndarray
    child: np.ndarray
    angle: np.ndarray
    n_components: int


def _bfs_order(tree: ShortestPathTree) -> list[int]:
    kids = tree.children()
    order = [tree.root]
    for v in order:
        order.extend(kids[v])
    return order


def unbounded_exits(tree: ShortestPathTree, g: ProximityGraph, r: float, R_obs: float,
                    margin_fraction: float = 0.1) -> Exits:
    if not (0 < r < R_obs):
        raise ValueError(f"need 0 < r < R_obs, got r={r}, R_obs={R_obs}")
    coords = g.coords
    radius = np.hypot(coords[:, 0], coords[:, 1])
    root = tree.root
    if radius[root] > r:
        raise ValueError("tree root must lie inside B_r(o)")
    obs = g.points.window.observation(margin_fraction).inscribed_radius()
    if R_obs > obs:
        raise ValueError(f"R_obs={R_obs} exceeds the observation radius {obs:g}")
    parent = tree.parent
    order = _bfs_order(tree)
    inside = radius <= r
    pruned = np.zeros(g.n, dtype=bool)
    comp = np.full(g.n, -1, dtype=np.int64)
    pruned[root] = True
    for v in order[1:]:
        p = parent[v]
        if pruned[p] and inside[v]:
            pruned[v] = True
        else:
            comp[v] = v if pruned[p] else comp[p]
    far = (radius > R_obs) & (comp >= 0)
    heads = np.unique(comp[far])
    n_comp = int(np.count_nonzero((comp >= 0) & (comp == np.arange(g.n))))
    par = parent[heads]
    return Exits(par, heads, crossing_angles(coords[par], coords[heads], r), n_comp)


def crossing_angles(p: np.ndarray, q: np.ndarray, r: float) -> np.ndarray:
    """Polar angle where each segment p -> q (|p| <= r < |q|) meets the circle of radius r."""
    d = q - p
    a = (d ** 2).sum(axis=1)
    b = 2 * (p * d).sum(axis=1)
    c = (p ** 2).sum(axis=1) - r * r
    t = (-b + np.sqrt(np.maximum(b * b - 4 * a * c, 0.0))) / (2 * a)
    x = p + t[:, None] * d
    return np.arctan2(x[:, 1], x[:, 0])


def in_arc(angle: np.ndarray, center_angle: float, arc_length: float, r: float) -> np.ndarray:
    """Half-open arc of length ``arc_length`` on the circle of radius r, centred at ``center_angle``."""
    span = arc_length / r
    if span >= 2 * math.pi:
        return np.ones(len(angle), dtype=bool)
    off = np.mod(angle - (center_angle - span / 2), 2 * math.pi)
    off[off >= 2 * math.pi] = 0.0
    return off < span


def chi_r(tree: ShortestPathTree, g: ProximityGraph, r: float, R_obs: float) -> int:
    return len(unbounded_exits(tree, g, r, R_obs).child)


def chi_r_directional(tree: ShortestPathTree, g: ProximityGraph, r: float, R_obs: float,
                      u, c: float, exits: Exits | None = None) -> int:
    """As ``chi_r``, counting only subtrees entered across the arc of length c centred at r*u."""
    if not (0 < c <= 2 * math.pi * r * (1 + 1e-15)):
        raise ValueError("arc length must lie in (0, 2*pi*r]")
    if exits is None:
        exits = unbounded_exits(tree, g, r, R_obs)
    theta = math.atan2(u[1], u[0])
    return int(np.count_nonzero(in_arc(exits.angle, theta, c, r)))
