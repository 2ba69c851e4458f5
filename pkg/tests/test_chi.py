import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eucfpp.experiments.chi import (chi_r, chi_r_directional, crossing_angles, in_arc,
                                    unbounded_exits)
from eucfpp.fpp import ShortestPathTree, shortest_path_tree
from eucfpp.geom import PointSet, SeedStream, Window, nearest_vertex, sample_ppp
from eucfpp.graphs import GraphKind, ProximityGraph, build_delaunay, edges_crossing_circle


def six_point_tree():
    """Root at the origin; branch 0-1-2-3 escapes past R_obs = 30, branch 0-4-5 stops at 12."""
    pts = np.array([(0, 0), (5, 0), (15, 0), (35, 0), (0, 5), (0, 12)], dtype=float)
    ps = PointSet(pts, Window(0, 0, 50, 50))
    edges = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5)]
    g = ProximityGraph.from_edges(GraphKind.DELAUNAY, ps, edges)
    return g, shortest_path_tree(g, 0)


def test_hand_built_one_escaping_branch():
    g, tree = six_point_tree()
    assert chi_r(tree, g, 10.0, 30.0) == 1
    ex = unbounded_exits(tree, g, 10.0, 30.0)
    assert ex.child.tolist() == [2] and ex.parent.tolist() == [1]
    assert ex.n_components == 2
    assert ex.angle[0] == pytest.approx(0.0)
    # the arc around +x sees it, the arc around +y does not
    assert chi_r_directional(tree, g, 10.0, 30.0, (1, 0), 1.0) == 1
    assert chi_r_directional(tree, g, 10.0, 30.0, (0, 1), 1.0) == 0


def test_tree_inside_observation_disk_gives_zero():
    g, tree = six_point_tree()
    assert chi_r(tree, g, 10.0, 40.0) == 0


def test_parameter_errors():
    g, tree = six_point_tree()
    with pytest.raises(ValueError):
        chi_r(tree, g, 30.0, 30.0)
    with pytest.raises(ValueError):
        chi_r(tree, g, 10.0, 46.0)     # beyond the observation radius 45
    with pytest.raises(ValueError):
        chi_r_directional(tree, g, 10.0, 30.0, (1, 0), 0.0)
    with pytest.raises(ValueError):
        chi_r_directional(tree, g, 10.0, 30.0, (1, 0), 2 * math.pi * 10 + 1)


def test_crossing_angles():
    p = np.array([[0.0, 0.0], [1.0, 1.0]])
    q = np.array([[0.0, 5.0], [1.0, 9.0]])
    a = crossing_angles(p, q, 2.0)
    assert a[0] == pytest.approx(math.pi / 2)
    assert a[1] == pytest.approx(math.atan2(math.sqrt(3), 1))


def test_in_arc_half_open():
    r = 1.0
    ang = np.array([-0.5, 0.0, 0.4999999, 0.5])
    assert in_arc(ang, 0.0, 1.0, r).tolist() == [True, True, True, False]
    assert in_arc(ang, 0.0, 2 * math.pi, r).all()


@pytest.fixture(scope="module")
def sample():
    ps = sample_ppp(Window.centered(140), 1.0, SeedStream(77))
    g = build_delaunay(ps)
    return g, shortest_path_tree(g, nearest_vertex(ps, (0, 0)))


def test_full_circle_equals_chi(sample):
    g, tree = sample
    for r in (10.0, 25.0, 40.0):
        assert chi_r_directional(tree, g, r, 60.0, (0.3, 0.9), 2 * math.pi * r) == chi_r(tree, g, r, 60.0)


def test_chi_bounded_by_crossing_tree_edges(sample):
    g, tree = sample
    for r in (10.0, 25.0, 40.0):
        e = edges_crossing_circle(g, (0, 0), r)
        tree_edges = {(min(v, p), max(v, p)) for v, p in enumerate(tree.parent.tolist()) if p >= 0}
        crossing = [tuple(x) for x in e.tolist() if tuple(x) in tree_edges]
        assert chi_r(tree, g, r, 60.0) <= len(crossing)


def test_chi_matches_direct_recount(sample):
    """Recount components directly: delete pruned vertices, then label by connectivity."""
    g, tree = sample
    r, R = 25.0, 60.0
    rad = np.hypot(*g.coords.T)
    pruned = set()
    for v in range(g.n):
        seq = tree.path_to(v).vertices
        if all(rad[u] <= r for u in seq):
            pruned.add(v)
    kids = tree.children()
    count = 0
    for v in range(g.n):
        if v in pruned or int(tree.parent[v]) not in pruned:
            continue
        stack, far = [v], False
        while stack:
            u = stack.pop()
            far |= rad[u] > R
            stack += [w for w in kids[u] if w not in pruned]
        count += far
    assert chi_r(tree, g, r, R) == count


@given(st.integers(1, 12), st.floats(0, 2 * math.pi), st.sampled_from([10.0, 25.0, 40.0]))
def test_partition_additivity(sample, k, phase, r):
    g, tree = sample
    ex = unbounded_exits(tree, g, r, 60.0)
    total = sum(chi_r_directional(tree, g, r, 60.0, (math.cos(phase + j * 2 * math.pi / k),
                                                      math.sin(phase + j * 2 * math.pi / k)),
                                  2 * math.pi * r / k, ex) for j in range(k))
    assert total == len(ex.child)


@given(st.floats(0, 2 * math.pi), st.floats(0.1, 100.0), st.floats(0.1, 100.0))
def test_directional_monotone_and_bounded(sample, theta, c1, c2):
    g, tree = sample
    r = 25.0
    c1, c2 = sorted((min(c1, 2 * math.pi * r), min(c2, 2 * math.pi * r)))
    u = (math.cos(theta), math.sin(theta))
    ex = unbounded_exits(tree, g, r, 60.0)
    a = chi_r_directional(tree, g, r, 60.0, u, c1, ex)
    b = chi_r_directional(tree, g, r, 60.0, u, c2, ex)
    assert a <= b <= len(ex.child)


def test_arc_avoided_gives_zero(sample):
    g, tree = sample
    ex = unbounded_exits(tree, g, 25.0, 60.0)
    ang = np.sort(np.mod(ex.angle, 2 * math.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    k = int(np.argmax(gaps))
    mid = ang[k] + gaps[k] / 2
    c = 0.5 * gaps[k] * 25.0
    assert chi_r_directional(tree, g, 25.0, 60.0, (math.cos(mid), math.sin(mid)), c, ex) == 0
