from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eucfpp.predicates import in_circle, in_circle_sos, orient2, orient2_many, incircle_raw_many


def frac_orient(a, b, c):
    ax, ay, bx, by, cx, cy = map(Fraction, (*a, *b, *c))
    d = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (d > 0) - (d < 0)


def frac_incircle(a, b, c, d):
    """Sign of the incircle determinant with abc made counterclockwise."""
    o = frac_orient(a, b, c)
    rows = []
    for p in (a, b, c):
        x, y = Fraction(p[0]) - Fraction(d[0]), Fraction(p[1]) - Fraction(d[1])
        rows.append((x, y, x * x + y * y))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    det = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)
    return ((det > 0) - (det < 0)) * o


def test_orient_basic():
    assert orient2((0, 0), (1, 0), (0, 1)) == 1
    assert orient2((0, 0), (0, 1), (1, 0)) == -1
    assert orient2((0, 0), (1, 0), (2, 0)) == 0


def test_incircle_basic():
    assert in_circle((1, 0), (0, 1), (-1, 0), (0, 0)) == 1
    assert in_circle((1, 0), (0, 1), (-1, 0), (0, -1)) == 0
    assert in_circle((1, 0), (0, 1), (-1, 0), (0, -2)) == -1
    # orientation of abc does not matter
    assert in_circle((-1, 0), (0, 1), (1, 0), (0, 0)) == 1


def test_incircle_collinear_raises():
    with pytest.raises(ValueError):
        in_circle((0, 0), (1, 1), (2, 2), (5, 0))


def near_collinear_triples(rng, n):
    a = rng.uniform(-1, 1, (n, 2))
    b = rng.uniform(-1, 1, (n, 2))
    t = rng.uniform(-2, 3, n)
    c = a + t[:, None] * (b - a)
    # nudge by a few ulps, or leave exactly on the float line
    c += rng.integers(-3, 4, (n, 2)) * np.spacing(np.abs(c))
    # a tenth of the triples are exactly collinear (small integers, dyadic t)
    k = n // 10
    ai = rng.integers(-50, 50, (k, 2)).astype(float)
    bi = rng.integers(-50, 50, (k, 2)).astype(float)
    ti = rng.integers(-8, 12, k) / 4
    a[:k], b[:k], c[:k] = ai, bi, ai + ti[:, None] * (bi - ai)
    return a, b, c


def test_orient_million_near_degenerate_vs_rational(rng):
    a, b, c = near_collinear_triples(rng, 1_000_000)
    got = orient2_many(a, b, c).tolist()
    A, B, C = a.tolist(), b.tolist(), c.tolist()
    bad = [k for k in range(len(A)) if got[k] != frac_orient(A[k], B[k], C[k])]
    assert bad == []
    assert got.count(0) >= 100_000


def test_orient_scalar_matches_vector(rng):
    a, b, c = near_collinear_triples(rng, 2000)
    vec = orient2_many(a, b, c)
    assert [orient2(a[k], b[k], c[k]) for k in range(2000)] == vec.tolist()


def test_incircle_near_cocircular_vs_rational(rng):
    n = 20_000
    th = rng.uniform(0, 2 * np.pi, (n, 4))
    ctr = rng.uniform(-5, 5, (n, 2))
    rad = rng.uniform(0.1, 10, n)
    P = ctr[:, None, :] + rad[:, None, None] * np.stack([np.cos(th), np.sin(th)], axis=2)
    P[:, 3] += rng.integers(-2, 3, (n, 2)) * np.spacing(np.abs(P[:, 3]))
    a, b, c, d = P[:, 0], P[:, 1], P[:, 2], P[:, 3]
    raw = incircle_raw_many(a, b, c, d)
    o = orient2_many(a, b, c)
    for k in range(n):
        if o[k] == 0:
            continue
        assert raw[k] * o[k] == frac_incircle(a[k], b[k], c[k], d[k])
        if k < 3000:
            assert in_circle(a[k], b[k], c[k], d[k]) == frac_incircle(a[k], b[k], c[k], d[k])


def test_incircle_exact_cocircular_grid():
    # integer points on x^2 + y^2 = 25 are exactly cocircular
    pts = [(5, 0), (3, 4), (0, 5), (-3, 4), (-4, -3), (4, -3)]
    for d in pts[3:]:
        assert in_circle(pts[0], pts[1], pts[2], d) == 0


def test_sos_never_zero_and_antisymmetric():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    s = in_circle_sos(pts, 0, 1, 2, 3)
    assert s in (-1, 1)
    # swapping the triangle orientation does not change the answer
    assert in_circle_sos(pts, 0, 2, 1, 3) == s


coord = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_orient_property(a, b, c):
    assert orient2(a, b, c) == frac_orient(a, b, c)
    assert orient2(b, a, c) == -orient2(a, b, c)


@given(st.lists(st.tuples(coord, coord), min_size=4, max_size=4, unique=True))
def test_incircle_property(p):
    a, b, c, d = p
    if frac_orient(a, b, c) == 0:
        return
    assert in_circle(a, b, c, d) == frac_incircle(a, b, c, d)
