import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eucfpp.geom import (CSVFormatError, EmptyInputError, PointSet, SeedStream, Window, nearest_vertex,
                         read_points_csv, sample_ppp, write_points_csv)


def test_window_basics():
    w = Window.centered(10, 4)
    assert w.bounds == (-5, 5, -2, 2)
    assert w.area == 40
    obs = w.observation()
    assert obs.bounds == pytest.approx((-4.8, 4.8, -1.8, 1.8))
    assert Window.from_bounds(0, 10, 0, 10) == Window(5, 5, 5, 5)
    with pytest.raises(ValueError):
        Window(0, 0, 0, 1)
    with pytest.raises(ValueError):
        Window(math.nan, 0, 1, 1)


def test_zero_intensity_empty():
    ps = sample_ppp(Window.centered(1), 0.0, SeedStream(3))
    assert len(ps) == 0


def test_sample_deterministic():
    w = Window.from_bounds(0, 10, 0, 10)
    a = sample_ppp(w, 1.0, SeedStream(42, 7))
    b = sample_ppp(w, 1.0, SeedStream(42, 7))
    assert a == b
    assert a.points.tobytes() == b.points.tobytes()
    c = sample_ppp(w, 1.0, SeedStream(42, 8))
    assert a != c


def test_sample_invalid_intensity():
    with pytest.raises(ValueError):
        sample_ppp(Window.centered(1), math.inf, SeedStream(0))
    with pytest.raises(ValueError):
        sample_ppp(Window.centered(1), -1.0, SeedStream(0))


def test_poisson_moments():
    w = Window.from_bounds(0, 10, 0, 10)
    counts = np.array([len(sample_ppp(w, 1.0, SeedStream(2024, i))) for i in range(1000)])
    assert abs(counts.mean() - 100) <= 1.0
    # Var(s^2) = (mu_4 - sigma^4 (n-3)/(n-1)) / n with mu_4 = mu + 3 mu^2 for Poisson(mu)
    mu, n = 100, 1000
    sd_var = math.sqrt((mu + 3 * mu**2 - mu**2 * (n - 3) / (n - 1)) / n)
    assert abs(counts.var(ddof=1) - 100) <= 4 * sd_var


def test_uniform_positions():
    ps = sample_ppp(Window.from_bounds(0, 10, 0, 10), 50.0, SeedStream(5))
    assert np.all(ps.window.contains(ps.points))
    # each quadrant holds about a quarter of the points
    q = (ps.points[:, 0] > 5).astype(int) * 2 + (ps.points[:, 1] > 5)
    frac = np.bincount(q, minlength=4) / len(ps)
    assert np.all(np.abs(frac - 0.25) < 0.03)


def test_pointset_validation():
    w = Window.centered(2)
    with pytest.raises(ValueError):
        PointSet(np.array([[0.0, 0.0], [0.0, 0.0]]), w)
    with pytest.raises(ValueError):
        PointSet(np.array([[5.0, 0.0]]), w)
    with pytest.raises(ValueError):
        PointSet(np.array([[math.nan, 0.0]]), w)
    ps = PointSet(np.array([[0.0, 0.0]]), w)
    with pytest.raises(ValueError):
        ps.points[0, 0] = 1.0


def test_nearest_vertex_examples():
    assert nearest_vertex(np.array([[1.0, 0.0]]), (0, 0)) == 0
    assert nearest_vertex(np.array([[1.0, 0.0], [-1.0, 0.0]]), (0, 0)) == 0
    assert nearest_vertex(np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), (0, 0)) == 0
    with pytest.raises(EmptyInputError):
        nearest_vertex(np.zeros((0, 2)), (0, 0))


def test_nearest_vertex_linear_scan(rng):
    pts = rng.uniform(-1, 1, (100, 2))
    for q in rng.uniform(-1.5, 1.5, (200, 2)):
        d = [(float((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2), i) for i, p in enumerate(pts)]
        assert nearest_vertex(pts, q) == min(d)[1]


def test_nearest_vertex_exact_ties_on_lattice():
    pts = np.array([[x, y] for x in range(-3, 4) for y in range(-3, 4)], dtype=float)
    # (0.5, 0.5) is equidistant from four lattice points; the smallest index wins
    cands = [i for i, p in enumerate(pts) if abs(p[0] - 0.5) == 0.5 and abs(p[1] - 0.5) == 0.5]
    assert nearest_vertex(pts, (0.5, 0.5)) == min(cands)


def test_csv_roundtrip(tmp_path):
    ps = sample_ppp(Window.centered(10), 1.0, SeedStream(9))
    p = tmp_path / "pts.csv"
    text = write_points_csv(ps, p)
    assert text.startswith("id,x,y\n")
    back = read_points_csv(p, ps.window)
    assert np.array_equal(back.points, ps.points)


@pytest.mark.parametrize("body,line", [
    ("x,y\n0,1,2\n", 1),
    ("id,x,y\n0,1,2\n1,abc,3\n", 3),
    ("id,x,y\n0,1\n", 2),
    ("id,x,y\n1,1,2\n", 2),
    ("id,x,y\n0,nan,2\n", 2),
])
def test_csv_errors_carry_line(tmp_path, body, line):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(CSVFormatError) as exc:
        read_points_csv(p)
    assert exc.value.line == line


finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=30, unique=True), st.tuples(finite, finite))
def test_nearest_vertex_property(pts, q):
    arr = np.array(pts)
    i = nearest_vertex(arr, q)
    from fractions import Fraction
    d = [(Fraction(x) - Fraction(q[0])) ** 2 + (Fraction(y) - Fraction(q[1])) ** 2 for x, y in pts]
    assert d[i] == min(d)
    assert i == d.index(min(d))
