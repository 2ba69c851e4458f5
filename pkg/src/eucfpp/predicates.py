"""Exact geometric predicates on double-precision coordinates.

Each predicate first evaluates the determinant in floating point and compares
it against a forward error bound (the static filters of Shewchuk's adaptive
predicates). Only when the float result is not certified is the determinant
recomputed exactly, using integer arithmetic on the binary expansions of the
inputs. Every double is a dyadic rational, so scaling by a common power of two
turns all coordinates into Python integers and the sign is exact.
"""

from __future__ import annotations

import numpy as np

_EPS = 2.0**-53
CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS
# |fl(|p-q|^2) - |p-q|^2| <= 4 eps |p-q|^2 (one subtraction, square, add);
# doubled for margin.
SQDIST_ERRBOUND = 8.0 * _EPS


def _scaled_ints(*vals: float) -> list[int]:
    """Exact integers proportional to ``vals`` (common power-of-two scale)."""
    ratios = [float(v).as_integer_ratio() for v in vals]
    den = max(d for _, d in ratios)
    return [n * (den // d) for n, d in ratios]


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def orient2_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = _scaled_ints(ax, ay, bx, by, cx, cy)
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle_exact(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    """Raw incircle determinant sign: positive iff d inside circle(a,b,c) when abc is ccw."""
    ax, ay, bx, by, cx, cy, dx, dy = _scaled_ints(ax, ay, bx, by, cx, cy, dx, dy)
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def orient2(a, b, c) -> int:
    """Sign of the signed area of triangle (a, b, c): +1 ccw, -1 cw, 0 collinear."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    errbound = CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return orient2_exact(ax, ay, bx, by, cx, cy)


def _incircle_raw(a, b, c, d) -> int:
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    dx, dy = float(d[0]), float(d[1])
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    errbound = ICC_ERRBOUND * permanent
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return incircle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def in_circle(a, b, c, d) -> int:
    """+1 if d is strictly inside the circle through a, b, c; 0 if cocircular; -1 outside.

    The answer does not depend on the orientation of (a, b, c). Raises
    ``ValueError`` when a, b, c are collinear.
    """
    o = orient2(a, b, c)
    if o == 0:
        raise ValueError("in_circle: a, b, c are collinear")
    return o * _incircle_raw(a, b, c, d)


def in_circle_sos(pts, ia: int, ib: int, ic: int, id_: int) -> int:
    """Perturbed in-circle test on indexed points; never returns 0.

    Cocircular ties are broken by lowering the lifted image of each point by
    an infinitesimal that dominates for smaller indices. For four cocircular
    points this keeps the diagonal incident to the smallest index, which is
    the same as keeping the diagonal whose smaller endpoint index is smaller.
    Requires (ia, ib, ic) not collinear and the four points distinct.
    """
    a, b, c, d = pts[ia], pts[ib], pts[ic], pts[id_]
    o = orient2(a, b, c)
    if o == 0:
        raise ValueError("in_circle_sos: a, b, c are collinear")
    if o < 0:
        ib, ic = ic, ib
        b, c = c, b
    s = _incircle_raw(a, b, c, d)
    if s != 0:
        return s
    m = min(ia, ib, ic, id_)
    if m == id_:
        return 1
    if m == ia:
        return -orient2(d, b, c)
    if m == ib:
        return -orient2(a, d, c)
    return -orient2(a, b, d)


# ---------------------------------------------------------------------------
# vectorised forms: float filter over arrays, exact fallback on the residue

def orient2_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Row-wise ``orient2`` on (k, 2) arrays; returns int8 signs."""
    detleft = (a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1])
    detright = (a[:, 1] - c[:, 1]) * (b[:, 0] - c[:, 0])
    det = detleft - detright
    errbound = CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    out = np.zeros(len(det), dtype=np.int8)
    out[det > errbound] = 1
    out[-det > errbound] = -1
    for k in np.flatnonzero(~(np.abs(det) > errbound)):
        out[k] = orient2_exact(a[k, 0], a[k, 1], b[k, 0], b[k, 1], c[k, 0], c[k, 1])
    return out


def incircle_raw_many(a, b, c, d) -> np.ndarray:
    """Row-wise raw incircle sign (positive iff d inside when abc is ccw)."""
    adx, ady = a[:, 0] - d[:, 0], a[:, 1] - d[:, 1]
    bdx, bdy = b[:, 0] - d[:, 0], b[:, 1] - d[:, 1]
    cdx, cdy = c[:, 0] - d[:, 0], c[:, 1] - d[:, 1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((np.abs(bdxcdy) + np.abs(cdxbdy)) * alift
                 + (np.abs(cdxady) + np.abs(adxcdy)) * blift
                 + (np.abs(adxbdy) + np.abs(bdxady)) * clift)
    errbound = ICC_ERRBOUND * permanent
    out = np.zeros(len(det), dtype=np.int8)
    out[det > errbound] = 1
    out[-det > errbound] = -1
    for k in np.flatnonzero(~(np.abs(det) > errbound)):
        out[k] = incircle_exact(a[k, 0], a[k, 1], b[k, 0], b[k, 1],
                                c[k, 0], c[k, 1], d[k, 0], d[k, 1])
    return out


def sqdist_exact_cmp(px, py, qx, qy, rx, ry, sx, sy) -> int:
    """sign(|p - q|^2 - |r - s|^2), exactly."""
    px, py, qx, qy, rx, ry, sx, sy = _scaled_ints(px, py, qx, qy, rx, ry, sx, sy)
    return _sign((px - qx) ** 2 + (py - qy) ** 2 - (rx - sx) ** 2 - (ry - sy) ** 2)


def sqdist_cmp_many(p, q, r, s) -> np.ndarray:
    """Row-wise exact sign(|p - q|^2 - |r - s|^2) on (k, 2) arrays."""
    d1 = ((p - q) ** 2).sum(axis=1)
    d2 = ((r - s) ** 2).sum(axis=1)
    diff = d1 - d2
    bound = SQDIST_ERRBOUND * (d1 + d2)
    out = np.zeros(len(diff), dtype=np.int8)
    out[diff > bound] = 1
    out[-diff > bound] = -1
    for k in np.flatnonzero(~(np.abs(diff) > bound)):
        out[k] = sqdist_exact_cmp(p[k, 0], p[k, 1], q[k, 0], q[k, 1],
                                  r[k, 0], r[k, 1], s[k, 0], s[k, 1])
    return out
