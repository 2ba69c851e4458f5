"""Point-process sampling, windows, seed streams and point-set I/O."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .predicates import orient2, in_circle, sqdist_exact_cmp  # noqa: F401  (re-exported)


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle given by its centre and half extents."""

    cx: float = 0.0
    cy: float = 0.0
    half_width: float = 1.0
    half_height: float = 1.0

    def __post_init__(self):
        vals = (self.cx, self.cy, self.half_width, self.half_height)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("window parameters must be finite")
        if self.half_width <= 0 or self.half_height <= 0:
            raise ValueError("window half extents must be positive")

    @classmethod
    def from_bounds(cls, xmin, xmax, ymin, ymax) -> "Window":
        return cls((xmin + xmax) / 2, (ymin + ymax) / 2, (xmax - xmin) / 2, (ymax - ymin) / 2)

    @classmethod
    def centered(cls, width: float, height: float | None = None) -> "Window":
        height = width if height is None else height
        return cls(0.0, 0.0, width / 2, height / 2)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.cx - self.half_width, self.cx + self.half_width,
                self.cy - self.half_height, self.cy + self.half_height)

    @property
    def area(self) -> float:
        return 4.0 * self.half_width * self.half_height

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        xmin, xmax, ymin, ymax = self.bounds
        return ((pts[:, 0] >= xmin) & (pts[:, 0] <= xmax)
                & (pts[:, 1] >= ymin) & (pts[:, 1] <= ymax))

    def shrink(self, margin: float) -> "Window":
        if margin >= min(self.half_width, self.half_height):
            raise ValueError("margin leaves an empty window")
        return Window(self.cx, self.cy, self.half_width - margin, self.half_height - margin)

    def observation(self, margin_fraction: float = 0.1) -> "Window":
        """Inner region where boundary effects are considered negligible."""
        return self.shrink(margin_fraction * min(self.half_width, self.half_height))

    def inscribed_radius(self, center=(0.0, 0.0)) -> float:
        """Radius of the largest disk around ``center`` inside the window."""
        xmin, xmax, ymin, ymax = self.bounds
        return min(center[0] - xmin, xmax - center[0], center[1] - ymin, ymax - center[1])


@dataclass(frozen=True)
class SeedStream:
    """A replicate-level random stream derived from a master seed.

    Streams are keyed by ``numpy.random.SeedSequence(entropy=master_seed,
    spawn_key=(stream_index,))``, whose hashing makes distinct keys independent.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= self.master_seed < 2**64) or self.stream_index < 0:
            raise ValueError("master_seed must be a 64-bit unsigned integer and stream_index >= 0")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray
    window: Window
    seed: int | None = None
    intensity: float = 1.0

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        if not np.all(self.window.contains(pts)):
            raise ValueError("all points must lie inside the window")
        if len(pts) > 1 and len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("duplicate points in PointSet")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.window == other.window and self.seed == other.seed
                and self.intensity == other.intensity
                and np.array_equal(self.points, other.points))

    __hash__ = object.__hash__

    @classmethod
    def from_points(cls, pts, window: Window | None = None, **kw) -> "PointSet":
        pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        if window is None:
            if len(pts) == 0:
                window = Window()
            else:
                xmin, ymin = pts.min(axis=0)
                xmax, ymax = pts.max(axis=0)
                pad = max(1.0, 0.05 * max(xmax - xmin, ymax - ymin))
                window = Window.from_bounds(xmin - pad, xmax + pad, ymin - pad, ymax + pad)
        return cls(pts, window, **kw)


def sample_ppp(window: Window, intensity: float, stream: SeedStream) -> PointSet:
    """Homogeneous Poisson point process on ``window``, fully determined by ``stream``."""
    if not math.isfinite(intensity) or intensity < 0:
        raise ValueError(f"invalid intensity {intensity!r}")
    rng = stream.generator()
    n = int(rng.poisson(intensity * window.area))
    xmin, xmax, ymin, ymax = window.bounds
    pts = np.column_stack([rng.uniform(xmin, xmax, n), rng.uniform(ymin, ymax, n)])
    # duplicates have probability ~0 in floats; redraw them so the set stays simple
    while n > 1:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == n:
            break
        dup = np.setdiff1d(np.arange(n), first)
        pts[dup] = np.column_stack([rng.uniform(xmin, xmax, len(dup)),
                                    rng.uniform(ymin, ymax, len(dup))])
    return PointSet(pts, window, seed=stream.master_seed, intensity=intensity)


def sample_uniform(window: Window, n: int, stream: SeedStream) -> PointSet:
    """Exactly n independent uniform points in ``window`` (the binomial process)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = stream.generator()
    xmin, xmax, ymin, ymax = window.bounds
    pts = np.column_stack([rng.uniform(xmin, xmax, n), rng.uniform(ymin, ymax, n)])
    while n > 1:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == n:
            break
        dup = np.setdiff1d(np.arange(n), first)
        pts[dup] = np.column_stack([rng.uniform(xmin, xmax, len(dup)),
                                    rng.uniform(ymin, ymax, len(dup))])
    return PointSet(pts, window, seed=stream.master_seed, intensity=n / window.area)


def nearest_vertex(ps: PointSet | np.ndarray, q) -> int:
    """Index of the point closest to ``q``; exact ties go to the smallest index."""
    pts = ps.points if isinstance(ps, PointSet) else np.asarray(ps, dtype=np.float64)
    if len(pts) == 0:
        raise EmptyInputError("nearest_vertex on an empty point set")
    qx, qy = float(q[0]), float(q[1])
    d2 = (pts[:, 0] - qx) ** 2 + (pts[:, 1] - qy) ** 2
    best = int(np.argmin(d2))
    # float d^2 can tie or invert near-equal distances; settle those exactly
    near = np.flatnonzero(d2 <= d2[best] * (1.0 + 1e-12) + 1e-300)
    for k in near:
        k = int(k)
        if k == best:
            continue
        c = sqdist_exact_cmp(pts[k, 0], pts[k, 1], qx, qy, pts[best, 0], pts[best, 1], qx, qy)
        if c < 0 or (c == 0 and k < best):
            best = k
    return best


def observation_mask(pts: np.ndarray, window: Window, margin_fraction: float = 0.1) -> np.ndarray:
    return window.observation(margin_fraction).contains(pts)


# ---------------------------------------------------------------------------
# CSV I/O: header ``id,x,y``; 17 significant digits round-trip doubles exactly

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_points_csv(ps: PointSet, path: str | Path | None = None) -> str:
    buf = io.StringIO()
    buf.write("id,x,y\n")
    for i, (x, y) in enumerate(ps.points):
        buf.write(f"{i},{_fmt(x)},{_fmt(y)}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


class CSVFormatError(ValueError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def read_points_csv(path: str | Path, window: Window | None = None) -> PointSet:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["id", "x", "y"]:
            raise CSVFormatError("expected header 'id,x,y'", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CSVFormatError(f"expected 3 fields, got {len(row)}", lineno)
            try:
                i, x, y = int(row[0]), float(row[1]), float(row[2])
            except ValueError as exc:
                raise CSVFormatError(str(exc), lineno) from None
            if i != len(rows):
                raise CSVFormatError(f"ids must be 0..n-1 in order, got {i}", lineno)
            if not (math.isfinite(x) and math.isfinite(y)):
                raise CSVFormatError("non-finite coordinate", lineno)
            rows.append((x, y))
    return PointSet.from_points(np.array(rows, dtype=np.float64).reshape(-1, 2), window)
