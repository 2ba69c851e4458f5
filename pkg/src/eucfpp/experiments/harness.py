"""Replicate runner, summary rows and deterministic result files."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geom import PointSet, SeedStream, sample_ppp, sample_uniform
from .config import ExperimentConfig


@dataclass
class StatRow:
    params: dict
    estimate: float
    stderr: float
    replicates: int
    excluded: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.stderr >= 0 and not math.isnan(self.stderr):
            raise ValueError("stderr must be non-negative")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    fatal: bool
    detail: str = ""


@dataclass
class ExperimentResult:
    name: str
    config: ExperimentConfig
    rows: list[StatRow]
    checks: list[Check] = field(default_factory=list)
    replicate_data: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.fatal)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def columns(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            for k in list(row.params) + ["estimate", "stderr"] + list(row.extra):
                if k not in cols:
                    cols.append(k)
        return cols + ["replicates", "excluded", "master_seed"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = self.columns()
        w.writerow(cols)
        for row in self.rows:
            vals = {**row.params, "estimate": row.estimate, "stderr": row.stderr, **row.extra,
                    "replicates": row.replicates, "excluded": row.excluded,
                    "master_seed": self.config.master_seed}
            w.writerow([_fmt(vals.get(c, "")) for c in cols])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "experiment": self.name,
            "config": self.config.to_dict(),
            "rows": [{"params": r.params, "estimate": r.estimate, "stderr": r.stderr,
                      "replicates": r.replicates, "excluded": r.excluded, **r.extra}
                     for r in self.rows],
            "checks": [{"name": c.name, "passed": c.passed, "fatal": c.fatal, "detail": c.detail}
                       for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def mean_stderr(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    if len(a) == 0:
        return math.nan, math.nan
    if len(a) == 1:
        return float(a[0]), 0.0
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(len(a)))


def replicate_points(cfg: ExperimentConfig, i: int) -> PointSet:
    stream = SeedStream(cfg.master_seed, i)
    if cfg.n_points is not None:
        return sample_uniform(cfg.window, cfg.n_points, stream)
    return sample_ppp(cfg.window, cfg.intensity, stream)


def replicate_rng(cfg: ExperimentConfig, i: int) -> np.random.Generator:
    """Auxiliary randomness for replicate i, independent of its point sample."""
    return np.random.default_rng(np.random.SeedSequence(cfg.master_seed, spawn_key=(i, 1)))


def run_replicates(fn, cfg: ExperimentConfig, threads: int = 1) -> list:
    """``fn(cfg, i)`` for every replicate, returned in replicate order."""
    idx = range(cfg.replicates)
    if threads <= 1 or cfg.replicates == 1:
        return [fn(cfg, i) for i in idx]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, [cfg] * cfg.replicates, idx))


def write_result(result: ExperimentResult, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """results.csv (for fmt csv) and the results.json mirror; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if fmt == "csv":
        p = out / "results.csv"
        p.write_text(result.to_csv())
        paths.append(p)
    elif fmt != "json":
        raise ValueError(f"unknown format {fmt!r}")
    p = out / "results.json"
    p.write_text(result.to_json())
    paths.append(p)
    return paths
