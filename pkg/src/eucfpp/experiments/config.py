"""Experiment configuration: one flat dataclass, JSON in and out."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..geom import Window
from ..graphs import GraphKind

EXPERIMENTS = ("time-constant", "spanner", "coalescence", "sublinearity", "chains", "highways")


class ConfigError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


@dataclass
class ExperimentConfig:
    experiment: str = "time-constant"
    graph_kind: str = "delaunay"
    window_width: float = 600.0
    window_height: float = 600.0
    window_center: list[float] = field(default_factory=lambda: [0.0, 0.0])
    intensity: float = 1.0
    n_points: int | None = None     # fixed point count instead of a Poisson count
    master_seed: int = 0
    replicates: int = 30
    margin_fraction: float = 0.1
    # time constant
    n_values: list[float] = field(default_factory=lambda: [200.0])
    # spanner / hard bounds
    barrier: float = 0.0
    # coalescence
    separations: list[float] = field(default_factory=lambda: [10.0])
    radii: list[float] = field(default_factory=lambda: [50.0, 100.0, 200.0])
    direction_angle: float = 0.0
    cone_half_angle: float = 0.25
    # sublinearity
    r_values: list[float] = field(default_factory=lambda: [20.0, 40.0, 80.0])
    R_obs: float | None = None
    arc_length: float = 10.0
    arc_partition: int = 8
    # descending chains
    b_values: list[float] = field(default_factory=lambda: [1.0, 1.5, 2.0])
    start_half_size: float = 2.0
    # highways
    L: float = 20.0
    m_values: list[float] = field(default_factory=lambda: [0.0, 10.0, 20.0, 40.0])
    forest_radius: float | None = None

    @property
    def window(self) -> Window:
        cx, cy = self.window_center
        return Window(float(cx), float(cy), self.window_width / 2, self.window_height / 2)

    @property
    def observation(self) -> Window:
        return self.window.observation(self.margin_fraction)

    @property
    def r_obs(self) -> float:
        if self.R_obs is not None:
            return self.R_obs
        w = self.window
        return 0.9 * min(w.half_width, w.half_height)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def replace(self, **kw) -> "ExperimentConfig":
        cfg = dataclasses.replace(self, **kw)
        cfg.validate()
        return cfg

    @classmethod
    def from_dict(cls, data: dict, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("$", "config must be a JSON object")
        fields = {f.name: f for f in dataclasses.fields(cls)}
        values = dataclasses.asdict(base) if base is not None else {}
        for key, val in data.items():
            if key not in fields:
                raise ConfigError(key, "unknown field")
            values[key] = _coerce(key, val, fields[key].type)
        cfg = cls(**values)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON ({exc})") from None
        return cls.from_dict(data, base)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
        try:
            GraphKind(self.graph_kind)
        except ValueError:
            raise ConfigError("graph_kind", "must be 'delaunay' or 'rng'") from None
        if not (self.window_width > 0 and self.window_height > 0):
            raise ConfigError("window_width", "window extents must be positive")
        if len(self.window_center) != 2:
            raise ConfigError("window_center", "expected [x, y]")
        if not (math.isfinite(self.intensity) and self.intensity >= 0):
            raise ConfigError("intensity", "must be finite and non-negative")
        if self.n_points is not None and self.n_points < 2:
            raise ConfigError("n_points", "must be >= 2 (or null for a Poisson count)")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed", "must be a 64-bit unsigned integer")
        if self.replicates < 1:
            raise ConfigError("replicates", "must be >= 1")
        if not 0 <= self.margin_fraction < 1:
            raise ConfigError("margin_fraction", "must lie in [0, 1)")
        obs = self.observation
        check = getattr(self, "_check_" + self.experiment.replace("-", "_"))
        check(obs)

    # per-experiment geometry checks: every probe must sit in the observation region

    def _inside(self, obs: Window, pts, name: str) -> None:
        for k, p in enumerate(pts):
            if not obs.contains([p])[0]:
                raise ConfigError(f"{name}[{k}]", f"point {tuple(p)} lies outside the observation region")

    def _check_time_constant(self, obs):
        _positive_list(self.n_values, "n_values")
        self._inside(obs, [(0.0, 0.0)] + [(n, 0.0) for n in self.n_values], "n_values")

    def _check_spanner(self, obs):
        if self.graph_kind != "delaunay":
            raise ConfigError("graph_kind", "the spanner bound concerns the Delaunay triangulation")

    def _check_coalescence(self, obs):
        _positive_list(self.radii, "radii")
        _nonneg_list(self.separations, "separations")
        u = (math.cos(self.direction_angle), math.sin(self.direction_angle))
        self._inside(obs, [(R * u[0], R * u[1]) for R in self.radii], "radii")
        v = (-u[1], u[0])
        self._inside(obs, [(s / 2 * v[0], s / 2 * v[1]) for s in self.separations], "separations")

    def _check_sublinearity(self, obs):
        _positive_list(self.r_values, "r_values")
        R = self.r_obs
        if R > obs.inscribed_radius():
            raise ConfigError("R_obs", f"{R:g} exceeds the observation radius {obs.inscribed_radius():g}")
        for k, r in enumerate(self.r_values):
            if r >= R:
                raise ConfigError(f"r_values[{k}]", f"must be below R_obs={R:g}")
        if self.arc_length <= 0:
            raise ConfigError("arc_length", "must be positive")
        if self.arc_partition < 1:
            raise ConfigError("arc_partition", "must be >= 1")

    def _check_chains(self, obs):
        _positive_list(self.b_values, "b_values")
        if self.start_half_size <= 0:
            raise ConfigError("start_half_size", "must be positive")

    def _check_highways(self, obs):
        _nonneg_list(self.m_values, "m_values")
        if self.L <= 0:
            raise ConfigError("L", "must be positive")
        u = (math.cos(self.direction_angle), math.sin(self.direction_angle))
        v = (-u[1], u[0])
        ends = []
        for m in self.m_values:
            ends += [(-m * u[0], -m * u[1]), (-m * u[0] + self.L * v[0], -m * u[1] + self.L * v[1])]
        self._inside(obs, ends, "m_values")
        R = self.highway_radius
        self._inside(obs, [(-R * u[0], -R * u[1])], "forest_radius")
        if R <= max(self.m_values):
            raise ConfigError("forest_radius", "sink must lie beyond the farthest line")

    @property
    def highway_radius(self) -> float:
        if self.forest_radius is not None:
            return self.forest_radius
        obs = self.observation
        u = (math.cos(self.direction_angle), math.sin(self.direction_angle))
        # distance from the origin to the observation boundary along -u, minus a small buffer
        xmin, xmax, ymin, ymax = obs.bounds
        ts = []
        for c, lo, hi in ((-u[0], xmin, xmax), (-u[1], ymin, ymax)):
            if c > 0:
                ts.append(hi / c)
            elif c < 0:
                ts.append(lo / c)
        return 0.95 * min(ts)


def _positive_list(vals, name):
    if not vals:
        raise ConfigError(name, "must not be empty")
    for k, v in enumerate(vals):
        if not (isinstance(v, (int, float)) and v > 0):
            raise ConfigError(f"{name}[{k}]", "must be a positive number")


def _nonneg_list(vals, name):
    if not vals:
        raise ConfigError(name, "must not be empty")
    for k, v in enumerate(vals):
        if not (isinstance(v, (int, float)) and v >= 0):
            raise ConfigError(f"{name}[{k}]", "must be a non-negative number")


def _coerce(key: str, val, typ):
    typ = str(typ)
    if val is None:
        if "None" in typ:
            return None
        raise ConfigError(key, "must not be null")
    if typ.startswith("list"):
        if not isinstance(val, list):
            raise ConfigError(key, "expected a list")
        out = []
        for k, v in enumerate(val):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{key}[{k}]", "expected a number")
            out.append(float(v))
        return out
    if typ.startswith("int"):
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError(key, "expected an integer")
        return val
    if typ.startswith("float"):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(key, "expected a number")
        return float(val)
    if typ.startswith("str"):
        if not isinstance(val, str):
            raise ConfigError(key, "expected a string")
        return val
    return val


PRESETS: dict[str, dict] = {
    "time-constant": dict(window_width=600.0, window_height=600.0, replicates=30, n_values=[200.0]),
    "spanner": dict(window_width=math.sqrt(2000.0), window_height=math.sqrt(2000.0), n_points=2000,
                    replicates=50),
    "coalescence": dict(window_width=340.0, window_height=200.0, window_center=[100.0, 0.0],
                        replicates=100, separations=[10.0], radii=[50.0, 100.0, 200.0]),
    "sublinearity": dict(window_width=280.0, window_height=280.0, replicates=50,
                         r_values=[20.0, 40.0, 80.0], R_obs=120.0),
    "chains": dict(window_width=20.0, window_height=20.0, replicates=100),
    "highways": dict(window_width=200.0, window_height=100.0, replicates=50, L=20.0,
                     m_values=[0.0, 10.0, 20.0, 40.0]),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    """The default protocol for ``name``; keyword overrides applied on top."""
    if name not in PRESETS:
        raise ConfigError("experiment", f"unknown experiment {name!r}")
    data = dict(PRESETS[name], experiment=name)
    data.update(overrides)
    return ExperimentConfig.from_dict(data)
