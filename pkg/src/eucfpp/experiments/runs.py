"""The Monte Carlo experiments.

Each experiment is a per-replicate function ``_rep_*(cfg, i)`` (module level so
worker processes can pickle it) plus an aggregation step that only looks at the
replicate results in index order.
"""

from __future__ import annotations

import math

import numpy as np

from ..fpp import Barrier, distances_from, shortest_path_tree
from ..forest import (DirectionSpec, build_directed_forest, coalescence, cone_fraction,
                      directional_geodesic, directional_tree, highway_counts)
from ..geom import EmptyInputError, Window, nearest_vertex
from ..graphs import GraphKind, build_delaunay, build_graph, build_rng, max_degree
from .chains import descending_chains
from .chi import chi_r_directional, unbounded_exits
from .config import ExperimentConfig
from .harness import (Check, ExperimentResult, StatRow, mean_stderr, replicate_points,
                      replicate_rng, run_replicates)

SPANNER_BOUND = 4 * math.sqrt(3) * math.pi / 9
MU_UPPER = 4 / math.pi
MU_DELAUNAY = 35 / (3 * math.pi ** 2)
RNG_MAX_DEGREE = 6


def _graph(cfg, i):
    ps = replicate_points(cfg, i)
    return ps, build_graph(ps, cfg.graph_kind)


# ---------------------------------------------------------------------------
# time constant

def _rep_time_constant(cfg: ExperimentConfig, i: int) -> dict:
    ps, g = _graph(cfg, i)
    s = nearest_vertex(ps, (0.0, 0.0))
    ts = [nearest_vertex(ps, (n, 0.0)) for n in cfg.n_values]
    d = distances_from(g, [s], limit=3 * max(cfg.n_values) + 10)[0]
    est, chord_gap = [], []
    for n, t in zip(cfg.n_values, ts):
        ell = float(d[t])
        est.append(ell / n if math.isfinite(ell) else None)
        chord_gap.append(ell - float(np.hypot(*(g.coords[t] - g.coords[s]))) if math.isfinite(ell) else None)
    return {"estimate": est, "chord_gap": chord_gap}


def estimate_time_constant(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    reps = run_replicates(_rep_time_constant, cfg, threads)
    rows, checks = [], []
    for k, n in enumerate(cfg.n_values):
        vals = [r["estimate"][k] for r in reps if r["estimate"][k] is not None]
        gaps = [r["chord_gap"][k] for r in reps if r["chord_gap"][k] is not None]
        m, se = mean_stderr(vals)
        rows.append(StatRow({"n": n}, m, se, len(vals), cfg.replicates - len(vals),
                            {"min_estimate": min(vals, default=math.nan)}))
        checks.append(Check(f"chord_bound[n={n:g}]", all(x >= -1e-9 for x in gaps), True,
                            f"min l - |p_s - p_t| = {min(gaps, default=math.nan):.3g}"))
        checks.append(Check(f"estimate_at_least_one[n={n:g}]", all(x >= 1 - 1e-9 for x in vals), True,
                            f"min l/n = {min(vals, default=math.nan):.6f}"))
        ok = 1.0 <= m <= MU_UPPER + 0.05
        checks.append(Check(f"mean_in_unit_to_4_over_pi[n={n:g}]", ok, False, f"mean {m:.4f} +- {se:.4f}"))
        if cfg.graph_kind == GraphKind.DELAUNAY.value:
            checks.append(Check(f"mean_below_delaunay_bound[n={n:g}]", m <= MU_DELAUNAY + 0.02, False,
                                f"mean {m:.4f}, bound {MU_DELAUNAY + 0.02:.4f}"))
    return ExperimentResult("time-constant", cfg, rows, checks, reps)


# ---------------------------------------------------------------------------
# spanner ratio and the hard per-sample bounds

def _rep_spanner(cfg: ExperimentConfig, i: int) -> dict:
    ps = replicate_points(cfg, i)
    dt = build_delaunay(ps)
    rng = build_rng(ps)
    out = {"n": len(ps), "rng_subset": rng.edge_set() <= dt.edge_set(),
           "rng_max_degree": max_degree(rng)}
    interior = np.flatnonzero(cfg.observation.contains(ps.points)) if len(ps) else np.array([], int)
    if len(interior) < 2:
        out.update(max_ratio=math.nan, min_chord_gap=math.nan, min_barrier_gap=math.nan)
        return out
    D = distances_from(dt, interior)
    P = dt.coords
    max_ratio, min_gap = 1.0, math.inf
    for row, s in enumerate(interior.tolist()):
        ell = D[row, interior]
        chord = np.hypot(*(P[interior] - P[s]).T)
        mask = interior != s
        max_ratio = max(max_ratio, float(np.max(ell[mask] / chord[mask])))
        min_gap = min(min_gap, float(np.min(ell[mask] - chord[mask])))
    # restricted lengths from every interior source to every vertex
    barrier = Barrier(cfg.barrier)
    R = distances_from(dt, interior, barrier=barrier)
    U = distances_from(dt, interior)
    fin = np.isfinite(R)
    out.update(max_ratio=max_ratio, min_chord_gap=min_gap,
               min_barrier_gap=float(np.min(R[fin] - U[fin])) if fin.any() else math.nan)
    return out


def spanner_check(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    reps = run_replicates(_rep_spanner, cfg, threads)
    ratios = [r["max_ratio"] for r in reps if not math.isnan(r["max_ratio"])]
    m, se = mean_stderr(ratios)
    worst = max(ratios, default=math.nan)
    deg = max(r["rng_max_degree"] for r in reps)
    row = StatRow({"statistic": "max_spanner_ratio"}, m, se, len(ratios), cfg.replicates - len(ratios),
                  {"max_ratio": worst, "bound": SPANNER_BOUND, "rng_max_degree": deg})
    gaps = [r["min_chord_gap"] for r in reps if not math.isnan(r["min_chord_gap"])]
    bgaps = [r["min_barrier_gap"] for r in reps if not math.isnan(r["min_barrier_gap"])]
    checks = [
        Check("rng_subset_of_delaunay", all(r["rng_subset"] for r in reps), True),
        Check("rng_max_degree_le_6", deg <= RNG_MAX_DEGREE, True, f"max degree {deg}"),
        Check("spanner_ratio_bound", all(x <= SPANNER_BOUND + 1e-6 for x in ratios), True,
              f"max ratio {worst:.6f}, bound {SPANNER_BOUND:.6f}"),
        Check("chord_bound", all(x >= -1e-9 for x in gaps), True, f"min gap {min(gaps, default=math.nan):.3g}"),
        Check("restricted_at_least_unrestricted", all(x >= 0 for x in bgaps), True,
              f"min gap {min(bgaps, default=math.nan):.3g}"),
    ]
    return ExperimentResult("spanner", cfg, [row], checks, reps)


# ---------------------------------------------------------------------------
# coalescence of directional geodesics

def _sources(ps, cfg):
    u = np.array([math.cos(cfg.direction_angle), math.sin(cfg.direction_angle)])
    v = np.array([-u[1], u[0]])
    return [(nearest_vertex(ps, sep / 2 * v), nearest_vertex(ps, -sep / 2 * v)) for sep in cfg.separations]


def _rep_coalescence(cfg: ExperimentConfig, i: int) -> dict:
    ps, g = _graph(cfg, i)
    src = _sources(ps, cfg)
    targets = sorted({x for pair in src for x in pair})
    u = (math.cos(cfg.direction_angle), math.sin(cfg.direction_angle))
    genuine, radius, cone = [], [], []
    for R in cfg.radii:
        d = DirectionSpec(cfg.direction_angle, R)
        tree = directional_tree(g, d, targets=targets)
        gs, rs, cs = [], [], []
        for x, x2 in src:
            rep = coalescence(g, x, x2, d, tree)
            gs.append(rep.genuine)
            rs.append(rep.merge_radius)
            p = directional_geodesic(g, x, d, tree)
            cs.append(math.nan if p is None else cone_fraction(g, p, g.coords[x], u, cfg.cone_half_angle))
        genuine.append(gs)
        radius.append(rs)
        cone.append(cs)
    return {"genuine": genuine, "merge_radius": radius, "cone_fraction": cone}


def coalescence_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    reps = run_replicates(_rep_coalescence, cfg, threads)
    rows = []
    for a, sep in enumerate(cfg.separations):
        for k, R in enumerate(cfg.radii):
            flags = [float(r["genuine"][k][a]) for r in reps]
            m, se = mean_stderr(flags)
            radii = [r["merge_radius"][k][a] for r in reps]
            cones = [r["cone_fraction"][k][a] for r in reps]
            rows.append(StatRow({"separation": sep, "R": R}, m, se, len(flags), 0,
                                {"median_merge_radius": float(np.median(radii)),
                                 "mean_cone_fraction": float(np.nanmean(cones))}))
    checks = []
    for a, sep in enumerate(cfg.separations):
        sub = [row for row in rows if row.params["separation"] == sep]
        ok = all(b.estimate >= a_.estimate - 2 * math.hypot(a_.stderr, b.stderr)
                 for a_, b in zip(sub, sub[1:]))
        checks.append(Check(f"fraction_nondecreasing_in_R[sep={sep:g}]", ok, False,
                            ", ".join(f"R={r.params['R']:g}: {r.estimate:.3f}+-{r.stderr:.3f}" for r in sub)))
    return ExperimentResult("coalescence", cfg, rows, checks, reps)


# ---------------------------------------------------------------------------
# chi_r sublinearity

def _rep_sublinearity(cfg: ExperimentConfig, i: int) -> dict:
    ps, g = _graph(cfg, i)
    root = nearest_vertex(ps, (0.0, 0.0))
    tree = shortest_path_tree(g, root)
    aux = replicate_rng(cfg, i)
    u = (math.cos(cfg.direction_angle), math.sin(cfg.direction_angle))
    R_obs = cfg.r_obs
    radius = np.hypot(g.coords[:, 0], g.coords[:, 1])
    has = tree.parent >= 0
    par = np.where(has, tree.parent, 0)
    out = {k: [] for k in ("chi", "chi_dir", "iso", "crossing_edges", "violations")}
    for r in cfg.r_values:
        ex = unbounded_exits(tree, g, r, R_obs, cfg.margin_fraction)
        chi = len(ex.child)
        c = min(cfg.arc_length, 2 * math.pi * r)
        chi_dir = chi_r_directional(tree, g, r, R_obs, u, c, ex)
        theta = aux.uniform(0, 2 * math.pi)
        iso = r * chi_r_directional(tree, g, r, R_obs, (math.cos(theta), math.sin(theta)),
                                    min(2 * math.pi, 2 * math.pi * r), ex)
        k = cfg.arc_partition
        phase = aux.uniform(0, 2 * math.pi)
        parts = sum(chi_r_directional(tree, g, r, R_obs,
                                      (math.cos(phase + j * 2 * math.pi / k), math.sin(phase + j * 2 * math.pi / k)),
                                      2 * math.pi * r / k, ex) for j in range(k))
        bigger = chi_r_directional(tree, g, r, R_obs, u, min(2 * c, 2 * math.pi * r), ex)
        crossing = int(np.count_nonzero(has & ((radius[par] <= r) != (radius <= r))))
        out["chi"].append(chi)
        out["chi_dir"].append(chi_dir)
        out["iso"].append(iso)
        out["crossing_edges"].append(crossing)
        out["violations"].append({
            "directional_le_chi": chi_dir > chi,
            "partition_additivity": parts != chi,
            "monotone_in_c": bigger < chi_dir,
            "le_crossing_edges": chi > crossing,
        })
    return out


def sublinearity_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    reps = run_replicates(_rep_sublinearity, cfg, threads)
    rows = []
    for k, r in enumerate(cfg.r_values):
        chi = np.array([rep["chi"][k] for rep in reps], dtype=float)
        m, se = mean_stderr(chi / r)
        dm, dse = mean_stderr([rep["chi_dir"][k] for rep in reps])
        im, ise = mean_stderr([rep["iso"][k] for rep in reps])
        cm, cse = mean_stderr(chi)
        rows.append(StatRow({"r": r}, m, se, len(reps), 0, {
            "chi_mean": cm, "chi_stderr": cse, "chi_second_moment": float(np.mean(chi ** 2)),
            "chi_dir_mean": dm, "chi_dir_stderr": dse, "arc_length": min(cfg.arc_length, 2 * math.pi * r),
            "isotropy_mean": im, "isotropy_stderr": ise}))
    checks = []
    for name in ("directional_le_chi", "partition_additivity", "monotone_in_c", "le_crossing_edges"):
        bad = sum(v[name] for rep in reps for v in rep["violations"])
        checks.append(Check(name, bad == 0, True, f"{bad} violations"))
    for row in rows:
        gap = abs(row.extra["isotropy_mean"] - row.extra["chi_mean"])
        tol = 3 * math.hypot(row.extra["isotropy_stderr"], row.extra["chi_stderr"])
        checks.append(Check(f"isotropy[r={row.params['r']:g}]", gap <= tol, False,
                            f"|{row.extra['isotropy_mean']:.3f} - {row.extra['chi_mean']:.3f}| vs {tol:.3f}"))
    dec = all(a.estimate > b.estimate for a, b in zip(rows, rows[1:]))
    sep = rows[0].estimate - rows[-1].estimate >= 2 * math.hypot(rows[0].stderr, rows[-1].stderr)
    checks.append(Check("chi_over_r_decreasing", dec and sep, False,
                        ", ".join(f"r={x.params['r']:g}: {x.estimate:.4f}+-{x.stderr:.4f}" for x in rows)))
    return ExperimentResult("sublinearity", cfg, rows, checks, reps)


# ---------------------------------------------------------------------------
# descending chains

def _rep_chains(cfg: ExperimentConfig, i: int) -> dict:
    ps = replicate_points(cfg, i)
    w = cfg.window
    start = Window(w.cx, w.cy, cfg.start_half_size, cfg.start_half_size)
    out = []
    for b in cfg.b_values:
        try:
            rep = descending_chains(ps, b, start)
        except EmptyInputError:
            out.append(None)
            continue
        out.append((rep.max_chain_length, rep.exact))
    return {"chains": out}


def chains_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    reps = run_replicates(_rep_chains, cfg, threads)
    rows = []
    for k, b in enumerate(cfg.b_values):
        got = [rep["chains"][k] for rep in reps if rep["chains"][k] is not None]
        m, se = mean_stderr([x[0] for x in got])
        rows.append(StatRow({"b": b}, m, se, len(got), cfg.replicates - len(got), {
            "max_length": max((x[0] for x in got), default=0),
            "exact_fraction": float(np.mean([x[1] for x in got])) if got else math.nan}))
    return ExperimentResult("chains", cfg, rows, [], reps)


# ---------------------------------------------------------------------------
# highway counts in the directed forest

def _rep_highways(cfg: ExperimentConfig, i: int) -> dict:
    ps, g = _graph(cfg, i)
    d = DirectionSpec(cfg.direction_angle + math.pi, cfg.highway_radius)
    forest = build_directed_forest(g, d, cfg.margin_fraction)
    return {"counts": [h.count for h in highway_counts(forest, cfg.L, cfg.m_values)]}


def highway_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    reps = run_replicates(_rep_highways, cfg, threads)
    order = np.argsort(cfg.m_values, kind="stable")
    rows = []
    for k, m in enumerate(cfg.m_values):
        mean, se = mean_stderr([r["counts"][k] for r in reps])
        rows.append(StatRow({"L": cfg.L, "m": m}, mean, se, len(reps)))
    viol = strict = 0
    for r in reps:
        c = [r["counts"][k] for k in order]
        viol += any(b > a for a, b in zip(c, c[1:]))
        strict += any(b < a for a, b in zip(c, c[1:]))
    checks = [Check("nonincreasing_in_m", viol == 0, True, f"{viol} replicates violate"),
              Check("strict_decrease_observed", strict > 0, False, f"{strict} replicates with merging")]
    return ExperimentResult("highways", cfg, rows, checks, reps)


RUNNERS = {
    "time-constant": estimate_time_constant,
    "spanner": spanner_check,
    "coalescence": coalescence_experiment,
    "sublinearity": sublinearity_experiment,
    "chains": chains_experiment,
    "highways": highway_experiment,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    return RUNNERS[cfg.experiment](cfg, threads)
