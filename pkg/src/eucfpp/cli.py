"""Command-line interface.

Exit codes: 0 success, 1 a fatal experiment check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .experiments.config import EXPERIMENTS, ConfigError, ExperimentConfig, preset
from .experiments.harness import write_result
from .experiments.runs import run_experiment
from .forest import DirectionSpec, build_directed_forest, highway_counts
from .fpp import Barrier, restricted_tree, shortest_path_tree
from .geom import (CSVFormatError, EmptyInputError, SeedStream, Window, nearest_vertex,
                   read_points_csv, sample_ppp, write_points_csv)
from .graphs import build_graph, write_edges_csv
from .render import Scene


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# small parsers

def _window(text: str, center: str | None = None) -> Window:
    try:
        w, h = (float(v) for v in text.lower().split("x"))
        cx, cy = _pair(center) if center else (0.0, 0.0)
        return Window(cx, cy, w / 2, h / 2)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad --window {text!r} (expected WIDTHxHEIGHT): {exc}") from None


def _pair(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected 'x,y', got {text!r}") from None
    return x, y


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _read_edges(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["i", "j", "length"]:
            raise CSVFormatError("expected header 'i,j,length'", 1)
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                out.append((int(row[0]), int(row[1])))
            except (ValueError, IndexError):
                raise CSVFormatError("expected integer vertex ids", lineno) from None
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def _read_tree(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] not in (["vertex", "parent"], ["vertex", "successor"]):
            raise CSVFormatError("expected header 'vertex,parent,...' or 'vertex,successor'", 1)
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                out.append(int(row[1]))
            except (ValueError, IndexError):
                raise CSVFormatError("expected integer parent id", lineno) from None
    return np.array(out, dtype=np.int64)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(out_dir: Path, command: str, config: dict, seed, started: str, outputs) -> Path:
    manifest = {
        "tool": "eucfpp",
        "version": __version__,
        "command": command,
        "config": config,
        "master_seed": seed,
        "started": started,
        "finished": _now(),
        "outputs": [{"file": p.name, "sha256": _sha256(p)} for p in outputs],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _load_points(args):
    window = _window(args.window, args.center) if getattr(args, "window", None) else None
    return read_points_csv(args.points, window)


def _out(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_sample(args) -> int:
    started = _now()
    w = _window(args.window or "100x100", args.center)
    seed = args.seed if args.seed is not None else 0
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if not (math.isfinite(args.intensity) and args.intensity >= 0):
        raise UsageError("--intensity must be finite and non-negative")
    ps = sample_ppp(w, args.intensity, SeedStream(seed, args.stream))
    out = _out(args)
    p = out / "points.csv"
    write_points_csv(ps, p)
    cfg = {"window": [w.cx, w.cy, 2 * w.half_width, 2 * w.half_height], "intensity": args.intensity,
           "stream": args.stream}
    write_manifest(out, "sample", cfg, seed, started, [p])
    print(f"{len(ps)} points -> {p}")
    return 0


def cmd_build(args) -> int:
    started = _now()
    ps = _load_points(args)
    g = build_graph(ps, args.kind)
    out = _out(args)
    p = out / "edges.csv"
    write_edges_csv(g, p)
    write_manifest(out, "build", {"points": str(args.points), "kind": args.kind}, None, started, [p])
    print(f"{g.n_edges} {args.kind} edges -> {p}")
    return 0


def _vertex(ps, idx, xy, name):
    if idx is not None:
        if not 0 <= idx < len(ps):
            raise UsageError(f"--{name} {idx} out of range (n={len(ps)})")
        return idx
    if xy is not None:
        return nearest_vertex(ps, _pair(xy))
    return nearest_vertex(ps, (0.0, 0.0))


def cmd_geodesic(args) -> int:
    started = _now()
    ps = _load_points(args)
    g = build_graph(ps, args.kind)
    s = _vertex(ps, args.source, args.source_xy, "source")
    t = _vertex(ps, args.target, args.target_xy, "target")
    barrier = Barrier(args.barrier) if args.barrier is not None else None
    tree = (shortest_path_tree(g, s, targets=[t]) if barrier is None
            else restricted_tree(g, s, barrier, targets=[t]))
    path = tree.path_to(t)
    out = _out(args)
    if args.format == "json":
        p = out / "path.json"
        if path is None:
            p.write_text(json.dumps({"source": s, "target": t, "vertices": None, "length": None,
                                     "restricted": barrier is not None,
                                     "barrier": None if barrier is None else barrier.r}) + "\n")
        else:
            p.write_text(path.to_json(barrier) + "\n")
    else:
        p = out / "path.csv"
        lines = ["step,vertex,x,y"]
        if path is not None:
            for k, v in enumerate(path.vertices):
                x, y = g.coords[v].tolist()
                lines.append(f"{k},{v},{x!r},{y!r}")
        p.write_text("\n".join(lines) + "\n")
    write_manifest(out, "geodesic", {"points": str(args.points), "kind": args.kind, "source": s,
                                     "target": t, "barrier": args.barrier}, None, started, [p])
    if path is None:
        print(f"no admissible path from {s} to {t}")
    else:
        print(f"length {path.total_length!r} over {len(path)} vertices -> {p}")
    return 0


def cmd_tree(args) -> int:
    started = _now()
    ps = _load_points(args)
    g = build_graph(ps, args.kind)
    root = _vertex(ps, args.root, args.root_xy, "root")
    tree = (shortest_path_tree(g, root) if args.barrier is None
            else restricted_tree(g, root, Barrier(args.barrier)))
    out = _out(args)
    p = out / "tree.csv"
    lines = ["vertex,parent,dist"]
    lines += [f"{v},{par},{d!r}" for v, (par, d) in enumerate(zip(tree.parent.tolist(), tree.dist.tolist()))]
    p.write_text("\n".join(lines) + "\n")
    write_manifest(out, "tree", {"points": str(args.points), "kind": args.kind, "root": root,
                                 "barrier": args.barrier}, None, started, [p])
    print(f"tree rooted at {root} -> {p}")
    return 0


def cmd_forest(args) -> int:
    started = _now()
    ps = _load_points(args)
    g = build_graph(ps, args.kind)
    forest = build_directed_forest(g, DirectionSpec(args.angle, args.R), args.margin)
    out = _out(args)
    p = out / "forest.csv"
    forest.to_csv(p)
    outputs = [p]
    if args.highways is not None:
        counts = highway_counts(forest, args.highways, _floats(args.m))
        h = out / "highways.csv"
        h.write_text("L,m,count\n" + "".join(f"{c.L!r},{c.m!r},{c.count}\n" for c in counts))
        outputs.append(h)
    write_manifest(out, "forest", {"points": str(args.points), "kind": args.kind, "angle": args.angle,
                                   "R": args.R, "margin_fraction": args.margin}, None, started, outputs)
    print(f"forest toward vertex {forest.target_vertex} -> {p}")
    return 0


def resolve_config(name: str, args) -> ExperimentConfig:
    cfg = preset(name)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f"config file {path} not found")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON ({exc})") from None
        if isinstance(data, dict) and "config" in data and "outputs" in data:
            data = data["config"]  # a run manifest
        if isinstance(data, dict) and data.get("experiment", name) != name:
            raise ConfigError("experiment", f"config is for {data['experiment']!r}, not {name!r}")
        cfg = ExperimentConfig.from_dict(data, base=cfg)
    over = {}
    if args.seed is not None:
        over["master_seed"] = args.seed
    if args.replicates is not None:
        over["replicates"] = args.replicates
    if args.kind is not None:
        over["graph_kind"] = args.kind
    if args.intensity is not None:
        over["intensity"] = args.intensity
    if args.window is not None:
        w = _window(args.window, args.center)
        over.update(window_width=2 * w.half_width, window_height=2 * w.half_height,
                    window_center=[w.cx, w.cy])
    return ExperimentConfig.from_dict(over, base=cfg) if over else cfg


def cmd_experiment(args) -> int:
    started = _now()
    cfg = resolve_config(args.name, args)
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    result = run_experiment(cfg, threads=max(1, threads))
    out = _out(args)
    paths = write_result(result, out, args.format)
    write_manifest(out, f"experiment {args.name}", cfg.to_dict(), cfg.master_seed, started, paths)
    sys.stdout.write(result.to_csv())
    for c in result.checks:
        tag = "PASS" if c.passed else ("FAIL" if c.fatal else "FLAG")
        print(f"{tag} {c.name} {c.detail}".rstrip())
    return 0 if result.ok else 1


def _read_path(path) -> list[int]:
    """Vertex sequence from a geodesic output, path.json or path.csv."""
    text = Path(path).read_text()
    if not text.lstrip().startswith("step"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            raise CSVFormatError("expected path JSON or a CSV with header 'step,vertex,...'", 1) from None
        return [int(v) for v in data.get("vertices") or []]
    rows = list(csv.reader(text.splitlines()))
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            out.append(int(row[1]))
        except (ValueError, IndexError):
            raise CSVFormatError("expected integer vertex ids", lineno) from None
    return out


def cmd_render(args) -> int:
    ps = _load_points(args)
    window = ps.window if args.window is None else _window(args.window, args.center)
    scene = Scene(window, ps.points)
    if args.edges:
        scene.edges = _read_edges(args.edges)
    elif args.kind:
        scene.edges = build_graph(ps, args.kind).edges()
    for p in args.path or []:
        seq = _read_path(p)
        if seq:
            scene.paths.append(seq)
    if args.tree:
        scene.tree_parent = _read_tree(args.tree)
    for c in args.circle or []:
        scene.circles.append((0.0, 0.0, float(c)))
    for a in args.arc or []:
        r, theta, length = _floats(a)
        scene.arcs.append((r, theta, length))
    for b in args.barrier or []:
        scene.barriers.append(float(b))
    n = len(ps)
    for seq in scene.paths:
        if any(not 0 <= v < n for v in seq):
            raise UsageError("path refers to vertices outside the point set")
    if len(scene.edges) and (scene.edges.min() < 0 or scene.edges.max() >= n):
        raise UsageError("edge list refers to vertices outside the point set")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    scene.write(out)
    print(f"-> {out}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="directory for outputs and manifest.json")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    common.add_argument("--window", default=None, help="WIDTHxHEIGHT, e.g. 100x100")
    common.add_argument("--center", default=None, help="window centre 'x,y' (default 0,0)")

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--points", required=True, help="point CSV (id,x,y)")
    graph.add_argument("--kind", choices=["delaunay", "rng"], default="delaunay")

    p = argparse.ArgumentParser(prog="eucfpp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"eucfpp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="sample a Poisson point set")
    s.add_argument("--intensity", type=float, default=1.0)
    s.add_argument("--stream", type=int, default=0, help="stream index under the master seed")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("build", parents=[common, graph], help="Delaunay or RNG edge list")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("geodesic", parents=[common, graph], help="shortest path between two vertices")
    s.add_argument("--source", type=int)
    s.add_argument("--target", type=int)
    s.add_argument("--source-xy", help="use the vertex nearest to 'x,y' (write --source-xy=-4,0 for negatives)")
    s.add_argument("--target-xy")
    s.add_argument("--barrier", type=float, help="forbid right-to-left steps across x = BARRIER")
    s.set_defaults(func=cmd_geodesic)

    s = sub.add_parser("tree", parents=[common, graph], help="shortest-path tree")
    s.add_argument("--root", type=int)
    s.add_argument("--root-xy")
    s.add_argument("--barrier", type=float)
    s.set_defaults(func=cmd_tree)

    s = sub.add_parser("forest", parents=[common, graph], help="directed forest toward a far sink")
    s.add_argument("--angle", type=float, default=0.0, help="direction of the sink (radians)")
    s.add_argument("--R", type=float, required=True, help="sink distance from the origin")
    s.add_argument("--margin", type=float, default=0.1, help="observation margin fraction")
    s.add_argument("--highways", type=float, metavar="L", help="also count highways through a length-L segment")
    s.add_argument("--m", default="0,10,20,40", help="line offsets for --highways")
    s.set_defaults(func=cmd_forest)

    s = sub.add_parser("experiment", parents=[common], help="run a Monte Carlo experiment")
    s.add_argument("name", choices=list(EXPERIMENTS))
    s.add_argument("--config", help="JSON config (or a manifest.json from a previous run)")
    s.add_argument("--replicates", type=int)
    s.add_argument("--kind", choices=["delaunay", "rng"])
    s.add_argument("--intensity", type=float)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("render", parents=[common], help="draw an SVG figure")
    s.add_argument("--points", required=True)
    s.add_argument("--edges", help="edge CSV from 'build'")
    s.add_argument("--kind", choices=["delaunay", "rng"], help="build edges on the fly")
    s.add_argument("--path", action="append", help="path.csv or path.json from 'geodesic' (repeatable)")
    s.add_argument("--tree", help="tree CSV from 'tree' or forest CSV from 'forest'")
    s.add_argument("--circle", action="append", type=float, help="circle radius around the origin")
    s.add_argument("--arc", action="append", help="'r,theta,length' arc on the circle of radius r")
    s.add_argument("--barrier", action="append", type=float, help="vertical barrier line x = r")
    s.add_argument("--out", required=True, help="output SVG file")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, CSVFormatError, EmptyInputError, FileNotFoundError,
            IsADirectoryError, json.JSONDecodeError, ValueError) as exc:
        print(f"eucfpp {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
