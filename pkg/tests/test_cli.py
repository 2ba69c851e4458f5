import hashlib
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from eucfpp.cli import main
from eucfpp.geom import read_points_csv
from eucfpp.graphs import build_graph

BASELINES = Path(__file__).parent / "baselines"


def digest(p):
    return hashlib.sha256(Path(p).read_bytes()).hexdigest()


def test_sample_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["sample", "--window", "100x100", "--intensity", "1", "--seed", "7",
                     "--out-dir", str(tmp_path / d)]) == 0
    assert digest(tmp_path / "a/points.csv") == digest(tmp_path / "b/points.csv")
    m = json.loads((tmp_path / "a/manifest.json").read_text())
    assert m["master_seed"] == 7
    assert m["outputs"] == [{"file": "points.csv", "sha256": digest(tmp_path / "a/points.csv")}]
    for key in ("version", "config", "started", "finished"):
        assert key in m


def test_sample_zero_intensity(tmp_path):
    assert main(["sample", "--intensity", "0", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "points.csv").read_text() == "id,x,y\n"


def test_sample_counts_poisson(tmp_path):
    counts = []
    for seed in range(100):
        main(["sample", "--window", "10x10", "--seed", str(seed), "--out-dir", str(tmp_path)])
        counts.append(len((tmp_path / "points.csv").read_text().splitlines()) - 1)
    counts = np.array(counts)
    # Poisson(100): mean within 4 standard errors, variance within 4 sd of its sampling law
    assert abs(counts.mean() - 100) <= 4 * 10 / 10
    assert abs(counts.var(ddof=1) - 100) <= 4 * np.sqrt((100 + 2 * 100**2) / 100)


def test_bad_flags_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--intensity", "abc"])
    assert exc.value.code == 2
    assert main(["sample", "--window", "10by10", "--out-dir", str(tmp_path)]) == 2
    assert main(["sample", "--intensity", "-1", "--out-dir", str(tmp_path)]) == 2


def test_build_three_points(tmp_path):
    pts = tmp_path / "p.csv"
    pts.write_text("id,x,y\n0,0,0\n1,1,0\n2,0,1\n")
    assert main(["build", "--points", str(pts), "--kind", "delaunay", "--out-dir", str(tmp_path)]) == 0
    assert len((tmp_path / "edges.csv").read_text().splitlines()) == 4


def test_build_rng_subset_and_library_match(tmp_path):
    main(["sample", "--window", "30x30", "--seed", "3", "--out-dir", str(tmp_path)])
    pts = tmp_path / "points.csv"
    sets = {}
    for kind in ("delaunay", "rng"):
        main(["build", "--points", str(pts), "--kind", kind, "--out-dir", str(tmp_path / kind)])
        lines = (tmp_path / kind / "edges.csv").read_text().splitlines()[1:]
        sets[kind] = {tuple(map(int, ln.split(",")[:2])) for ln in lines}
        assert sets[kind] == build_graph(read_points_csv(pts), kind).edge_set()
    assert sets["rng"] <= sets["delaunay"]


def test_build_missing_and_malformed(tmp_path, capsys):
    assert main(["build", "--points", str(tmp_path / "none.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("id,x,y\n0,0,0\n1,zz,1\n")
    assert main(["build", "--points", str(bad), "--out-dir", str(tmp_path)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_geodesic_tree_forest(tmp_path):
    main(["sample", "--window", "40x40", "--seed", "1", "--out-dir", str(tmp_path)])
    pts = str(tmp_path / "points.csv")
    assert main(["geodesic", "--points", pts, "--source-xy=-10,0", "--target-xy=10,0",
                 "--format", "json", "--out-dir", str(tmp_path)]) == 0
    path = json.loads((tmp_path / "path.json").read_text())
    assert set(path) == {"source", "target", "vertices", "length", "restricted", "barrier"}
    assert path["vertices"][0] == path["source"] and path["vertices"][-1] == path["target"]
    assert main(["geodesic", "--points", pts, "--source-xy=10,0", "--target-xy=-10,0", "--barrier", "0",
                 "--format", "json", "--out-dir", str(tmp_path / "r")]) == 0
    assert json.loads((tmp_path / "r/path.json").read_text())["vertices"] is None
    assert main(["geodesic", "--points", pts, "--source", "999999", "--out-dir", str(tmp_path)]) == 2
    assert main(["tree", "--points", pts, "--out-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "tree.csv").read_text().splitlines()
    assert rows[0] == "vertex,parent,dist"
    assert main(["forest", "--points", pts, "--angle", "3.141592653589793", "--R", "15",
                 "--highways", "5", "--m", "0,2,4", "--out-dir", str(tmp_path)]) == 0
    h = (tmp_path / "highways.csv").read_text().splitlines()
    counts = [int(x.split(",")[2]) for x in h[1:]]
    assert counts == sorted(counts, reverse=True)


def test_experiment_reproducible_and_manifest_rerun(tmp_path):
    cfg = BASELINES / "chains.config.json"
    assert main(["experiment", "chains", "--config", str(cfg), "--out-dir", str(tmp_path / "a"), "--threads", "1"]) == 0
    assert main(["experiment", "chains", "--config", str(cfg), "--out-dir", str(tmp_path / "b"), "--threads", "2"]) == 0
    # re-run from the first run's manifest
    assert main(["experiment", "chains", "--config", str(tmp_path / "a/manifest.json"),
                 "--out-dir", str(tmp_path / "c"), "--threads", "1"]) == 0
    for f in ("results.csv", "results.json"):
        assert digest(tmp_path / "a" / f) == digest(tmp_path / "b" / f) == digest(tmp_path / "c" / f)
    m = json.loads((tmp_path / "a/manifest.json").read_text())
    assert {o["file"] for o in m["outputs"]} == {"results.csv", "results.json"}
    assert m["config"]["master_seed"] == 105


def test_experiment_flag_overrides(tmp_path):
    cfg = BASELINES / "sublinearity.config.json"
    assert main(["experiment", "sublinearity", "--config", str(cfg), "--replicates", "2", "--seed", "5",
                 "--out-dir", str(tmp_path), "--threads", "1"]) == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert len(lines) == 3          # header + one row per r value
    assert lines[1].endswith(",2,0,5")


def test_experiment_config_errors(tmp_path, capsys):
    bad = tmp_path / "c.json"
    bad.write_text(json.dumps({"r_values": [20, "x"]}))
    assert main(["experiment", "sublinearity", "--config", str(bad)]) == 2
    assert "r_values[1]" in capsys.readouterr().err
    bad.write_text(json.dumps({"experiment": "chains"}))
    assert main(["experiment", "sublinearity", "--config", str(bad)]) == 2
    assert main(["experiment", "chains", "--config", str(tmp_path / "missing.json")]) == 2


def test_experiment_fatal_check_exits_1(tmp_path, monkeypatch):
    from eucfpp.experiments import harness
    import eucfpp.cli as cli

    real = cli.run_experiment

    def broken(cfg, threads=1):
        res = real(cfg, threads)
        res.checks.append(harness.Check("forced", False, True))
        return res

    monkeypatch.setattr(cli, "run_experiment", broken)
    assert main(["experiment", "chains", "--config", str(BASELINES / "chains.config.json"),
                 "--out-dir", str(tmp_path), "--threads", "1"]) == 1


def test_render_cli(tmp_path):
    main(["sample", "--window", "20x20", "--seed", "2", "--out-dir", str(tmp_path)])
    pts = str(tmp_path / "points.csv")
    main(["build", "--points", pts, "--out-dir", str(tmp_path)])
    main(["geodesic", "--points", pts, "--source-xy=-5,0", "--target-xy=5,0", "--format", "json", "--out-dir", str(tmp_path)])
    main(["tree", "--points", pts, "--out-dir", str(tmp_path)])
    args = ["render", "--points", pts, "--edges", str(tmp_path / "edges.csv"), "--path", str(tmp_path / "path.json"),
            "--tree", str(tmp_path / "tree.csv"), "--circle", "5", "--arc", "5,0,3", "--barrier", "0"]
    assert main(args + ["--out", str(tmp_path / "a.svg")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.svg")]) == 0
    assert digest(tmp_path / "a.svg") == digest(tmp_path / "b.svg")
    svg = (tmp_path / "a.svg").read_text()
    verts = json.loads((tmp_path / "path.json").read_text())["vertices"]
    assert f'data-vertices="{",".join(map(str, verts))}"' in svg
    assert main(["render", "--points", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "x.svg")]) == 2
    assert main(["render", "--points", pts, "--path", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.svg")]) == 2


def test_console_script_runs(tmp_path):
    out = subprocess.run([sys.executable, "-m", "eucfpp.cli", "sample", "--window", "5x5", "--seed", "1",
                          "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0
    assert (tmp_path / "points.csv").exists()
    out = subprocess.run([sys.executable, "-m", "eucfpp.cli", "bogus"], capture_output=True, text=True)
    assert out.returncode == 2


def test_render_accepts_path_csv(tmp_path):
    main(["sample", "--window", "20x20", "--seed", "2", "--out-dir", str(tmp_path)])
    pts = str(tmp_path / "points.csv")
    common = ["geodesic", "--points", pts, "--source-xy=-5,0", "--target-xy=5,0"]
    main(common + ["--out-dir", str(tmp_path / "c")])
    main(common + ["--format", "json", "--out-dir", str(tmp_path / "j")])
    for f in ("c/path.csv", "j/path.json"):
        assert main(["render", "--points", pts, "--path", str(tmp_path / f), "--out", str(tmp_path / "x.svg")]) == 0
        svg = (tmp_path / "x.svg").read_text()
        verts = json.loads((tmp_path / "j/path.json").read_text())["vertices"]
        assert f'data-vertices="{",".join(map(str, verts))}"' in svg
    (tmp_path / "bad.csv").write_text("step,vertex\n0,x\n")
    assert main(["render", "--points", pts, "--path", str(tmp_path / "bad.csv"), "--out", str(tmp_path / "x.svg")]) == 2
