import json
import math
from pathlib import Path

import numpy as np
import pytest

from eucfpp.experiments import ConfigError, ExperimentConfig, StatRow, preset, run_experiment, write_result
from eucfpp.experiments.harness import mean_stderr, run_replicates
from eucfpp.experiments.runs import _rep_coalescence

BASELINES = Path(__file__).parent / "baselines"


def small(name):
    return ExperimentConfig.load(BASELINES / f"{name}.config.json", base=preset(name))


# ---------------------------------------------------------------------------
# config

def test_presets_validate():
    for name in ("time-constant", "spanner", "coalescence", "sublinearity", "chains", "highways"):
        cfg = preset(name)
        assert cfg.experiment == name
        assert cfg.replicates >= 1


@pytest.mark.parametrize("data,path", [
    ({"replicates": 0}, "replicates"),
    ({"window_width": -1.0}, "window_width"),
    ({"bogus": 1}, "bogus"),
    ({"graph_kind": "gabriel"}, "graph_kind"),
    ({"n_values": [10.0, "x"]}, "n_values[1]"),
    ({"n_values": [10.0, 500.0]}, "n_values[2]"),
    ({"master_seed": -3}, "master_seed"),
    ({"replicates": 2.5}, "replicates"),
    ({"intensity": None}, "intensity"),
])
def test_config_errors_name_field(data, path):
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_dict({"experiment": "time-constant", **data})
    assert exc.value.path == path


def test_config_geometry_checks():
    with pytest.raises(ConfigError) as exc:
        preset("sublinearity", r_values=[20.0, 130.0])
    assert exc.value.path == "r_values[1]"
    with pytest.raises(ConfigError) as exc:
        preset("sublinearity", R_obs=200.0)
    assert exc.value.path == "R_obs"
    with pytest.raises(ConfigError):
        preset("coalescence", radii=[400.0])
    with pytest.raises(ConfigError):
        preset("highways", m_values=[0.0, 150.0])
    with pytest.raises(ConfigError):
        preset("spanner", graph_kind="rng")


def test_config_json_roundtrip(tmp_path):
    cfg = preset("chains", master_seed=9)
    p = tmp_path / "c.json"
    p.write_text(cfg.to_json())
    assert ExperimentConfig.load(p) == cfg
    (tmp_path / "bad.json").write_text("{oops")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "bad.json")


def test_default_r_obs():
    cfg = preset("sublinearity", R_obs=None)
    assert cfg.r_obs == pytest.approx(0.9 * 140)


# ---------------------------------------------------------------------------
# harness

def test_mean_stderr():
    assert mean_stderr([2.0]) == (2.0, 0.0)
    m, se = mean_stderr([1.0, 2.0, 3.0, 4.0])
    assert m == 2.5 and se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert all(math.isnan(x) for x in mean_stderr([]))


def test_statrow_stderr_nonnegative():
    with pytest.raises(ValueError):
        StatRow({}, 1.0, -0.1, 3)


def test_threads_do_not_change_results():
    cfg = small("coalescence")
    one = run_replicates(_rep_coalescence, cfg, threads=1)
    two = run_replicates(_rep_coalescence, cfg, threads=2)
    assert one == two


def test_outputs_have_required_columns(tmp_path):
    res = run_experiment(small("chains"))
    paths = write_result(res, tmp_path, "csv")
    header = paths[0].read_text().splitlines()[0].split(",")
    assert header[-3:] == ["replicates", "excluded", "master_seed"]
    data = json.loads(paths[1].read_text())
    assert data["config"]["master_seed"] == 105
    assert [p.name for p in write_result(res, tmp_path / "j", "json")] == ["results.json"]


# ---------------------------------------------------------------------------
# experiments

@pytest.mark.parametrize("name", ["time-constant", "spanner", "coalescence", "sublinearity", "chains", "highways"])
def test_golden_seed_regression(name):
    res = run_experiment(small(name))
    assert res.to_json() == (BASELINES / f"{name}.results.json").read_text()
    assert res.ok


def test_time_constant_rows():
    res = run_experiment(small("time-constant"))
    assert [r.params["n"] for r in res.rows] == [20.0, 40.0]
    for r in res.rows:
        assert r.extra["min_estimate"] >= 1 - 1e-9
        assert r.stderr >= 0


def test_time_constant_rng_excludes_nothing_when_connected():
    res = run_experiment(small("time-constant").replace(graph_kind="rng"))
    assert all(r.excluded == 0 for r in res.rows)
    assert res.check("chord_bound[n=20]").passed


def test_coalescence_zero_separation_is_one():
    res = run_experiment(small("coalescence"))
    zero = [r for r in res.rows if r.params["separation"] == 0.0]
    assert [r.estimate for r in zero] == [1.0, 1.0, 1.0]


def test_sublinearity_one_row_per_r():
    res = run_experiment(small("sublinearity"))
    assert [r.params["r"] for r in res.rows] == [8.0, 16.0]
    for name in ("directional_le_chi", "partition_additivity", "monotone_in_c", "le_crossing_edges"):
        assert res.check(name).passed


def test_chains_rows():
    res = run_experiment(small("chains"))
    assert [r.params["b"] for r in res.rows] == [1.0, 1.5]
    assert all(r.estimate >= 1 for r in res.rows)


def test_highways_nonincreasing():
    res = run_experiment(small("highways"))
    assert res.check("nonincreasing_in_m").passed
    est = [r.estimate for r in res.rows]
    assert all(b <= a for a, b in zip(est, est[1:]))
