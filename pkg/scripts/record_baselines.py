"""Regenerate the golden-seed regression files in tests/baselines/.

Run only after an audited change to an experiment; the test suite compares
fresh runs byte-for-byte against these files.
"""

from pathlib import Path

from eucfpp.experiments import ExperimentConfig, preset, run_experiment

HERE = Path(__file__).resolve().parent.parent / "tests" / "baselines"


def main():
    for cfg_path in sorted(HERE.glob("*.config.json")):
        name = cfg_path.name.removesuffix(".config.json")
        cfg = ExperimentConfig.load(cfg_path, base=preset(name))
        out = HERE / f"{name}.results.json"
        out.write_text(run_experiment(cfg).to_json())
        print(f"{name}: {out}")


if __name__ == "__main__":
    main()
