from .chains import ChainReport, descending_chains
from .chi import chi_r, chi_r_directional, unbounded_exits
from .config import ConfigError, ExperimentConfig, preset
from .harness import ExperimentResult, StatRow, write_result
from .runs import run_experiment
