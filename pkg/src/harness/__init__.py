from .aggregate import AggregateResult, Checkpoint, mean_std
from .commands import run_convergence, run_identification, run_stepsize_sensitivity
from .config import ExperimentConfig
from .emit import OutputNotWritable, Table, emit, read_csv, read_json
from .experiments import TrialResult, identification_paths, plan, run_trial
