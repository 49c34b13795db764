"""Deterministic state-vector simulator for two driven multilevel atoms in a
two-mode cavity, with dark-state diagnostics, metrics, parameter scans, an
HTTP service, and a CLI.
"""

__version__ = "0.1.0"

from .basis import BasisIndex, BasisState, build_basis, project_to_subspace
from .config import RunConfig, build_config, config_to_dict, load_config_file
from .darkstate import DarkState, dark_state, dark_state_approx, null_space_S
from .errors import ConfigError, NumericalRefusal, OutputError, SimulatorError
from .hamiltonian import (
    SystemParams,
    assemble_H0,
    assemble_Hnh,
    check_invariance,
    coupling_patterns,
)
from .observables import (
    MetricsRow,
    error_probability,
    fidelity,
    metrics_rows,
    populations,
    qubit_target,
    qutrit_target,
)
from .propagator import Trajectory, convergence_order, propagate
from .pulses import (
    PulseSchedule,
    PulseShape,
    preset_fstirap,
    preset_stirap,
    ratio_diagnostics,
)
from .runner import run_darkcheck, run_scan_spec, run_simulate
from .scan import ScanSpec, best_point, run_scan

__all__ = [
    "BasisIndex",
    "BasisState",
    "ConfigError",
    "DarkState",
    "MetricsRow",
    "NumericalRefusal",
    "OutputError",
    "PulseSchedule",
    "PulseShape",
    "RunConfig",
    "ScanSpec",
    "SimulatorError",
    "SystemParams",
    "Trajectory",
    "__version__",
    "assemble_H0",
    "assemble_Hnh",
    "best_point",
    "build_basis",
    "build_config",
    "check_invariance",
    "config_to_dict",
    "convergence_order",
    "coupling_patterns",
    "dark_state",
    "dark_state_approx",
    "error_probability",
    "fidelity",
    "load_config_file",
    "metrics_rows",
    "null_space_S",
    "populations",
    "preset_fstirap",
    "preset_stirap",
    "project_to_subspace",
    "propagate",
    "qubit_target",
    "qutrit_target",
    "ratio_diagnostics",
    "run_darkcheck",
    "run_scan",
    "run_scan_spec",
    "run_simulate",
]
