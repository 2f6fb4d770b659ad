"""Nonreciprocal transmission and entanglement in a two-cavity magnomechanical system."""

from magsim.params import Direction, DriveConfig, SystemParams, build_params, drive_amplitude, thermal_occupancy
from magsim.mean_field import (
    EffectiveCoupling,
    SteadyState,
    effective_coupling,
    steady_state_closed_form,
    steady_state_self_consistent,
)
from magsim.transmission import isolation_db, transmission
from magsim.fluctuations import DriftModel, StabilityReport, drift_matrix, stability
from magsim.lyapunov import CovarianceMatrix, integrate_to_steady, solve_lyapunov
from magsim.entanglement import (
    ModePair,
    Mode,
    entanglement_isolation,
    log_negativity,
    min_symplectic_eigenvalue_pt,
    reduce_cm,
)
from magsim.scenarios import Axis, SweepResult, SweepSpec, preset, preset_names, run_sweep
from magsim.validation import validate

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "CovarianceMatrix",
    "Direction",
    "DriftModel",
    "DriveConfig",
    "EffectiveCoupling",
    "Mode",
    "ModePair",
    "StabilityReport",
    "SteadyState",
    "SweepResult",
    "SweepSpec",
    "SystemParams",
    "build_params",
    "drift_matrix",
    "drive_amplitude",
    "effective_coupling",
    "entanglement_isolation",
    "integrate_to_steady",
    "isolation_db",
    "log_negativity",
    "min_symplectic_eigenvalue_pt",
    "preset",
    "preset_names",
    "reduce_cm",
    "run_sweep",
    "solve_lyapunov",
    "stability",
    "steady_state_closed_form",
    "steady_state_self_consistent",
    "thermal_occupancy",
    "validate",
    "transmission",
]
