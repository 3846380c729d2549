"""Touchdown dynamics of an aircraft with active PID landing gear, tuned by the Bees Algorithm."""
from .analysis import Spectrum, change_pct, improvement_pct, psd, rms
from .controller import (ControlConfig, Controller, ControllerState, HydraulicParams, PidGains,
                         active_forces, error_signals, hydraulic_force, pid_force,
                         ziegler_nichols_gains)
from .dynamics import (AircraftParams, IntegrationError, RelativeKinematics, State,
                       StepBudgetError, SystemMatrices, Trajectory, assemble_matrices,
                       force_vector, relative_kinematics, simulate, state_derivative, step)
from .objectives import ForceSignals, force_signals, itae, objective_type1, objective_type2
from .optimizer import BeesConfig, BeesResult, Candidate, SearchSpace, bees_optimize, neighborhood_sample
from .scenarios import (ComparisonReport, Configuration, Scenario, Suspension, one_point,
                        reference_configurations, run_comparison, sensitivity_variant,
                        three_point, two_point)
from .tuning import TuneResult, default_search_space, tune_controller

__version__ = "0.1.0"
