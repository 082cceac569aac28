"""Cutoff equilibria of a career-concerns model of expert advice with a
Gaussian signal: solver, comparative statics, policy calibration and a Monte
Carlo check."""
from .equilibrium import (
    CycleDetectedError,
    Equilibrium,
    NoConvergenceError,
    NonMonotoneError,
    PayoffMode,
    SolverError,
    best_response_cutoff,
    delta,
    delta_slope,
    experimentation_rate,
    refine_equilibrium,
    solve_equilibrium,
)
from .gaussian import (
    Ability,
    Posteriors,
    PublicEvent,
    event_likelihood,
    event_probability,
    posterior_after,
    posteriors_of_cutoff,
    signal_cdf,
    signal_survival,
    success_prob,
    success_prob_slope,
)
from .model import REFERENCE, Primitives, PrimitivesError, lambda_of, w_of
from .policy import CalibrationResult, bonus_for_target, gatekeeping_sweep, quantile_fx
from .simulate import SimConfig, SimOutcome, prediction_report, run_sim
from .statics import (
    RdReport,
    StaticsReport,
    analytic_derivative,
    check_rd,
    conservatism_scan,
    numeric_derivative,
)

__version__ = "0.1.0"
