"""Selection-combining receivers over log-logistic fading channels.

Outage probability, average BER and ergodic capacity, each computed from
multivariate Fox H-function contour integrals, from direct quadrature of the
elementary density, from high-SNR asymptotes and by Monte Carlo.
"""
from .loglogistic import AmplitudeParams, BranchParams, from_amplitude
from .mellin_barnes import (
    AccuracyError,
    ContourPlan,
    FoxHResult,
    FoxHSpec,
    GammaFactor,
    PlanningError,
    PoleError,
    eval_foxh,
    plan_contour,
)
from .metrics import Method, MetricResult, ModulationParams, db_to_linear, linear_to_db
from .montecarlo import SimConfig
from .sc_stats import ScModel

__version__ = "0.1.0"

__all__ = [
    "AmplitudeParams",
    "BranchParams",
    "from_amplitude",
    "AccuracyError",
    "ContourPlan",
    "FoxHResult",
    "FoxHSpec",
    "GammaFactor",
    "PlanningError",
    "PoleError",
    "eval_foxh",
    "plan_contour",
    "Method",
    "MetricResult",
    "ModulationParams",
    "db_to_linear",
    "linear_to_db",
    "SimConfig",
    "ScModel",
]
