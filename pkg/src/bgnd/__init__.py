"""Bayesian generalized network design.

Computes per-agent strategy tables (type -> action) with approximate
best-response dynamics and evaluates them exactly on small instances.
"""

from .dynamics import DynamicsConfig, compute_abr, initial_profile, run
from .evaluate import bcr_report, brute_force_opt, exact_social_cost, expected_opt
from .gametheory import game_constants, potential_expected, smoothness_params
from .kernels import BACKEND
from .model import (
    Agent,
    CostFunction,
    Edge,
    Explicit,
    Graph,
    Instance,
    Resource,
    Routing,
    SetConnectivity,
    ValidationError,
)
from .oracle import Oracle, OracleError

__version__ = "0.1.0"
