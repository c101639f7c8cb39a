"""Numerical Gamma-calculus for the fractional Laplacian.

The package evaluates L, Gamma and Gamma_2 of the fractional Laplacian on
explicit one-dimensional profiles, with error budgets, and uses them to
exhibit failures of the curvature-dimension inequality CD(kappa, N).
"""
from importlib import metadata as _metadata

from .cd_analysis import (
    BallReport,
    CDReport,
    SweepRow,
    Verdict,
    ball_counterexample,
    cd_check,
    local_violation_radius,
    select_witness,
    sweep_eps,
    verify_dimension_reduction,
    verify_scaling,
)
from .errors import FracCDError
from .gamma_ops import CDParams, FracParams, frac_laplacian, gamma, gamma2
from .profiles import CounterexampleSpec, ProfileFunction, make_u_eps, make_v_N_eps
from .quadrature import OperatorValue, QuadratureConfig

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.0.0"

__all__ = [
    "BallReport", "CDParams", "CDReport", "CounterexampleSpec", "FracCDError", "FracParams",
    "OperatorValue", "ProfileFunction", "QuadratureConfig", "SweepRow", "Verdict",
    "ball_counterexample", "cd_check", "frac_laplacian", "gamma", "gamma2", "local_violation_radius",
    "make_u_eps", "make_v_N_eps", "select_witness", "sweep_eps", "verify_dimension_reduction",
    "verify_scaling",
]
