"""Squeezing and Ramsey phase sensitivity of superposed spin coherent states."""

__version__ = "0.1.0"

from .fitters import FitResult, fit_inverse_j
from .metrics import (
    DEFAULT_DEPTH_TABLE,
    DepthTable,
    DepthVerdict,
    SqueezingReport,
    bound_from_fisher,
    cfi,
    depth_check,
    mean_spin_direction,
    qfi,
    squeezing_report,
    xi_planar,
    xi_sorensen,
    xi_wineland,
    xi_wineland_min,
)
from .optimizer import Metric, OptimizationResult, grid_oracle, minimize_metric, parse_metric, sweep_J
from .ramsey import phase_scan, phase_uncertainty, ramsey_evolve, sub_sql_interval
from .spin import SpinState, make_operators, moments, rotate
from .states import NullSuperpositionError, SuperpositionParams, acs, gerry_grobe, mes, superposition

__all__ = [
    "DEFAULT_DEPTH_TABLE", "DepthTable", "DepthVerdict", "FitResult", "Metric", "NullSuperpositionError",
    "OptimizationResult", "SpinState", "SqueezingReport", "SuperpositionParams", "acs", "bound_from_fisher",
    "cfi", "depth_check", "fit_inverse_j", "gerry_grobe", "grid_oracle", "make_operators", "mean_spin_direction",
    "mes", "minimize_metric", "moments", "parse_metric", "phase_scan", "phase_uncertainty", "qfi",
    "ramsey_evolve", "rotate", "squeezing_report", "sub_sql_interval", "superposition", "sweep_J",
    "xi_planar", "xi_sorensen", "xi_wineland", "xi_wineland_min",
]
