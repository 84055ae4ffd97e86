"""High-order bound-preserving DG solver for scalar convection-diffusion."""

from .errors import (
    CflViolationError,
    MppdgError,
    NumericalFailureError,
    SolvabilityError,
)
from .field import DGField, project_1d, project_2d
from .limiters import BoundPair, LimiterReport
from .mesh import Basis, Grid1D, Grid2D, build_grid_1d, build_grid_2d, gauss_rule
from .operators import DiffusiveFluxConfig, FluxRecord1D, FluxRecord2D
from .problems import Problem, exact_error, get_problem, list_problems, make_grid, project_problem
from .timestepping import CflConfig, StepControls, compute_dt, evolve, ssprk3_step

__all__ = [
    "Basis",
    "BoundPair",
    "CflConfig",
    "CflViolationError",
    "DGField",
    "DiffusiveFluxConfig",
    "FluxRecord1D",
    "FluxRecord2D",
    "Grid1D",
    "Grid2D",
    "LimiterReport",
    "MppdgError",
    "NumericalFailureError",
    "Problem",
    "SolvabilityError",
    "StepControls",
    "build_grid_1d",
    "build_grid_2d",
    "compute_dt",
    "evolve",
    "exact_error",
    "gauss_rule",
    "get_problem",
    "list_problems",
    "make_grid",
    "project_1d",
    "project_2d",
    "project_problem",
    "ssprk3_step",
]

__version__ = "0.1.0"
