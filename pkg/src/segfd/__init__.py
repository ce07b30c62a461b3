"""Finite-difference steady states of segregated reaction-diffusion systems.

The solver computes the projected fixed point

    u_l(z) = max(-f_l(z, u_l(z)) h^2/4 + avg(u_l)(z) - sum_{p != l} avg(u_p)(z), 0)

on a uniform square mesh, together with diagnostics (segregation, discrete
differential inequalities, energy) and convergence-order studies.
"""

from segfd.grid import UniformGrid, apply_lh, make_grid, neighbor_average
from segfd.dynamics import (
    BoundarySpec,
    DynamicsSpec,
    ProblemSpec,
    eval_F,
    eval_f,
    validate_problem,
)
from segfd.benchmarks import BENCHMARKS, get_benchmark
from segfd.pointwise import PointUpdate, solve_pointwise
from segfd.solver import (
    MultiField,
    SolveReport,
    SolverConfig,
    init_state,
    scheme_residual,
    solve,
    sweep,
)
from segfd.verify import (
    PropertyReport,
    check_scheme_properties,
    discrete_energy,
    hat,
    linf_error,
    segregation_metric,
    truncation_bound,
)
from segfd.study import ConvergenceReport, fit_order, richardson_reference, run_study

__all__ = [
    "BENCHMARKS",
    "BoundarySpec",
    "ConvergenceReport",
    "DynamicsSpec",
    "MultiField",
    "PointUpdate",
    "ProblemSpec",
    "PropertyReport",
    "SolveReport",
    "SolverConfig",
    "UniformGrid",
    "apply_lh",
    "check_scheme_properties",
    "discrete_energy",
    "eval_F",
    "eval_f",
    "fit_order",
    "get_benchmark",
    "hat",
    "init_state",
    "linf_error",
    "make_grid",
    "neighbor_average",
    "richardson_reference",
    "run_study",
    "scheme_residual",
    "segregation_metric",
    "solve",
    "solve_pointwise",
    "sweep",
    "truncation_bound",
    "validate_problem",
]
