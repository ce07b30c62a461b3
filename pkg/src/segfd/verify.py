"""Structural checks and error diagnostics for computed states.

Component indices in this module are 0-based.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from segfd.dynamics import ProblemSpec
from segfd.grid import UniformGrid, lh_interior
from segfd.solver import MultiField, coefficients


@dataclass(frozen=True)
class PropertyReport:
    seg_metric: float
    ineq_violation: float
    eq_violation: float
    nonneg_violation: float
    boundary_violation: float

    def as_dict(self) -> dict:
        return asdict(self)

    def verdicts(self, tol: float, h: float) -> dict:
        """Pass/fail of each entry against the converged-state thresholds."""
        amp = 16 * tol / (h * h)
        return {
            "segregation": self.seg_metric <= 10 * tol,
            "inequality": self.ineq_violation <= amp,
            "equality": self.eq_violation <= amp,
            "nonnegativity": self.nonneg_violation == 0.0,
            "boundary": self.boundary_violation == 0.0,
        }


def hat(state: MultiField, l: int) -> np.ndarray:
    """``u_l - sum_{p != l} u_p`` at every node."""
    if not 0 <= l < state.m:
        raise IndexError(f"component {l} out of range for m={state.m}")
    u = state.values
    return 2 * u[l] - u.sum(axis=0) if state.m > 1 else u[l].copy()


def segregation_metric(state: MultiField) -> float:
    """Largest second-largest component value over all nodes.

    Zero exactly when at most one component is positive at every node.
    """
    if state.m < 2:
        return 0.0
    second = np.sort(state.values, axis=0)[-2]
    return float(max(second.max(), 0.0))


def check_scheme_properties(
    state: MultiField, p: ProblemSpec, theta: float | None = None, tol: float = 1e-10
) -> PropertyReport:
    """Evaluate the discrete inequalities satisfied by a fixed point.

    ``theta`` (default ``100*tol``) is the activity threshold that decides
    where ``L_h hat(u_l) = f_l`` is required.
    """
    theta = 100 * tol if theta is None else theta
    grid = state.grid
    co = coefficients(p, grid)
    u = state.values
    ineq = eq = 0.0
    for l in range(state.m):
        lap = lh_interior(grid, hat(state, l))
        ul = u[l, 1:-1, 1:-1]
        gap = lap - (co.c[l, 1:-1, 1:-1] + co.lam[l] * ul)
        if gap.size:
            ineq = max(ineq, float(np.max(gap)))
            active = ul > theta
            if active.any():
                eq = max(eq, float(np.max(np.abs(gap[active]))))
    phi = p.boundary.values(grid)
    ring = grid.boundary_mask
    return PropertyReport(
        seg_metric=segregation_metric(state),
        ineq_violation=max(ineq, 0.0),
        eq_violation=eq,
        nonneg_violation=float(max(0.0, -float(u.min()))),
        boundary_violation=float(np.max(np.abs(u[:, ring] - phi[:, ring]))),
    )


def discrete_energy(state: MultiField, p: ProblemSpec) -> float:
    """First-order quadrature of the energy functional.

    Each cell contributes ``h^2 (|grad_h u|^2 / 2 + F(z, u(z)))`` with
    forward differences and ``z`` the cell's lower-left corner.
    """
    grid = state.grid
    h = grid.h
    co = coefficients(p, grid)
    total = 0.0
    for l in range(state.m):
        u = state.values[l]
        corner = u[:-1, :-1]
        dx = (u[:-1, 1:] - corner) / h
        dy = (u[1:, :-1] - corner) / h
        F = co.c[l, :-1, :-1] * corner + co.lam[l] * corner**2 / 2
        total += h * h * float(np.sum(0.5 * (dx**2 + dy**2) + F))
    return total


def exact_state(p: ProblemSpec, grid: UniformGrid) -> MultiField:
    return MultiField(grid, p.exact_values(grid))


def linf_error(state: MultiField, p: ProblemSpec) -> np.ndarray:
    """Nodal max-norm error of each component against the exact solution."""
    if not p.has_exact:
        raise ValueError("reference unavailable: problem has no exact solution")
    diff = np.abs(p.exact_values(state.grid) - state.values)
    return diff.reshape(state.m, -1).max(axis=1)


def truncation_bound(p: ProblemSpec, grid: UniformGrid) -> float:
    """``a^2 * sum_l max_interior |L_h u_l - Lap u_l|`` for the exact solution."""
    if p.exact is None or p.exact_laplacian is None:
        raise ValueError("reference unavailable: exact solution or its Laplacian missing")
    X, Y = grid.mesh
    u = p.exact_values(grid)
    total = 0.0
    for l in range(p.m):
        lap = np.broadcast_to(np.asarray(p.exact_laplacian[l](X, Y), dtype=float), grid.shape)
        trunc = lh_interior(grid, u[l]) - lap[1:-1, 1:-1]
        total += float(np.max(np.abs(trunc)))
    return p.a**2 * total
