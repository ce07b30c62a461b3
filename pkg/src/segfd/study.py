"""Mesh-refinement studies against exact or fine-grid reference solutions."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from segfd.dynamics import ProblemSpec
from segfd.grid import make_grid
from segfd.solver import MultiField, SolverConfig, solve
from segfd.verify import linf_error, truncation_bound

log = logging.getLogger(__name__)

REFERENCE_FACTOR = 4


@dataclass
class StudyRow:
    N: int
    h: float
    errors: np.ndarray
    bound: float | None
    iterations: int
    converged: bool
    bound_ok: bool | None

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors))


@dataclass
class ConvergenceReport:
    problem: str
    rows: list = field(default_factory=list)
    fitted_order: float | None = None
    reference: str = "exact"
    N_ref: int | None = None

    @property
    def ladder(self) -> list:
        return [r.N for r in self.rows]

    @property
    def degenerate(self) -> bool:
        return self.fitted_order is None

    def as_dict(self) -> dict:
        return {
            "problem": self.problem,
            "reference": self.reference,
            "N_ref": self.N_ref,
            "fitted_order": self.fitted_order,
            "rows": [
                {
                    "N": r.N,
                    "h": r.h,
                    "errors": [float(e) for e in r.errors],
                    "bound": r.bound,
                    "iterations": r.iterations,
                    "converged": r.converged,
                    "bound_ok": r.bound_ok,
                }
                for r in self.rows
            ],
        }


def fit_order(points, floor: float = 1e-9) -> float | None:
    """Least-squares slope of ``log(error)`` against ``log(h)``.

    Points whose error does not exceed ``floor`` carry no rate information;
    with fewer than two left the fit is degenerate and ``None`` is returned.
    """
    pts = [(h, e) for h, e in points if e > floor]
    if len(pts) < 2:
        return None
    lh = np.log([h for h, _ in pts])
    le = np.log([e for _, e in pts])
    return float(np.polyfit(lh, le, 1)[0])


def restrict(values: np.ndarray, N_fine: int, N_coarse: int) -> np.ndarray:
    """Values of a fine field at the nodes shared with a coarser mesh."""
    if N_fine % N_coarse:
        raise ValueError(f"incompatible ladder: {N_coarse} does not divide {N_fine}")
    k = N_fine // N_coarse
    return values[..., ::k, ::k]


def _check_ladder(ladder) -> list:
    ladder = [int(n) for n in ladder]
    if len(ladder) < 3:
        raise ValueError(f"ladder too short: need at least 3 meshes, got {ladder}")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError(f"ladder must be strictly increasing: {ladder}")
    return ladder


def richardson_reference(p: ProblemSpec, N_ref: int, cfg: SolverConfig | None = None, ladder=()):
    """Fine-grid solve used as a surrogate exact solution.

    Returns ``(state, restrict_to)`` where ``restrict_to(N)`` gives the
    reference values at the nodes of the ``N`` mesh.
    """
    ladder = list(ladder)
    if ladder and N_ref < 2 * max(ladder):
        raise ValueError(f"incompatible ladder: N_ref={N_ref} < 2*{max(ladder)}")
    bad = [n for n in ladder if N_ref % n]
    if bad:
        raise ValueError(f"incompatible ladder: {bad} do not divide N_ref={N_ref}")
    state, report = solve(p, make_grid(p.a, N_ref), cfg)
    if not report.converged:
        log.warning("reference solve at N=%d stopped without converging", N_ref)

    def restrict_to(N: int) -> np.ndarray:
        return restrict(state.values, N_ref, N)

    return state, restrict_to


def run_study(p: ProblemSpec, ladder, cfg: SolverConfig | None = None, reference: bool | None = None) -> ConvergenceReport:
    """Solve on each mesh of ``ladder`` and measure nodal max-norm errors.

    Errors are taken against the exact solution when the problem has one
    (unless ``reference=True``), otherwise against a solve at
    ``N_ref = 4*max(ladder)`` restricted to coinciding nodes.
    """
    cfg = cfg or SolverConfig()
    ladder = _check_ladder(ladder)
    use_ref = (not p.has_exact) if reference is None else bool(reference)
    report = ConvergenceReport(problem=p.name, reference="richardson" if use_ref else "exact")
    restrict_to = None
    if use_ref:
        N_ref = REFERENCE_FACTOR * max(ladder)
        report.N_ref = N_ref
        bad = [n for n in ladder if N_ref % n]
        if bad:
            raise ValueError(f"incompatible ladder: {bad} do not divide N_ref={N_ref}")
        _, restrict_to = richardson_reference(p, N_ref, cfg, ladder)

    for N in ladder:
        grid = make_grid(p.a, N)
        state, sr = solve(p, grid, cfg)
        if use_ref:
            diff = np.abs(restrict_to(N) - state.values)
            errors = diff.reshape(p.m, -1).max(axis=1)
        else:
            errors = linf_error(state, p)
        bound = bound_ok = None
        if p.exact_laplacian is not None and not use_ref:
            bound = truncation_bound(p, grid)
            bound_ok = bool(np.max(errors) <= bound + 10 * cfg.tol)
        report.rows.append(StudyRow(N, grid.h, errors, bound, sr.iterations, sr.converged, bound_ok))
    report.fitted_order = fit_order([(r.h, r.max_error) for r in report.rows], floor=10 * cfg.tol)
    return report
