"""Outer relaxation for the projected fixed-point system.

Iteration starts from the boundary data with a zero interior and repeats
full sweeps (Jacobi, lexicographic Gauss-Seidel or red-black) until the
estimated distance to the fixed point drops below the tolerance.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from segfd import _kernels
from segfd.dynamics import ProblemSpec
from segfd.grid import UniformGrid, neighbor_average_interior

log = logging.getLogger(__name__)

RATIO_WINDOW = 8


class Strategy(str, Enum):
    JACOBI = "jacobi"
    GAUSS_SEIDEL = "gauss_seidel"
    RED_BLACK = "red_black"

    @classmethod
    def parse(cls, value) -> Strategy:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "jacobi": cls.JACOBI,
            "gaussseidel": cls.GAUSS_SEIDEL,
            "gs": cls.GAUSS_SEIDEL,
            "redblack": cls.RED_BLACK,
            "rb": cls.RED_BLACK,
        }
        if key not in aliases:
            raise ValueError(f"unknown strategy {value!r}; use Jacobi, GaussSeidel or RedBlack")
        return aliases[key]


@dataclass
class MultiField:
    """``m`` nodal fields on one grid, stored as ``values[l, j, i]``."""

    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.ndim != 3 or self.values.shape[1:] != self.grid.shape:
            raise ValueError(f"field shape {self.values.shape} does not match grid {self.grid.shape}")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def copy(self) -> MultiField:
        return MultiField(self.grid, self.values.copy())


@dataclass(frozen=True)
class SolverConfig:
    strategy: Strategy = Strategy.GAUSS_SEIDEL
    tol: float = 1e-10
    max_iters: int | None = None
    log_every: int = 100
    backend: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")

    def iteration_cap(self, N: int) -> int:
        return self.max_iters if self.max_iters is not None else 200 * N * N


@dataclass
class SolveReport:
    iterations: int
    final_change: float
    reason: str
    residual: float
    contraction: float | None
    strategy: str
    backend: str
    wall_time: float = 0.0
    history: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.reason == "converged"

    def as_dict(self, timing: bool = False) -> dict:
        out = {
            "iterations": self.iterations,
            "final_change": self.final_change,
            "stopping_reason": self.reason,
            "scheme_residual": self.residual,
            "contraction_estimate": self.contraction,
            "strategy": self.strategy,
            "backend": self.backend,
            "history": [list(h) for h in self.history],
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass(frozen=True)
class Coefficients:
    """Nodal sources ``c[l]``, denominators ``1 + lam_l h^2/4`` and ``h^2/4``."""

    c: np.ndarray
    lam: np.ndarray
    den: np.ndarray
    q: float


def coefficients(p: ProblemSpec, grid: UniformGrid) -> Coefficients:
    q = grid.h * grid.h / 4
    c = np.ascontiguousarray(np.stack([d.nodal_source(grid) for d in p.dynamics]))
    lam = np.array([d.lam for d in p.dynamics], dtype=float)
    return Coefficients(c, lam, 1 + lam * q, q)


def init_state(p: ProblemSpec, g: UniformGrid) -> MultiField:
    """Boundary nodes carry ``phi_l``; every interior value starts at zero."""
    if g.a != p.a:
        raise ValueError(f"grid side {g.a} differs from problem side {p.a}")
    return MultiField(g, p.boundary.values(g))


def sweep(state: MultiField, p: ProblemSpec, strategy=Strategy.GAUSS_SEIDEL, backend: str | None = None) -> float:
    """One relaxation pass over every interior node; returns the sup-norm change."""
    strategy = Strategy.parse(strategy)
    co = coefficients(p, state.grid)
    kern = _kernels.kernels(backend)[strategy.value]
    if strategy is Strategy.JACOBI:
        out = state.values.copy()
        d = kern(state.values, out, co.c, co.den, co.q)
        state.values[...] = out
        return float(d)
    return float(kern(state.values, co.c, co.den, co.q))


def scheme_residual(state: MultiField, p: ProblemSpec) -> float:
    """Largest violation of the fixed-point equations over interior nodes."""
    grid = state.grid
    co = coefficients(p, grid)
    u = state.values
    bars = neighbor_average_interior(u)
    worst = 0.0
    for l in range(state.m):
        A = bars[l].copy()
        for q in range(state.m):
            if q != l:
                A -= bars[q]
        ul = u[l, 1:-1, 1:-1]
        f = co.c[l, 1:-1, 1:-1] + co.lam[l] * ul
        rhs = np.maximum(-f * co.q + A, 0.0)
        if ul.size:
            worst = max(worst, float(np.max(np.abs(ul - rhs))))
    return worst


def solve(p: ProblemSpec, g: UniformGrid, cfg: SolverConfig | None = None, initial: MultiField | None = None):
    """Relax to the discrete fixed point.

    The run counts as converged once the last update ``d`` is at most
    ``tol`` and the geometric tail ``d / (1 - rho)`` is too, where ``rho``
    is the largest ratio of successive updates over the last few sweeps.
    An update that stalls at round-off level also ends the run. Returns
    ``(state, report)``; hitting ``max_iters`` is reported, not raised.
    """
    cfg = cfg or SolverConfig()
    state = initial.copy() if initial is not None else init_state(p, g)
    co = coefficients(p, g)
    backend = cfg.backend or _kernels.backend_name()
    kern = _kernels.kernels(backend)[cfg.strategy.value]
    jacobi = cfg.strategy is Strategy.JACOBI
    u = state.values
    buf = u.copy() if jacobi else None

    cap = cfg.iteration_cap(g.N)
    ratios = deque(maxlen=RATIO_WINDOW)
    history = []
    prev = None
    floor = None
    rho = None
    reason = "max_iters"
    d = float("nan")
    it = 0
    t0 = time.perf_counter()
    for it in range(1, cap + 1):
        if jacobi:
            d = kern(u, buf, co.c, co.den, co.q)
            u, buf = buf, u
        else:
            d = kern(u, co.c, co.den, co.q)
        if d != d:
            raise FloatingPointError(f"numerical breakdown: NaN after sweep {it}")
        if it == 1 or it % cfg.log_every == 0:
            history.append((it, d))
        if prev is not None and prev > 0:
            ratios.append(d / prev)
        prev = d
        if d == 0.0:
            reason = "converged"
            break
        if d <= cfg.tol:
            if floor is None:
                floor = 8 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(u))))
            if d <= floor:
                reason = "converged"
                break
            if len(ratios) == RATIO_WINDOW:
                rho = max(ratios)
                if rho < 1 and d / (1 - rho) <= cfg.tol:
                    reason = "converged"
                    break
    wall = time.perf_counter() - t0
    if history[-1][0] != it:
        history.append((it, d))
    state.values = u
    if len(ratios):
        rho = max(ratios)
    report = SolveReport(
        iterations=it,
        final_change=float(d),
        reason=reason,
        residual=scheme_residual(state, p),
        contraction=None if rho is None else float(rho),
        strategy=cfg.strategy.value,
        backend=backend,
        wall_time=wall,
        history=history,
    )
    log.info(
        "%s N=%d %s: %s after %d sweeps (change %.3g, residual %.3g, %.2fs)",
        p.name, g.N, cfg.strategy.value, reason, it, d, report.residual, wall,
    )
    return state, report
