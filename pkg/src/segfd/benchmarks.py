"""Catalog of benchmark problems on the unit square."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from segfd.dynamics import BoundarySpec, DynamicsSpec, ProblemSpec, zero_trace

INTERFACE = 0.5


def _zeros(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def _all_zero(m: int = 2) -> ProblemSpec:
    return ProblemSpec(
        dynamics=[DynamicsSpec.constant(1.0)] * m,
        boundary=BoundarySpec([zero_trace] * m),
        exact=[_zeros] * m,
        exact_laplacian=[_zeros] * m,
        smooth=True,
        name="all_zero",
    )


def _paraboloid_u(x, y):
    return 1 + x**2 + y**2


def _paraboloid() -> ProblemSpec:
    return ProblemSpec(
        dynamics=[DynamicsSpec.constant(4.0), DynamicsSpec.constant(1.0)],
        boundary=BoundarySpec([_paraboloid_u, zero_trace]),
        exact=[_paraboloid_u, _zeros],
        exact_laplacian=[lambda x, y: np.full(np.broadcast(x, y).shape, 4.0), _zeros],
        smooth=True,
        name="paraboloid",
    )


def _exp_u(x, y):
    return np.exp(x + y)


def _exp_lap(x, y):
    return 2 * np.exp(x + y)


def _exp_smooth() -> ProblemSpec:
    return ProblemSpec(
        dynamics=[DynamicsSpec.spatial(_exp_lap, label="2exp(x+y)"), DynamicsSpec.constant(1.0)],
        boundary=BoundarySpec([_exp_u, zero_trace]),
        exact=[_exp_u, _zeros],
        exact_laplacian=[_exp_lap, _zeros],
        smooth=True,
        name="exp_smooth",
    )


def _right_phase(x, y):
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.maximum(x - INTERFACE, 0.0) ** 2, np.broadcast(x, y).shape)


def _left_phase(x, y):
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.maximum(INTERFACE - x, 0.0) ** 2, np.broadcast(x, y).shape)


def _two_phase_flat() -> ProblemSpec:
    # u1 - u2 = sign(x - c)(x - c)^2 has Laplacian 2 on both sides of x = c
    return ProblemSpec(
        dynamics=[DynamicsSpec.constant(2.0), DynamicsSpec.constant(2.0)],
        boundary=BoundarySpec([_right_phase, _left_phase]),
        exact=[_right_phase, _left_phase],
        exact_laplacian=[
            lambda x, y: 2.0 * (np.asarray(x) > INTERFACE) + 0 * np.asarray(y),
            lambda x, y: 2.0 * (np.asarray(x) < INTERFACE) + 0 * np.asarray(y),
        ],
        smooth=False,
        name="two_phase_flat",
    )


def sector_phase(l: int, m: int = 3, center=(0.5, 0.5)):
    """Trace of ``r^{m/2} cos(m*phi/2)`` on the sector of width ``2pi/m``
    centred at angle ``2*pi*l/m`` (``l = 1..m``), zero elsewhere.

    Ownership is decided by the nearest sector axis so that nodes on a
    sector edge belong to exactly one component.
    """
    axes = 2 * np.pi * np.arange(1, m + 1) / m

    def trace(x, y):
        dx = np.asarray(x, dtype=float) - center[0]
        dy = np.asarray(y, dtype=float) - center[1]
        r = np.hypot(dx, dy)
        theta = np.arctan2(dy, dx)
        rel = (theta[..., None] - axes + np.pi) % (2 * np.pi) - np.pi
        owner = np.argmin(np.abs(rel), axis=-1)
        phi = np.take_along_axis(rel, owner[..., None], axis=-1)[..., 0]
        val = r ** (m / 2) * np.maximum(np.cos(m * phi / 2), 0.0)
        return np.where(owner == l - 1, val, 0.0)

    return trace


def _three_sector() -> ProblemSpec:
    return ProblemSpec(
        dynamics=[DynamicsSpec.zero()] * 3,
        boundary=BoundarySpec([sector_phase(l) for l in (1, 2, 3)]),
        name="three_sector",
    )


def _affine_growth() -> ProblemSpec:
    return ProblemSpec(
        dynamics=[DynamicsSpec.affine(2.0, 1.0), DynamicsSpec.affine(2.0, 1.0)],
        boundary=BoundarySpec([_right_phase, _left_phase]),
        name="affine_growth",
    )


BENCHMARKS = {
    "all_zero": (_all_zero, "m components, zero boundary data, f = 1; exact solution u = 0"),
    "paraboloid": (_paraboloid, "m=2, u1 = 1 + x^2 + y^2 with f1 = 4, u2 = 0; exact discrete fixed point"),
    "exp_smooth": (_exp_smooth, "m=2, u1 = exp(x+y) with f1 = 2exp(x+y), u2 = 0; smooth, O(h^2) error"),
    "two_phase_flat": (
        _two_phase_flat,
        "m=2, f = 2, u1 = ((x-1/2)+)^2, u2 = ((1/2-x)+)^2; flat free boundary at x = 1/2",
    ),
    "three_sector": (
        _three_sector,
        "m=3, f = 0, boundary r^{3/2} cos(3(theta-theta_l)/2)+ about the centre; reference-based",
    ),
    "affine_growth": (_affine_growth, "two_phase_flat boundary with f = 2 + s; implicit pointwise solves"),
}


def get_benchmark(name: str, m: int | None = None) -> ProblemSpec:
    """Build catalog problem ``name``; ``m`` is only free for ``all_zero``."""
    if name not in BENCHMARKS:
        raise KeyError(f"no such benchmark: {name!r}")
    build = BENCHMARKS[name][0]
    if name == "all_zero":
        p = build(2 if m is None else int(m))
    else:
        p = build()
        if m is not None and m != p.m:
            raise ValueError(f"benchmark {name!r} has m={p.m}, not {m}")
    return replace(p, description=BENCHMARKS[name][1])
