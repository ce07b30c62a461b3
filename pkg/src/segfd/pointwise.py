"""Scalar implicit update ``s = max(-f(z, s) h^2/4 + A, 0)``.

``A`` is the drive ``avg(u_l) - sum_{p != l} avg(u_p)`` at the node. The
right-hand side is nonincreasing in ``s`` whenever ``f`` is nondecreasing, so
the fixed point is unique and lies in ``[0, max(A, 0)]``.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from segfd.dynamics import DynamicsSpec


@dataclass(frozen=True)
class PointUpdate:
    A: float
    h: float
    dyn: DynamicsSpec
    z: tuple[float, float]

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("spacing must be positive")
        if self.A != self.A or abs(self.A) == float("inf"):
            raise ValueError("drive term must be finite")


def pointwise_tolerance(A: float) -> float:
    return 1e-14 * max(1.0, abs(A))


def closed_form(A: float, c: float, lam: float, h: float) -> float:
    """Solution for ``f = c + lam*s``; ``lam = 0`` gives ``max(A - c h^2/4, 0)``."""
    q = h * h / 4
    return max((A - c * q) / (1 + lam * q), 0.0)


def bisect_pointwise(f: Callable[[float], float], A: float, h: float) -> float:
    """Solve ``s = max(-f(s) h^2/4 + A, 0)`` for any nondecreasing ``f``.

    Only Lipschitz continuity is assumed, so no derivatives are used.
    """
    q = h * h / 4
    hi = max(A, 0.0)
    if hi == 0.0:
        return 0.0
    f0, f1 = f(0.0), f(hi)
    if f1 < f0:
        raise ValueError("monotonicity violated: f decreases in s")

    def g(s):
        return max(-f(s) * q + A, 0.0) - s

    if g(0.0) <= 0.0:
        return 0.0
    lo = 0.0
    eps = pointwise_tolerance(A)
    for _ in range(200):
        if hi - lo <= eps:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_pointwise(pu: PointUpdate, method: str = "auto") -> float:
    """Unique ``s* >= 0`` with ``s* = max(-f(z, s*) h^2/4 + A, 0)``.

    ``method="auto"`` uses the closed form of the affine family;
    ``method="bisect"`` runs the derivative-free bracket search instead.
    """
    c = float(pu.dyn.source(*pu.z))
    lam = pu.dyn.lam
    if method == "auto":
        return closed_form(pu.A, c, lam, pu.h)
    if method == "bisect":
        return bisect_pointwise(lambda s: c + lam * s, pu.A, pu.h)
    raise ValueError(f"unknown method {method!r}")
