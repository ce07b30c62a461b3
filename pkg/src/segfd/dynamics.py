"""Internal dynamics, boundary traces and problem descriptions.

The reaction terms form a closed catalog of forms that are nondecreasing in
the density ``s``::

    zero        f = 0
    constant    f = c                   (c >= 0)
    spatial     f = g(x, y)             (g >= 0, closed form or nodal table)
    affine      f = c(x, y) + lam * s   (c >= 0, lam >= 0)

so every kind is ``f = c(x, y) + lam*s`` with a nodal source ``c`` and a
rate ``lam``; the solver kernels only ever see those two pieces.
"""

from __future__ import annotations

import csv
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from segfd.grid import UniformGrid, make_grid

KINDS = ("zero", "constant", "spatial", "affine")


class NodalTable:
    """Values sampled on the nodes of an ``N x N`` mesh of ``(0, a)^2``.

    Calling the table with coordinates looks up the coinciding node; any
    mesh whose nodes are a subset of the table's nodes can use it.
    """

    def __init__(self, values: np.ndarray, a: float):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("nodal table must be square")
        self.values = values
        self.a = float(a)
        self.N = values.shape[0] - 1

    def __call__(self, x, y):
        h = self.a / self.N
        fx = np.asarray(x, dtype=float) / h
        fy = np.asarray(y, dtype=float) / h
        i = np.rint(fx)
        j = np.rint(fy)
        if np.any(np.abs(fx - i) > 1e-9) or np.any(np.abs(fy - j) > 1e-9):
            raise ValueError(
                f"table resolution mismatch: queried points are not nodes of the N={self.N} table"
            )
        return self.values[j.astype(int), i.astype(int)]

    def __repr__(self):
        return f"NodalTable(N={self.N}, a={self.a})"


def load_nodal_table(path: str | Path, a: float) -> NodalTable:
    """Read an ``i,j,value`` CSV covering every node of the mesh."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["i", "j", "value"]:
            raise ValueError(f"{path}: expected header i,j,value")
        for r in reader:
            rows.append((int(r["i"]), int(r["j"]), float(r["value"])))
    if not rows:
        raise ValueError(f"{path}: empty table")
    N = max(max(i, j) for i, j, _ in rows)
    values = np.full((N + 1, N + 1), np.nan)
    for i, j, v in rows:
        values[j, i] = v
    if np.isnan(values).any():
        raise ValueError(f"{path}: table does not cover all {(N + 1) ** 2} nodes")
    return NodalTable(values, a)


def load_boundary_table(path: str | Path, a: float) -> NodalTable:
    """Read a ``side,k,value`` CSV (sides S, E, N, W; ``k = 0..N``).

    S is ``y = 0`` and N is ``y = a`` (``k`` runs along x); W is ``x = 0``
    and E is ``x = a`` (``k`` runs along y). Interior entries are zero.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["side", "k", "value"]:
            raise ValueError(f"{path}: expected header side,k,value")
        for r in reader:
            side = r["side"].strip().upper()
            if side not in ("S", "E", "N", "W"):
                raise ValueError(f"{path}: unknown side {side!r}")
            rows.append((side, int(r["k"]), float(r["value"])))
    if not rows:
        raise ValueError(f"{path}: empty table")
    N = max(k for _, k, _ in rows)
    if N < 2:
        raise ValueError(f"{path}: degenerate mesh")
    values = np.zeros((N + 1, N + 1))
    seen = np.zeros((N + 1, N + 1), dtype=bool)
    for side, k, v in rows:
        j, i = {"S": (0, k), "N": (N, k), "W": (k, 0), "E": (k, N)}[side]
        if seen[j, i] and values[j, i] != v:
            raise ValueError(f"{path}: inconsistent corner value at node ({i}, {j})")
        values[j, i] = v
        seen[j, i] = True
    ring = ~np.pad(np.ones((N - 1, N - 1), dtype=bool), 1)
    if not seen[ring].all():
        raise ValueError(f"{path}: table does not cover all boundary nodes")
    return NodalTable(values, a)


@dataclass(frozen=True)
class DynamicsSpec:
    """Reaction term ``f(x, y, s) = c(x, y) + lam * s`` of one component."""

    kind: str
    c: "float | Callable" = 0.0
    lam: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dynamics kind {self.kind!r}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"monotonicity: rate lambda={self.lam} must be >= 0")
        if self.kind in ("zero", "constant", "spatial") and self.lam != 0:
            raise ValueError(f"{self.kind} dynamics cannot depend on s")
        if self.kind == "zero" and (callable(self.c) or self.c != 0):
            raise ValueError("zero dynamics has no source")
        if self.kind == "constant":
            if callable(self.c) or not np.isfinite(self.c) or self.c < 0:
                raise ValueError(f"constant dynamics needs a finite c >= 0, got {self.c!r}")
        if self.kind == "spatial" and not callable(self.c):
            raise ValueError("spatial dynamics needs a function of (x, y)")
        if self.kind == "affine" and not callable(self.c) and (not np.isfinite(self.c) or self.c < 0):
            raise ValueError(f"affine dynamics needs c >= 0, got {self.c!r}")

    @classmethod
    def zero(cls) -> DynamicsSpec:
        return cls("zero")

    @classmethod
    def constant(cls, c: float) -> DynamicsSpec:
        return cls("constant", float(c))

    @classmethod
    def spatial(cls, g: Callable, label: str = "") -> DynamicsSpec:
        return cls("spatial", g, label=label)

    @classmethod
    def affine(cls, c, lam: float, label: str = "") -> DynamicsSpec:
        return cls("affine", c if callable(c) else float(c), float(lam), label=label)

    @property
    def lipschitz(self) -> float:
        return self.lam

    def source(self, x, y) -> np.ndarray:
        """The s-independent part ``c(x, y) = f(x, y, 0)``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if callable(self.c):
            return np.broadcast_to(np.asarray(self.c(x, y), dtype=float), np.broadcast(x, y).shape)
        return np.full(np.broadcast(x, y).shape, float(self.c))

    def nodal_source(self, grid: UniformGrid) -> np.ndarray:
        X, Y = grid.mesh
        return np.ascontiguousarray(self.source(X, Y), dtype=float)

    def describe(self) -> str:
        if self.kind == "zero":
            return "zero"
        c = self.label or ("c(x,y)" if callable(self.c) else repr(self.c))
        if self.kind == "constant":
            return f"constant({c})"
        if self.kind == "spatial":
            return f"spatial({c})"
        return f"affine(c={c}, lambda={self.lam})"


def eval_f(spec: DynamicsSpec, z: tuple[float, float], s: float) -> float:
    if s < 0:
        raise ValueError(f"negative density query s={s}")
    return float(spec.source(z[0], z[1])) + spec.lam * s


def eval_F(spec: DynamicsSpec, z: tuple[float, float], s: float) -> float:
    """Antiderivative ``F(z, s) = int_0^s f(z, v) dv``."""
    if s < 0:
        raise ValueError(f"negative density query s={s}")
    return float(spec.source(z[0], z[1])) * s + spec.lam * s * s / 2


@dataclass(frozen=True)
class BoundarySpec:
    """Per-component traces ``phi_l``, evaluated on boundary nodes only."""

    traces: tuple

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))

    def __len__(self):
        return len(self.traces)

    def values(self, grid: UniformGrid) -> np.ndarray:
        """Stack ``(m, N+1, N+1)`` holding ``phi_l`` on the ring, 0 inside."""
        X, Y = grid.mesh
        ring = grid.boundary_mask
        out = np.zeros((len(self.traces),) + grid.shape)
        for l, phi in enumerate(self.traces):
            out[l][ring] = np.broadcast_to(np.asarray(phi(X[ring], Y[ring]), dtype=float), X[ring].shape)
        return out


def zero_trace(x, y):
    return np.zeros(np.broadcast(x, y).shape)


@dataclass(frozen=True)
class ProblemSpec:
    """Complete problem data on ``(0, a)^2``.

    ``exact`` and ``exact_laplacian``, when given, are ``m`` vectorised
    callables of ``(x, y)``. ``smooth`` marks an exact solution regular
    enough (C^2) for the a-priori error bound to apply.
    """

    dynamics: tuple
    boundary: BoundarySpec
    a: float = 1.0
    exact: tuple | None = None
    exact_laplacian: tuple | None = None
    smooth: bool = False
    name: str = "custom"
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dynamics", tuple(self.dynamics))
        if self.m < 1:
            raise ValueError("need at least one component")
        if not self.a > 0:
            raise ValueError(f"invalid domain: a={self.a}")
        if len(self.boundary) != self.m:
            raise ValueError(f"{len(self.boundary)} boundary traces for {self.m} components")
        for name in ("exact", "exact_laplacian"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(val))
                if len(val) != self.m:
                    raise ValueError(f"{name} must have {self.m} entries")
        if self.exact is not None:
            report = validate_problem(self, probe_N=8)
            if not report.ok:
                raise ValueError("inconsistent exact solution: " + "; ".join(report.issues))

    @property
    def m(self) -> int:
        return len(self.dynamics)

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    @property
    def native_N(self) -> int | None:
        """Resolution of any sampled table in the problem, if there is one."""
        tables = [d.c for d in self.dynamics if isinstance(d.c, NodalTable)]
        tables += [t for t in self.boundary.traces if isinstance(t, NodalTable)]
        sizes = {t.N for t in tables}
        if len(sizes) > 1:
            raise ValueError(f"sampled tables disagree on resolution: {sorted(sizes)}")
        return sizes.pop() if sizes else None

    def exact_values(self, grid: UniformGrid) -> np.ndarray:
        if self.exact is None:
            raise ValueError("reference unavailable: problem has no exact solution")
        X, Y = grid.mesh
        return np.stack([np.broadcast_to(np.asarray(u(X, Y), dtype=float), grid.shape) for u in self.exact])


@dataclass
class ValidationReport:
    ok: bool = True
    issues: list = field(default_factory=list)
    pairs: list = field(default_factory=list)

    def fail(self, msg: str, pair: tuple[int, int] | None = None):
        self.ok = False
        self.issues.append(msg)
        if pair is not None and pair not in self.pairs:
            self.pairs.append(pair)


def validate_problem(p: ProblemSpec, probe_N: int = 16, atol: float = 1e-12) -> ValidationReport:
    """Check the hypotheses of the scheme on the nodes of a probe mesh.

    Components are reported 1-based, matching file and config naming.
    """
    native = p.native_N
    if native is not None:
        probe_N = native
    grid = make_grid(p.a, probe_N)
    report = ValidationReport()
    X, Y = grid.mesh
    ring = grid.boundary_mask

    phi = p.boundary.values(grid)
    for l in range(p.m):
        bad = phi[l][ring] < 0
        if bad.any() or not np.isfinite(phi[l]).all():
            report.fail(f"boundary trace {l + 1} negative or non-finite at {int(bad.sum())} nodes")
    for q in range(p.m):
        for r in range(q + 1, p.m):
            overlap = np.minimum(phi[q], phi[r])[ring]
            if np.any(overlap != 0):
                k = int(np.argmax(overlap != 0))
                jj, ii = np.argwhere(ring)[k]
                report.fail(
                    f"boundary traces {q + 1} and {r + 1} overlap at node ({ii}, {jj})", (q + 1, r + 1)
                )

    for l, dyn in enumerate(p.dynamics):
        if dyn.lam < 0:
            report.fail(f"dynamics {l + 1}: negative rate")
        c = dyn.nodal_source(grid)
        if not np.isfinite(c).all() or (c < 0).any():
            report.fail(f"dynamics {l + 1}: f(z, 0) negative or non-finite")

    if p.exact is not None:
        u = p.exact_values(grid)
        if (u < -atol).any():
            report.fail("exact solution has negative values")
        for q in range(p.m):
            for r in range(q + 1, p.m):
                if np.abs(u[q] * u[r]).max() > atol:
                    report.fail(f"exact components {q + 1} and {r + 1} are not segregated", (q + 1, r + 1))
        for l in range(p.m):
            mismatch = np.abs(u[l][ring] - phi[l][ring]).max()
            if mismatch > atol:
                report.fail(f"exact component {l + 1} misses its boundary trace by {mismatch:.3g}")
    return report
