"""Uniform square mesh on (0, a)^2 and the 5-point stencil.

Nodal fields are ``(N+1, N+1)`` float arrays indexed ``[j, i]`` so that the
flat row-major offset of node (i, j) is ``j*(N+1) + i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class UniformGrid:
    """Square lattice ``(i*h, j*h)``, ``0 <= i, j <= N``, with ``h = a/N``."""

    a: float
    N: int

    @property
    def h(self) -> float:
        return self.a / self.N

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N + 1, self.N + 1)

    @property
    def n_nodes(self) -> int:
        return (self.N + 1) ** 2

    @property
    def n_interior(self) -> int:
        return (self.N - 1) ** 2

    @cached_property
    def coords(self) -> np.ndarray:
        # i*h, never accumulated
        return np.arange(self.N + 1) * self.h

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``X[j, i] = i*h`` and ``Y[j, i] = j*h``."""
        X, Y = np.meshgrid(self.coords, self.coords, indexing="xy")
        X.flags.writeable = False
        Y.flags.writeable = False
        return X, Y

    @cached_property
    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[1:-1, 1:-1] = True
        mask.flags.writeable = False
        return mask

    @property
    def boundary_mask(self) -> np.ndarray:
        return ~self.interior_mask

    def is_interior(self, i: int, j: int) -> bool:
        return 1 <= i <= self.N - 1 and 1 <= j <= self.N - 1

    def point(self, i: int, j: int) -> tuple[float, float]:
        return (i * self.h, j * self.h)

    def flat_index(self, i: int, j: int) -> int:
        return j * (self.N + 1) + i


def make_grid(a: float, N: int) -> UniformGrid:
    """Build the mesh, rejecting meshes without an interior node."""
    if not a > 0:
        raise ValueError(f"invalid domain: side length a={a!r} must be positive")
    if int(N) != N or N < 2:
        raise ValueError(f"degenerate mesh: N={N!r} leaves no interior node")
    return UniformGrid(float(a), int(N))


def _check_interior(f: np.ndarray, node: tuple[int, int]) -> tuple[int, int]:
    i, j = node
    n = f.shape[-1] - 1
    if not (1 <= i <= n - 1 and 1 <= j <= n - 1):
        raise IndexError(f"stencil out of range at node {node}")
    return i, j


def neighbor_average(f: np.ndarray, node: tuple[int, int]) -> float:
    """Mean of the four axis neighbours of interior node ``(i, j)``."""
    i, j = _check_interior(f, node)
    return (f[j, i - 1] + f[j, i + 1] + f[j - 1, i] + f[j + 1, i]) / 4


def apply_lh(grid: UniformGrid, f: np.ndarray, node: tuple[int, int]) -> float:
    """5-point discrete Laplacian of ``f`` at interior node ``(i, j)``."""
    i, j = _check_interior(f, node)
    h = grid.h
    return (f[j, i - 1] + f[j, i + 1] - 4 * f[j, i] + f[j - 1, i] + f[j + 1, i]) / (h * h)


def neighbor_average_interior(f: np.ndarray) -> np.ndarray:
    """Vectorised :func:`neighbor_average` over all interior nodes.

    Works on a single field ``(N+1, N+1)`` or a stack ``(m, N+1, N+1)``;
    the result drops the boundary ring.
    """
    return (
        f[..., 1:-1, :-2] + f[..., 1:-1, 2:] + f[..., :-2, 1:-1] + f[..., 2:, 1:-1]
    ) / 4


def lh_interior(grid: UniformGrid, f: np.ndarray) -> np.ndarray:
    """Vectorised :func:`apply_lh` over all interior nodes."""
    h = grid.h
    return (
        f[..., 1:-1, :-2] + f[..., 1:-1, 2:] - 4 * f[..., 1:-1, 1:-1]
        + f[..., :-2, 1:-1] + f[..., 2:, 1:-1]
    ) / (h * h)
