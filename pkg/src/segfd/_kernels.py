"""Relaxation sweeps for the projected fixed-point system.

Every sweep updates all (interior node, component) pairs with

    u_l <- max((A_l - c_l q) / (1 + lam_l q), 0),   q = h^2/4,
    A_l  = avg(u_l) - sum_{p != l} avg(u_p)

and returns the largest change. Two backends implement the same arithmetic
in the same order: numba ``@njit`` kernels and a vectorised numpy path.
Set ``SEGFD_PURE_NUMPY=1`` to force the numpy path (numba is also skipped
when it cannot be imported).

Lexicographic Gauss-Seidel is vectorised in numpy along anti-diagonals
``i + j = k``: node (i, j) reads (i-1, j) and (i, j-1) from diagonal k-1 and
(i+1, j), (i, j+1) from diagonal k+1, exactly as the row-by-row loop does.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

_FLAG = os.environ.get("SEGFD_PURE_NUMPY", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _FLAG:
        raise ImportError
    from numba import config as _nb_config
    from numba import njit, prange

    # the probe of an outdated TBB only produces a warning; workqueue is
    # always present and sufficient for row-parallel sweeps
    if "NUMBA_THREADING_LAYER" not in os.environ:
        _nb_config.THREADING_LAYER = "workqueue"

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _FLAG


# ---------------------------------------------------------------- numpy path


def _nanmax(a: float, b: float) -> float:
    return float(np.maximum(a, b))


def _drive(bars: np.ndarray, l: int) -> np.ndarray:
    A = bars[l].copy()
    for p in range(bars.shape[0]):
        if p != l:
            A -= bars[p]
    return A


def _bars(u, jj, ii):
    return (u[:, jj, ii - 1] + u[:, jj, ii + 1] + u[:, jj - 1, ii] + u[:, jj + 1, ii]) / 4


def _update_nodes(u, c, den, q, jj, ii):
    bars = _bars(u, jj, ii)
    dmax = 0.0
    new = np.empty_like(bars)
    for l in range(u.shape[0]):
        s = (_drive(bars, l) - c[l, jj, ii] * q) / den[l]
        new[l] = np.where(s <= 0.0, 0.0, s)
    if new.size:
        dmax = float(np.max(np.abs(new - u[:, jj, ii])))
    u[:, jj, ii] = new
    return dmax


@lru_cache(maxsize=16)
def _interior_index(n: int):
    j, i = np.mgrid[1:n, 1:n]
    return j.ravel(), i.ravel()


@lru_cache(maxsize=16)
def _diagonals(n: int):
    out = []
    for k in range(2, 2 * n - 1):
        i = np.arange(max(1, k - n + 1), min(n - 1, k - 1) + 1)
        j = k - i
        # lexicographic order within the diagonal is irrelevant: no two
        # nodes of one diagonal are neighbours
        out.append((j, i))
    return out


@lru_cache(maxsize=16)
def _colors(n: int):
    j, i = _interior_index(n)
    even = (i + j) % 2 == 0
    return (j[even], i[even]), (j[~even], i[~even])


def np_jacobi(u, out, c, den, q):
    """Jacobi sweep reading ``u`` and writing interior values into ``out``."""
    n = u.shape[-1] - 1
    jj, ii = _interior_index(n)
    out[:, jj, ii] = u[:, jj, ii]
    return _jacobi_into(u, out, c, den, q, jj, ii)


def _jacobi_into(u, out, c, den, q, jj, ii):
    bars = _bars(u, jj, ii)
    dmax = 0.0
    for l in range(u.shape[0]):
        s = (_drive(bars, l) - c[l, jj, ii] * q) / den[l]
        s = np.where(s <= 0.0, 0.0, s)
        if s.size:
            dmax = _nanmax(dmax, float(np.max(np.abs(s - u[l, jj, ii]))))
        out[l, jj, ii] = s
    return dmax


def np_gauss_seidel(u, c, den, q):
    n = u.shape[-1] - 1
    dmax = 0.0
    for jj, ii in _diagonals(n):
        dmax = _nanmax(dmax, _update_nodes(u, c, den, q, jj, ii))
    return dmax


def np_red_black(u, c, den, q):
    n = u.shape[-1] - 1
    dmax = 0.0
    for jj, ii in _colors(n):
        dmax = _nanmax(dmax, _update_nodes(u, c, den, q, jj, ii))
    return dmax


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:
    # NaN detection rides on a running sum of the new values so the
    # per-node max stays a plain comparison

    @njit(cache=True)
    def nb_gauss_seidel(u, c, den, q):
        m = u.shape[0]
        n = u.shape[2] - 1
        bar = np.empty(m)
        dmax = 0.0
        acc = 0.0
        for j in range(1, n):
            for i in range(1, n):
                for p in range(m):
                    bar[p] = (u[p, j, i - 1] + u[p, j, i + 1] + u[p, j - 1, i] + u[p, j + 1, i]) / 4
                for l in range(m):
                    A = bar[l]
                    for p in range(m):
                        if p != l:
                            A -= bar[p]
                    s = (A - c[l, j, i] * q) / den[l]
                    if s <= 0.0:
                        s = 0.0
                    d = abs(s - u[l, j, i])
                    if d > dmax:
                        dmax = d
                    acc += s
                    u[l, j, i] = s
        return dmax if acc == acc else np.nan

    @njit(cache=True, parallel=True)
    def nb_jacobi(u, out, c, den, q):
        m = u.shape[0]
        n = u.shape[2] - 1
        rowmax = np.zeros(n + 1)
        rowacc = np.zeros(n + 1)
        for j in prange(1, n):
            bar = np.empty(m)
            rm = 0.0
            acc = 0.0
            for i in range(1, n):
                for p in range(m):
                    bar[p] = (u[p, j, i - 1] + u[p, j, i + 1] + u[p, j - 1, i] + u[p, j + 1, i]) / 4
                for l in range(m):
                    A = bar[l]
                    for p in range(m):
                        if p != l:
                            A -= bar[p]
                    s = (A - c[l, j, i] * q) / den[l]
                    if s <= 0.0:
                        s = 0.0
                    d = abs(s - u[l, j, i])
                    if d > rm:
                        rm = d
                    acc += s
                    out[l, j, i] = s
            rowmax[j] = rm
            rowacc[j] = acc
        return _ordered_max(rowmax, rowacc)

    @njit(cache=True, parallel=True)
    def _half_sweep(u, c, den, q, color, rowmax, rowacc):
        m = u.shape[0]
        n = u.shape[2] - 1
        for j in prange(1, n):
            bar = np.empty(m)
            rm = 0.0
            acc = 0.0
            for i in range(1 + (j + 1 + color) % 2, n, 2):
                for p in range(m):
                    bar[p] = (u[p, j, i - 1] + u[p, j, i + 1] + u[p, j - 1, i] + u[p, j + 1, i]) / 4
                for l in range(m):
                    A = bar[l]
                    for p in range(m):
                        if p != l:
                            A -= bar[p]
                    s = (A - c[l, j, i] * q) / den[l]
                    if s <= 0.0:
                        s = 0.0
                    d = abs(s - u[l, j, i])
                    if d > rm:
                        rm = d
                    acc += s
                    u[l, j, i] = s
            rowmax[j] = rm
            rowacc[j] = acc

    @njit(cache=True)
    def _ordered_max(rowmax, rowacc):
        dmax = 0.0
        for k in range(rowmax.shape[0]):
            if rowacc[k] != rowacc[k]:
                return np.nan
            if rowmax[k] > dmax:
                dmax = rowmax[k]
        return dmax

    def nb_red_black(u, c, den, q):
        n1 = u.shape[2]
        rowmax = np.zeros(n1)
        rowacc = np.zeros(n1)
        _half_sweep(u, c, den, q, 0, rowmax, rowacc)
        d0 = _ordered_max(rowmax, rowacc)
        _half_sweep(u, c, den, q, 1, rowmax, rowacc)
        d1 = _ordered_max(rowmax, rowacc)
        if d0 != d0 or d1 != d1:
            return np.nan
        return max(d0, d1)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def kernels(backend: str | None = None) -> dict:
    """Sweep functions keyed by strategy for ``backend`` ("numba"/"numpy")."""
    backend = backend or backend_name()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return {"jacobi": nb_jacobi, "gauss_seidel": nb_gauss_seidel, "red_black": nb_red_black}
    if backend == "numpy":
        return {"jacobi": np_jacobi, "gauss_seidel": np_gauss_seidel, "red_black": np_red_black}
    raise ValueError(f"unknown backend {backend!r}")
