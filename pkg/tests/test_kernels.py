"""Both sweep backends must perform identical arithmetic."""

import os
import runpy
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from segfd import _kernels
from segfd.benchmarks import get_benchmark
from segfd.grid import make_grid
from segfd.solver import coefficients, init_state

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")


def _random_state(name, N, seed):
    p = get_benchmark(name)
    g = make_grid(1.0, N)
    s = init_state(p, g)
    rng = np.random.default_rng(seed)
    s.values[:, 1:-1, 1:-1] = rng.exponential(size=(p.m, N - 1, N - 1)) * (rng.random((p.m, N - 1, N - 1)) < 0.5)
    return p, g, s


def _run(backend, strategy, u, co):
    k = _kernels.kernels(backend)[strategy]
    if strategy == "jacobi":
        out = u.copy()
        d = k(u, out, co.c, co.den, co.q)
        return d, out
    u = u.copy()
    return k(u, co.c, co.den, co.q), u


@needs_numba
@pytest.mark.parametrize("strategy", ["jacobi", "gauss_seidel", "red_black"])
@pytest.mark.parametrize("name", ["three_sector", "affine_growth", "exp_smooth"])
@pytest.mark.parametrize("N", [2, 3, 8, 17])
def test_backends_bitwise_equal(strategy, name, N):
    p, g, s = _random_state(name, N, seed=N)
    co = coefficients(p, g)
    d_nb, u_nb = _run("numba", strategy, s.values, co)
    d_np, u_np = _run("numpy", strategy, s.values, co)
    assert np.array_equal(u_nb, u_np)
    assert d_nb == d_np


@pytest.mark.parametrize("strategy", ["jacobi", "gauss_seidel", "red_black"])
def test_numpy_backend_matches_scalar_loop(strategy):
    # plain-python reference sweep written from the update rule
    p, g, s = _random_state("affine_growth", 6, seed=1)
    co = coefficients(p, g)
    u = s.values.copy()
    src = u.copy()
    N, m = g.N, p.m

    def update(read, write, i, j):
        bar = [(read[l, j, i - 1] + read[l, j, i + 1] + read[l, j - 1, i] + read[l, j + 1, i]) / 4 for l in range(m)]
        for l in range(m):
            A = bar[l]
            for q in range(m):
                if q != l:
                    A -= bar[q]
            v = (A - co.c[l, j, i] * co.q) / co.den[l]
            write[l, j, i] = v if v > 0 else 0.0

    nodes = [(i, j) for j in range(1, N) for i in range(1, N)]
    if strategy == "jacobi":
        for i, j in nodes:
            update(src, u, i, j)
    elif strategy == "gauss_seidel":
        for i, j in nodes:
            update(u, u, i, j)
    else:
        for color in (0, 1):
            for i, j in nodes:
                if (i + j) % 2 == color:
                    update(u, u, i, j)
    d, got = _run("numpy", strategy, s.values, co)
    assert np.array_equal(got, u)
    assert d == np.abs(u - src).max()


@needs_numba
@pytest.mark.parametrize("strategy", ["jacobi", "gauss_seidel", "red_black"])
def test_nan_reported(strategy):
    p, g, s = _random_state("two_phase_flat", 8, seed=3)
    co = coefficients(p, g)
    co.c[0, 4, 4] = np.nan
    for backend in ("numba", "numpy"):
        d, _ = _run(backend, strategy, s.values, co)
        assert np.isnan(d)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.kernels("fortran")


def test_pure_numpy_flag_selects_fallback():
    code = "from segfd import _kernels; print(_kernels.backend_name())"
    env = dict(os.environ, SEGFD_PURE_NUMPY="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_benchmark_script_runs(capsys):
    bench = runpy.run_path(str(Path(__file__).parent.parent / "benchmarks" / "bench_kernels.py"))
    assert bench["main"](["--N", "8", "--repeat", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + 3
