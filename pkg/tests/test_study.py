import math

import numpy as np
import pytest

from segfd.benchmarks import get_benchmark
from segfd.grid import make_grid
from segfd.solver import SolverConfig
from segfd.study import fit_order, restrict, richardson_reference, run_study

TAU = 1e-10


def ls_slope(points):
    xs = [math.log(h) for h, _ in points]
    ys = [math.log(e) for _, e in points]
    xm, ym = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((x - xm) * (y - ym) for x, y in zip(xs, ys)) / sum((x - xm) ** 2 for x in xs)


def test_fit_order_examples():
    assert fit_order([(0.1, 1e-2), (0.05, 2.5e-3)]) == pytest.approx(2.0, abs=1e-12)
    assert fit_order([(0.1, 1e-2), (0.05, 5e-3)]) == pytest.approx(1.0, abs=1e-12)
    pts = [(0.1, 1e-2), (0.05, 2.6e-3), (0.025, 6.4e-4)]
    assert fit_order(pts) == pytest.approx(ls_slope(pts), abs=1e-12)
    assert fit_order(pts) == pytest.approx(1.98, abs=0.01)


def test_fit_order_degenerate():
    assert fit_order([(0.1, 0.0), (0.05, 0.0), (0.025, 0.0)]) is None
    assert fit_order([(0.1, 1e-3), (0.05, 1e-12)], floor=1e-9) is None


def test_restriction_of_nodal_function_is_exact():
    fine, coarse = make_grid(1.0, 64), make_grid(1.0, 16)
    f = lambda X, Y: np.sin(3 * X) * np.exp(Y)  # noqa: E731
    assert np.array_equal(restrict(f(*fine.mesh), 64, 16), f(*coarse.mesh))
    with pytest.raises(ValueError, match="incompatible ladder"):
        restrict(f(*fine.mesh), 64, 24)


def test_incompatible_reference():
    p = get_benchmark("three_sector")
    with pytest.raises(ValueError, match="incompatible ladder"):
        richardson_reference(p, 100, SolverConfig(), ladder=[16])
    with pytest.raises(ValueError, match="incompatible ladder"):
        richardson_reference(p, 48, SolverConfig(), ladder=[32])
    with pytest.raises(ValueError, match="incompatible ladder"):
        run_study(p, [12, 16, 20])


def test_ladder_checks():
    p = get_benchmark("all_zero")
    with pytest.raises(ValueError, match="too short"):
        run_study(p, [8, 16])
    with pytest.raises(ValueError, match="increasing"):
        run_study(p, [8, 16, 16])


def test_all_zero_degenerate():
    r = run_study(get_benchmark("all_zero", m=3), [4, 8, 16])
    assert all(np.all(row.errors == 0) for row in r.rows)
    assert r.degenerate and r.fitted_order is None
    assert all(row.bound_ok for row in r.rows)


def test_two_phase_flat_exact_at_every_level():
    r = run_study(get_benchmark("two_phase_flat"), [16, 32, 64])
    assert r.ladder == [16, 32, 64]
    assert all(row.max_error <= 10 * TAU for row in r.rows)
    assert r.degenerate


def test_reference_mode_on_problem_with_exact():
    r = run_study(get_benchmark("paraboloid"), [4, 8, 16], reference=True)
    assert r.reference == "richardson" and r.N_ref == 64
    assert all(row.max_error <= 20 * TAU for row in r.rows)
    assert all(row.bound is None for row in r.rows)


def test_report_dict_round_trip_fields():
    r = run_study(get_benchmark("exp_smooth"), [4, 8, 16])
    d = r.as_dict()
    assert [row["N"] for row in d["rows"]] == [4, 8, 16]
    assert d["fitted_order"] == r.fitted_order
    assert all(row["bound_ok"] for row in d["rows"])
