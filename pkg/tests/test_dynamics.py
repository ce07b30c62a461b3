import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segfd.benchmarks import BENCHMARKS, get_benchmark
from segfd.dynamics import (
    BoundarySpec,
    DynamicsSpec,
    ProblemSpec,
    eval_F,
    eval_f,
    load_boundary_table,
    load_nodal_table,
    validate_problem,
    zero_trace,
)
from segfd.grid import lh_interior, make_grid
from segfd.solver import scheme_residual
from segfd.verify import exact_state

Z = (0.3, 0.7)


def test_eval_f_examples():
    assert eval_f(DynamicsSpec.zero(), Z, 5.0) == 0.0
    assert eval_f(DynamicsSpec.constant(4), Z, 7.0) == 4.0
    assert eval_f(DynamicsSpec.affine(1.0, 2.0), Z, 0.5) == 2.0


def test_eval_F_examples():
    assert eval_F(DynamicsSpec.constant(4), Z, 0.0) == 0.0
    assert eval_F(DynamicsSpec.constant(4), Z, 0.5) == 2.0
    assert eval_F(DynamicsSpec.affine(1.0, 2.0), Z, 1.0) == 2.0
    assert eval_F(DynamicsSpec.spatial(lambda x, y: x + y), Z, 2.0) == pytest.approx(2.0)


def test_negative_density_query():
    with pytest.raises(ValueError, match="negative density"):
        eval_f(DynamicsSpec.constant(1), Z, -1e-3)


@pytest.mark.parametrize(
    "build",
    [
        lambda: DynamicsSpec.affine(1.0, -1.0),
        lambda: DynamicsSpec.constant(-2.0),
        lambda: DynamicsSpec("constant", 1.0, 0.5),
        lambda: DynamicsSpec("quadratic"),
        lambda: DynamicsSpec("spatial", 1.0),
    ],
)
def test_invalid_dynamics_rejected(build):
    with pytest.raises(ValueError):
        build()


def test_negative_rate_message():
    with pytest.raises(ValueError, match="monotonicity"):
        DynamicsSpec.affine(0.0, -1.0)


DYN = st.one_of(
    st.just(DynamicsSpec.zero()),
    st.floats(0, 10).map(DynamicsSpec.constant),
    st.tuples(st.floats(0, 5), st.floats(0, 5)).map(lambda t: DynamicsSpec.affine(t[0], t[1])),
    st.floats(0, 3).map(lambda k: DynamicsSpec.spatial(lambda x, y: k * np.exp(x - y))),
)


@settings(max_examples=100, deadline=None)
@given(dyn=DYN, x=st.floats(0, 1), y=st.floats(0, 1), s1=st.floats(0, 10), s2=st.floats(0, 10))
def test_eval_f_monotone_in_s(dyn, x, y, s1, s2):
    lo, hi = sorted((s1, s2))
    assert eval_f(dyn, (x, y), lo) <= eval_f(dyn, (x, y), hi)


@settings(max_examples=100, deadline=None)
@given(dyn=DYN, x=st.floats(0, 1), y=st.floats(0, 1), s=st.floats(0, 5))
def test_eval_F_difference_quotient(dyn, x, y, s):
    for delta in (1e-4, 1e-5):
        quotient = (eval_F(dyn, (x, y), s + delta) - eval_F(dyn, (x, y), s)) / delta
        assert abs(quotient - eval_f(dyn, (x, y), s)) <= 10 * delta * dyn.lipschitz + 1e-8 * max(1, eval_f(dyn, (x, y), s + 1))


@pytest.mark.parametrize("name", [n for n in BENCHMARKS])
def test_catalog_validates(name):
    p = get_benchmark(name)
    report = validate_problem(p, probe_N=16)
    assert report.ok, report.issues


def test_two_phase_flat_valid_by_direct_checks():
    # oracle: evaluate every check by hand at the probe nodes
    p = get_benchmark("two_phase_flat")
    g = make_grid(1.0, 16)
    X, Y = g.mesh
    u1 = np.maximum(X - 0.5, 0) ** 2
    u2 = np.maximum(0.5 - X, 0) ** 2
    assert np.all(u1 * u2 == 0)
    ring = g.boundary_mask
    phi = p.boundary.values(g)
    assert np.array_equal(phi[0][ring], u1[ring]) and np.array_equal(phi[1][ring], u2[ring])
    assert np.all(np.minimum(phi[0], phi[1]) == 0)
    assert validate_problem(p, 16).ok


def test_overlapping_boundary_flagged():
    def edge(x, y):
        return np.where(np.asarray(y) == 0.0, 1.0, 0.0)

    p = ProblemSpec([DynamicsSpec.zero()] * 2, BoundarySpec([edge, edge]))
    report = validate_problem(p, probe_N=8)
    assert not report.ok
    assert report.pairs == [(1, 2)]


def test_negative_source_flagged():
    p = ProblemSpec([DynamicsSpec.spatial(lambda x, y: x - 0.5)], BoundarySpec([zero_trace]))
    assert not validate_problem(p, 8).ok


def test_inconsistent_exact_rejected_at_construction():
    with pytest.raises(ValueError, match="inconsistent exact"):
        ProblemSpec(
            [DynamicsSpec.constant(4.0)],
            BoundarySpec([zero_trace]),
            exact=[lambda x, y: 1 + x**2 + y**2],
        )


def test_get_benchmark_examples():
    p = get_benchmark("all_zero", m=3)
    assert p.m == 3
    assert not exact_state(p, make_grid(1.0, 8)).values.any()
    tp = get_benchmark("two_phase_flat")
    assert tp.exact[0](0.75, 0.3) == 0.0625
    assert tp.exact[1](0.75, 0.3) == 0.0
    par = get_benchmark("paraboloid")
    g = make_grid(1.0, 8)
    X, Y = g.mesh
    assert np.all(par.exact_laplacian[0](X, Y) == 4.0)
    assert np.all(par.dynamics[0].nodal_source(g) == 4.0)
    assert np.all(par.exact[0](X, Y) > 0)
    with pytest.raises(KeyError, match="no such benchmark"):
        get_benchmark("nope")
    with pytest.raises(ValueError):
        get_benchmark("paraboloid", m=3)


@pytest.mark.parametrize("name", ["two_phase_flat", "paraboloid", "all_zero"])
def test_exact_is_discrete_fixed_point_n8(name):
    # substitution oracle: exact nodal values satisfy every scheme equation
    p = get_benchmark(name)
    state = exact_state(p, make_grid(1.0, 8))
    assert scheme_residual(state, p) <= 1e-13


def test_exp_smooth_truncation_is_stencil_error():
    p = get_benchmark("exp_smooth")
    g = make_grid(1.0, 16)
    X, Y = g.mesh
    lap = lh_interior(g, p.exact[0](X, Y)) - p.exact_laplacian[0](X, Y)[1:-1, 1:-1]
    h = g.h
    closed = np.exp(X + Y)[1:-1, 1:-1] * (4 * (math.cosh(h) - 1) / h**2 - 2)
    assert np.allclose(lap, closed, rtol=1e-6, atol=1e-12)


def test_three_sector_traces_disjoint_and_shaped():
    p = get_benchmark("three_sector")
    for N in (8, 16, 64, 256):
        g = make_grid(1.0, N)
        phi = p.boundary.values(g)
        assert ((phi > 0).sum(axis=0) <= 1).all()
        assert (phi >= 0).all()
    # on the ray theta = 0 (component 3's axis) the trace is r^{3/2}
    assert p.boundary.traces[2](1.0, 0.5) == pytest.approx(0.5**1.5)
    assert p.boundary.traces[0](1.0, 0.5) == 0.0


def test_nodal_table_csv(tmp_path):
    g = make_grid(1.0, 4)
    X, Y = g.mesh
    f = tmp_path / "src.csv"
    f.write_text("i,j,value\n" + "".join(f"{i},{j},{X[j, i] + 2 * Y[j, i]}\n" for j in range(5) for i in range(5)))
    table = load_nodal_table(f, 1.0)
    assert table.N == 4
    assert table(0.25, 0.5) == pytest.approx(1.25)
    # coarser meshes whose nodes coincide can use the table
    assert np.allclose(table(*make_grid(1.0, 2).mesh), (X + 2 * Y)[::2, ::2])
    with pytest.raises(ValueError, match="resolution mismatch"):
        table(*make_grid(1.0, 3).mesh)


def test_boundary_table_csv(tmp_path):
    N = 4
    rows = ["side,k,value"]
    for k in range(N + 1):
        rows.append(f"S,{k},{k}")
        rows.append(f"N,{k},0")
    for k in range(N + 1):
        rows.append(f"W,{k},0")
        rows.append(f"E,{k},{N if k == 0 else 0}")
    f = tmp_path / "b.csv"
    f.write_text("\n".join(rows) + "\n")
    t = load_boundary_table(f, 1.0)
    g = make_grid(1.0, N)
    vals = BoundarySpec([t]).values(g)[0]
    assert vals[0].tolist() == [0, 1, 2, 3, 4]
    assert vals[1:].sum() == 0


def test_boundary_table_corner_conflict(tmp_path):
    f = tmp_path / "b.csv"
    body = ["side,k,value"] + [f"{s},{k},0" for s in "SENW" for k in range(3)]
    body[1] = "S,0,1"
    f.write_text("\n".join(body) + "\n")
    with pytest.raises(ValueError, match="corner"):
        load_boundary_table(f, 1.0)
