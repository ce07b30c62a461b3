import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segfd.dynamics import DynamicsSpec
from segfd.pointwise import PointUpdate, bisect_pointwise, closed_form, pointwise_tolerance, solve_pointwise

Z = (0.5, 0.5)


def residual(s, dyn, A, h, z=Z):
    f = float(dyn.source(*z)) + dyn.lam * s
    return abs(s - max(-f * h * h / 4 + A, 0.0))


def test_clamp_active():
    assert solve_pointwise(PointUpdate(-0.3, 0.25, DynamicsSpec.zero(), Z)) == 0.0


def test_constant_closed_form():
    assert solve_pointwise(PointUpdate(1.0, 0.25, DynamicsSpec.constant(4), Z)) == 0.9375


def test_affine_against_bisection():
    dyn = DynamicsSpec.affine(2.0, 1.0)
    pu = PointUpdate(1.0, 0.5, dyn, Z)
    # oracle: bracket search on the defining equation
    oracle = bisect_pointwise(lambda s: 2.0 + s, 1.0, 0.5)
    closed = solve_pointwise(pu)
    assert abs(closed - oracle) <= 1e-12
    assert closed == pytest.approx(0.875 / 1.0625, rel=1e-15)
    assert solve_pointwise(pu, method="bisect") == pytest.approx(closed, abs=1e-12)


def test_bisection_handles_nonlinear_monotone_f():
    f = lambda s: 1.0 + np.sqrt(s) + s**3  # noqa: E731
    s = bisect_pointwise(f, 2.0, 0.8)
    assert abs(s - max(-f(s) * 0.16 + 2.0, 0.0)) <= 2 * pointwise_tolerance(2.0)


def test_monotonicity_probe():
    with pytest.raises(ValueError, match="monotonicity violated"):
        bisect_pointwise(lambda s: 5.0 - s, 1.0, 0.5)


def test_bad_inputs():
    with pytest.raises(ValueError):
        PointUpdate(1.0, 0.0, DynamicsSpec.zero(), Z)
    with pytest.raises(ValueError):
        PointUpdate(float("nan"), 0.1, DynamicsSpec.zero(), Z)
    with pytest.raises(ValueError):
        solve_pointwise(PointUpdate(1.0, 0.1, DynamicsSpec.zero(), Z), method="newton")


def test_zero_drive_gives_positive_zero():
    s = closed_form(0.0, 0.0, 0.0, 0.1)
    assert s == 0.0 and np.copysign(1.0, s) == 1.0


DYN = st.one_of(
    st.just(DynamicsSpec.zero()),
    st.floats(0, 50).map(DynamicsSpec.constant),
    st.tuples(st.floats(0, 20), st.floats(0, 20)).map(lambda t: DynamicsSpec.affine(*t)),
)
A_VALS = st.floats(-10, 10, allow_nan=False)
H_VALS = st.floats(1e-3, 1.0)


@settings(max_examples=300, deadline=None)
@given(dyn=DYN, A=A_VALS, h=H_VALS)
def test_fixed_point_residual(dyn, A, h):
    s = solve_pointwise(PointUpdate(A, h, dyn, Z))
    assert s >= 0
    assert residual(s, dyn, A, h) <= 2 * pointwise_tolerance(A)
    sb = solve_pointwise(PointUpdate(A, h, dyn, Z), method="bisect")
    assert residual(sb, dyn, A, h) <= 2 * pointwise_tolerance(A)


@settings(max_examples=300, deadline=None)
@given(dyn=DYN, A1=A_VALS, A2=A_VALS, h=H_VALS)
def test_monotone_and_nonexpansive(dyn, A1, A2, h):
    s1 = solve_pointwise(PointUpdate(A1, h, dyn, Z))
    s2 = solve_pointwise(PointUpdate(A2, h, dyn, Z))
    if A1 <= A2:
        assert s1 <= s2
    assert abs(s1 - s2) <= abs(A1 - A2) * (1 + 1e-15)


@settings(max_examples=300, deadline=None)
@given(c=st.floats(0, 20), lam=st.floats(0, 20), A=A_VALS, h=H_VALS)
def test_affine_paths_agree(c, lam, A, h):
    pu = PointUpdate(A, h, DynamicsSpec.affine(c, lam), Z)
    assert abs(solve_pointwise(pu) - solve_pointwise(pu, method="bisect")) <= 1e-12
