import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdms.errors import DimensionError, EvaluationError
from fdms.library import build, rayleigh_cartesian, rayleigh_cartesian_closed_form, rayleigh_continuous
from fdms.systems import (ContinuousForcedSystem, DiscreteForce, DiscreteLagrangian, as_point,
                          d1_lagrangian, d2_lagrangian, discretize_midpoint, midpoint_inverse,
                          midpoint_map, pairing, partials_discrepancy, roundtrip_check)

from conftest import free_particle


@pytest.mark.parametrize("alpha, v, expected", [
    ((1, 2), (3, 4), 11.0),
    ((0, 0), (5, -5), 0.0),
    ((1, 0), (0, 1), 0.0),
])
def test_pairing(alpha, v, expected):
    assert pairing(np.array(alpha), np.array(v)) == expected


def test_pairing_dimension_mismatch():
    with pytest.raises(DimensionError):
        pairing(np.ones(2), np.ones(3))


def test_as_point_rejects_wrong_dimension_and_nan():
    with pytest.raises(DimensionError):
        as_point([1.0, 2.0], 3)
    with pytest.raises(EvaluationError):
        as_point([np.nan], 1)


def test_free_particle_partials():
    sys = free_particle(h=1.0)
    q0, q1 = np.array([0.0]), np.array([1.0])
    assert d1_lagrangian(sys.lagrangian, q0, q1) == pytest.approx([-1.0], abs=1e-9)
    assert d2_lagrangian(sys.lagrangian, q0, q1) == pytest.approx([1.0], abs=1e-9)


def test_constant_lagrangian_has_zero_partials():
    L = DiscreteLagrangian(lambda q0, q1: 3.0)
    q = np.array([0.3, -1.0])
    assert np.all(d1_lagrangian(L, q, q) == 0.0)
    assert np.all(d2_lagrangian(L, q, q) == 0.0)


def test_disk_partials():
    L = build("disk").system.lagrangian
    q0, q1 = np.array([0.0]), np.array([0.1])
    assert d1_lagrangian(L, q0, q1) == pytest.approx([-0.5], abs=1e-12)
    assert d2_lagrangian(L, q0, q1) == pytest.approx([0.5], abs=1e-12)


def test_nonfinite_lagrangian_raises():
    L = DiscreteLagrangian(lambda q0, q1: np.inf if q0[0] < 0 else 0.0)
    with pytest.raises(EvaluationError):
        d1_lagrangian(L, np.array([-1.0]), np.array([1.0]))


def test_midpoint_map_example():
    q0, q1 = midpoint_map(np.array([1.0, 0.0]), np.array([0.0, 2.0]), 0.1)
    np.testing.assert_allclose(q0, [1.0, -0.1])
    np.testing.assert_allclose(q1, [1.0, 0.1])


def test_midpoint_inverse_examples():
    q, v = midpoint_inverse(np.array([0.0]), np.array([1.0]), 1.0)
    assert (q[0], v[0]) == (0.5, 1.0)
    a, b = midpoint_map(np.zeros(2), np.zeros(2), 0.1)
    assert np.all(a == 0) and np.all(b == 0)


@pytest.mark.parametrize("h", [1e-3, 0.1, 1.0])
def test_roundtrip(h):
    assert roundtrip_check(h, samples=100, rng=1) <= 1e-12


def test_discretize_rejects_nonpositive_step():
    with pytest.raises(ValueError):
        discretize_midpoint(rayleigh_continuous(1.0), 0.0)


def test_rayleigh_force_matches_closed_form(rng):
    k, h = 1.0, 0.37
    sys = discretize_midpoint(rayleigh_continuous(k), h)
    _, f_cf = rayleigh_cartesian_closed_form(k, h)
    for _ in range(20):
        x0, y0, x1, y1 = rng.uniform(-2, 2, 4)
        q0, q1 = np.array([x0, y0]), np.array([x1, y1])
        got = np.concatenate([sys.force.minus(q0, q1), sys.force.plus(q0, q1)])
        np.testing.assert_allclose(got, f_cf(x0, y0, x1, y1), atol=1e-14)


def test_zero_continuous_force_gives_zero_discrete_force():
    cs = ContinuousForcedSystem(2, lambda q, v: 0.5 * float(v @ v), lambda q, v: np.zeros(2))
    sys = discretize_midpoint(cs, 0.1)
    q0, q1 = np.array([0.1, 0.2]), np.array([0.3, -0.4])
    assert sys.force(q0, q1, np.ones(2), np.ones(2)) == 0.0


def test_force_pairing_sums_legs():
    f = DiscreteForce(lambda q0, q1: np.array([1.0, 2.0]), lambda q0, q1: np.array([3.0, 4.0]))
    q = np.zeros(2)
    assert f(q, q, np.array([1.0, 1.0]), np.array([0.0, 1.0])) == 7.0


def test_from_one_form_splits_legs():
    f = DiscreteForce.from_one_form(lambda q0, q1: np.array([1.0, 2.0, 3.0, 4.0]), 2)
    q = np.zeros(2)
    np.testing.assert_array_equal(f.minus(q, q), [1.0, 2.0])
    np.testing.assert_array_equal(f.plus(q, q), [3.0, 4.0])


def test_analytic_partials_agree_with_differences(rng):
    for name in ("rayleigh-cart", "rayleigh-polar", "disk"):
        sys = build(name).system
        probes = [(rng.uniform(0.5, 1.5, sys.dim), rng.uniform(0.5, 1.5, sys.dim)) for _ in range(20)]
        assert partials_discrepancy(sys.lagrangian, probes) <= 1e-5


coord = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coord, min_size=4, max_size=4), st.floats(1e-3, 1.0))
def test_midpoint_lagrangian_matches_closed_form(xs, h):
    x0, y0, x1, y1 = xs
    L_cf, _ = rayleigh_cartesian_closed_form(0.5, h)
    sys = rayleigh_cartesian(0.5, h)
    got = sys.lagrangian(np.array([x0, y0]), np.array([x1, y1]))
    want = L_cf(x0, y0, x1, y1)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(coord, min_size=2, max_size=2), st.lists(coord, min_size=2, max_size=2), st.floats(1e-3, 1.0))
def test_midpoint_map_inverts(q, v, h):
    q, v = np.array(q), np.array(v)
    q2, v2 = midpoint_inverse(*midpoint_map(q, v, h), h)
    np.testing.assert_allclose(q2, q, atol=1e-12)
    np.testing.assert_allclose(v2, v, atol=1e-12 * (1 + 1 / h))
