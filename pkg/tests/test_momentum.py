import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdms.library import build, rotation_action
from fdms.momentum import (drift_report, exterior_derivative_on_generator, j_minus, j_plus,
                           lagrangian_on_generator, lie_derivative_residual, momentum_gap_identity,
                           noether_residual)
from fdms.solver import trajectory
from fdms.symmetry import GroupAction

from conftest import free_particle

DISK = build("disk")
SHIFT = GroupAction(lambda g, q: q + g, 1)


def _disk_values(q0, q1):
    p = DISK.params
    c = p["m"] * p["r"] ** 2 / (2 * p["h"])
    leg = -p["eta"] * p["m"] * p["g"] * p["r"] / p["h"]
    return c * (q1 - q0) + leg, c * (q1 - q0) - leg


def test_disk_momenta_by_direct_evaluation():
    jp, jm = _disk_values(0.0, 0.1)
    assert j_plus(DISK.system, DISK.action, [1.0], [0.0], [0.1]) == pytest.approx(jp, abs=1e-12)
    assert j_minus(DISK.system, DISK.action, [1.0], [0.0], [0.1]) == pytest.approx(jm, abs=1e-12)
    assert jp == pytest.approx(-9.3) and jm == pytest.approx(10.3)


def test_zero_xi_gives_zero_momentum():
    assert j_plus(DISK.system, DISK.action, [0.0], [0.0], [0.1]) == 0.0
    assert j_minus(DISK.system, DISK.action, [0.0], [0.0], [0.1]) == 0.0


def test_free_particle_momenta():
    sys = free_particle()
    assert j_plus(sys, SHIFT, [1.0], [0.0], [1.0]) == pytest.approx(1.0, abs=1e-9)
    assert j_minus(sys, SHIFT, [1.0], [0.0], [1.0]) == pytest.approx(1.0, abs=1e-9)


def test_disk_noether_residual():
    assert noether_residual(DISK.system, DISK.action, [1.0], [0.0], [0.1]) == pytest.approx(-19.6)


def test_zero_force_noether_residual_vanishes():
    sys = build("rayleigh-polar", k=0.0).system
    assert noether_residual(sys, build("rayleigh-polar").action, [1.0],
                            [1.0, 0.2], [1.1, 0.4]) == 0.0


def test_rotation_invariant_force_symmetric_points():
    # the Cartesian friction is rotation invariant but its work on the generator vanishes only when
    # the displacement is orthogonal to the rotation field, e.g. for a radial step
    b = build("rayleigh-cart")
    act = rotation_action()
    q0, q1 = np.array([0.5, 0.0]), np.array([0.7, 0.0])
    assert noether_residual(b.system, act, [1.0], q0, q1) == pytest.approx(0.0, abs=1e-15)


def test_disk_drift_report():
    curve = trajectory(DISK.system, [0.0], [0.1], 50)
    rep = drift_report(DISK.system, DISK.action, [1.0], curve)
    np.testing.assert_allclose(rep.drift_increments, -19.6, atol=1e-9)
    np.testing.assert_allclose(rep.drift_increments_minus, -19.6, atol=1e-9)
    assert np.max(np.abs(rep.transfer_residual)) <= 1e-9
    assert rep.constant_drift
    assert rep.mu_estimate == pytest.approx(-19.6, abs=1e-9)
    assert not rep.well_defined


def test_noether_conservation_polar():
    b = build("rayleigh-polar", k=0.0)
    curve = trajectory(b.system, [1.1, 0.0], [1.1005, 0.012], 100)
    rep = drift_report(b.system, b.action, [1.0], curve)
    assert rep.well_defined
    assert np.max(np.abs(rep.j_plus - rep.j_plus[0])) <= 1e-8
    np.testing.assert_allclose(rep.drift_increments, 0.0, atol=1e-9)


def test_noether_conservation_cartesian_rotation():
    b = build("rayleigh-cart", k=0.0)
    curve = trajectory(b.system, [0.8, 0.1], [0.8, 0.12], 100)
    rep = drift_report(b.system, b.action, [1.0], curve)
    assert np.max(np.abs(rep.drift_increments)) <= 1e-9
    assert rep.well_defined


def test_polar_friction_drift_tracks_noether_residual():
    b = build("rayleigh-polar", k=0.5)
    curve = trajectory(b.system, [1.0, 0.0], [1.002, 0.01], 100)
    rep = drift_report(b.system, b.action, [1.0], curve)
    # increments of J+ equal the residual at the later pair, those of J- at the earlier pair
    np.testing.assert_allclose(rep.drift_increments, rep.noether_residual[1:], atol=1e-9)
    np.testing.assert_allclose(rep.drift_increments_minus, rep.noether_residual[:-1], atol=1e-9)
    assert not rep.constant_drift


def test_gap_identity_pointwise(rng):
    for name in ("rayleigh-polar", "disk", "rayleigh-cart"):
        b = build(name)
        for _ in range(10):
            q0, q1 = rng.uniform(0.5, 1.5, (2, b.system.dim))
            assert abs(momentum_gap_identity(b.system, b.action, [1.0], q0, q1)) <= 1e-8


def test_invariant_lagrangian_is_flat_on_generator(rng):
    b = build("rayleigh-polar")
    for _ in range(10):
        q0, q1 = rng.uniform(0.5, 1.5, (2, 2))
        assert abs(lagrangian_on_generator(b.system, b.action, [1.0], q0, q1)) <= 1e-9


def test_equivariant_force_has_zero_lie_derivative(rng):
    b = build("rayleigh-polar")
    for _ in range(5):
        q0, q1 = rng.uniform(0.5, 1.5, (2, 2))
        dq0, dq1 = rng.standard_normal((2, 2))
        assert abs(lie_derivative_residual(b.system, b.action, [1.0], q0, q1, dq0, dq1)) <= 1e-5


def test_disk_force_is_closed_and_polar_is_not(rng):
    d = DISK
    q0, q1 = np.array([0.2]), np.array([0.5])
    assert abs(exterior_derivative_on_generator(d.system, d.action, [1.0], q0, q1, np.ones(1), -np.ones(1))) <= 1e-9
    b = build("rayleigh-polar")
    q0, q1 = np.array([1.0, 0.0]), np.array([1.002, 0.01])
    val = exterior_derivative_on_generator(b.system, b.action, [1.0], q0, q1, np.array([1.0, 0.0]), np.zeros(2))
    assert abs(val) > 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.floats(-0.5, 0.5), st.floats(-2, 2))
def test_disk_increment_independent_of_seed_and_xi(theta0, dtheta, xi):
    curve = trajectory(DISK.system, [theta0], [theta0 + dtheta], 6)
    rep = drift_report(DISK.system, DISK.action, [xi], curve)
    np.testing.assert_allclose(rep.drift_increments, -19.6 * xi, atol=1e-9 * (1 + abs(xi)))
