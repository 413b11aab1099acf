import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdms.library import (build, polar_reduced_force, polar_reduced_lagrangian, polar_setup,
                          rayleigh_polar)
from fdms.reduction import (ReducedCurve, ReducedSystem, evaluate_fhat, fhat_components, phi_residual,
                            psi_residual, reduce_force, reduce_lagrangian, reduce_trajectory,
                            reduced_residual_norms, reduced_step, reduced_trajectory)
from fdms.solver import DiscreteCurve, del_residual, trajectory
from fdms.systems import DiscreteForce, DiscreteLagrangian, ForcedDiscreteSystem

from helpers_twisted import twisted_setup

K, H = 0.5, 0.01
POLAR = polar_setup()
RSYS = ReducedSystem(rayleigh_polar(K, H), POLAR)


@pytest.fixture(scope="module")
def polar_curve():
    return trajectory(RSYS.base, [1.0, 0.0], [1.002, 0.01], 100)


def test_reduce_trajectory_example():
    curve = DiscreteCurve(np.array([[1.0, 0.0], [1.1, 0.2], [1.15, 0.5]]))
    rc = reduce_trajectory(POLAR, curve)
    np.testing.assert_allclose(rc.tau0, [1.0])
    np.testing.assert_allclose(rc.taus[:, 0], [1.1, 1.15])
    np.testing.assert_allclose(rc.ws[:, 0], [0.2, 0.3], atol=1e-15)


def test_constant_curve_reduces_to_zero_holonomy():
    rc = reduce_trajectory(POLAR, DiscreteCurve(np.tile([0.9, 1.3], (5, 1))))
    assert np.all(rc.ws == 0.0)


def test_reduced_curve_validates_lengths():
    with pytest.raises(ValueError):
        ReducedCurve([1.0], np.zeros((3, 1)), np.zeros((2, 1)))


def test_zero_lagrangian_and_force_reduce_to_zero(rng):
    base = ForcedDiscreteSystem(2, DiscreteLagrangian(lambda a, b: 0.0), DiscreteForce.zero(2))
    rsys = reduce_lagrangian(base, POLAR)
    q0 = POLAR.sample_point(rng)
    assert rsys.check_lagrangian(q0, [0.3], [1.2]) == 0.0
    for part in rsys.lagrangian_partials(q0, [0.3], [1.2]):
        assert np.all(part == 0.0)
    for part in reduce_force(rsys, q0, [0.3], [1.2]):
        assert np.all(part == 0.0)


def test_reduced_partials_chain_rule_matches_differences(rng):
    for setup in (POLAR, twisted_setup()):
        rsys = ReducedSystem(RSYS.base, setup)
        for _ in range(10):
            q0 = setup.sample_point(rng)
            w, tau1 = rng.uniform(-0.05, 0.05, 1), rng.uniform(0.8, 1.2, 1)
            for a, n in zip(rsys.lagrangian_partials(q0, w, tau1), rsys.lagrangian_partials_fd(q0, w, tau1)):
                np.testing.assert_allclose(a, n, rtol=1e-5, atol=1e-4)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 1.5), st.floats(-1, 1), st.floats(0.5, 1.5))
def test_reduced_lagrangian_and_force_match_closed_forms(r0, g0, r1):
    s0 = POLAR.quotient.s([r0])
    assert RSYS.check_lagrangian(s0, [g0], [r1]) == pytest.approx(polar_reduced_lagrangian(r0, g0, r1, H), rel=1e-12)
    c_tau0, c_w, c_tau1, c_xi = fhat_components(RSYS, [r0], [g0], [r1])
    want = polar_reduced_force(r0, g0, r1, K, H)
    got = (c_tau0[0], c_tau1[0], c_xi[0])
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-9)
    assert abs(c_w[0]) <= 1e-9


def test_fhat_consistency_random_probes(rng):
    for _ in range(100):
        q0 = POLAR.sample_point(rng)
        q1 = POLAR.sample_point(rng)
        dq0, dq1 = rng.standard_normal((2, 2))
        reduced, direct = evaluate_fhat(RSYS, q0, q1, dq0, dq1)
        assert reduced == pytest.approx(direct, rel=1e-8, abs=1e-8)


def test_fhat_consistency_twisted_connection(rng):
    rsys = ReducedSystem(RSYS.base, twisted_setup())
    for _ in range(20):
        q0, q1 = rsys.setup.sample_point(rng), rsys.setup.sample_point(rng)
        dq0, dq1 = rng.standard_normal((2, 2))
        reduced, direct = evaluate_fhat(rsys, q0, q1, dq0, dq1)
        assert reduced == pytest.approx(direct, rel=1e-6, abs=1e-6)


def test_fhat_generator_probe_only_uses_lie_algebra_leg():
    q0, q1 = np.array([1.0, 0.4]), np.array([1.2, 0.9])
    g0, g1 = POLAR.action.generator([1.0], q0), POLAR.action.generator([1.0], q1)
    _, _, _, c_xi = fhat_components(RSYS, [1.0], [0.5], [1.2])
    reduced, direct = evaluate_fhat(RSYS, q0, q1, g0, g1)
    assert reduced == pytest.approx(c_xi[0], rel=1e-12)
    assert direct == pytest.approx(c_xi[0], rel=1e-12)


def test_fhat_zero_force_horizontal_probe():
    rsys = ReducedSystem(rayleigh_polar(0.0, H), POLAR)
    q0, q1 = np.array([1.0, 0.4]), np.array([1.2, 0.9])
    reduced, direct = evaluate_fhat(rsys, q0, q1, np.array([1.0, 0.0]), np.array([0.5, 0.0]))
    assert reduced == 0.0 and direct == 0.0


def _random_data(rng):
    tau_prev, tau_k, tau_next = rng.uniform(0.8, 1.2, (3, 1))
    w_prev, w_k = rng.uniform(-0.1, 0.1, (2, 1))
    return tau_prev, w_prev, tau_k, w_k, tau_next


@pytest.mark.parametrize("make_setup", [polar_setup, twisted_setup])
def test_residuals_match_del_pairings_off_trajectory(make_setup, rng):
    # on arbitrary data phi and psi are the DEL residual on horizontal and vertical directions
    rsys = ReducedSystem(RSYS.base, make_setup())
    for _ in range(10):
        data = _random_data(rng)
        q_prev, q_k, q_next = rsys.representatives(*data)
        D = del_residual(rsys.base, q_prev, q_k, q_next)
        phi = phi_residual(rsys, *data)
        psi = psi_residual(rsys, *data)
        assert np.max(np.abs(phi)) > 1.0
        np.testing.assert_allclose(phi, D @ rsys.setup.horizontal_matrix(q_k), rtol=1e-6)
        np.testing.assert_allclose(psi, [D @ rsys.setup.action.generator([1.0], q_k)], rtol=1e-6)


def test_phi_matches_variational_difference(rng):
    # d/de of L_d(q_prev, q_k + e h) + L_d(q_k + e h, q_next) plus the virtual work along h
    base = RSYS.base
    for _ in range(5):
        data = _random_data(rng)
        q_prev, q_k, q_next = RSYS.representatives(*data)
        h = POLAR.horizontal_matrix(q_k)[:, 0]

        def action(e):
            q = q_k + e * h
            return base.lagrangian(q_prev, q) + base.lagrangian(q, q_next)

        step = 1e-6
        d_action = (action(step) - action(-step)) / (2 * step)
        work = (base.force.plus(q_prev, q_k) + base.force.minus(q_k, q_next)) @ h
        assert phi_residual(RSYS, *data)[0] == pytest.approx(d_action + work, rel=1e-6)


def test_residuals_vanish_on_reduced_trajectory(polar_curve):
    norms = reduced_residual_norms(RSYS, reduce_trajectory(POLAR, polar_curve))
    assert norms.shape == (99, 2)
    assert np.max(norms) <= 1e-7


def test_twisted_residuals_vanish_on_reduced_trajectory(polar_curve):
    setup = twisted_setup()
    rsys = ReducedSystem(RSYS.base, setup)
    curve = DiscreteCurve(polar_curve.points[:20])
    assert np.max(reduced_residual_norms(rsys, reduce_trajectory(setup, curve))) <= 1e-7


def test_disk_phi_empty_and_psi_oracle():
    d = build("disk")
    rsys = ReducedSystem(d.system, d.setup)
    curve = trajectory(d.system, [0.0], [0.1], 10)
    rc = reduce_trajectory(d.setup, curve)
    e = np.zeros(0)
    assert phi_residual(rsys, e, rc.ws[0], e, rc.ws[1], e).size == 0
    assert np.max(reduced_residual_norms(rsys, rc)) <= 1e-9
    bumped = rc.ws[1] + 1e-3
    assert abs(psi_residual(rsys, e, rc.ws[0], e, bumped, e)[0]) > 1e-6


def test_disk_reduced_step_follows_recurrence():
    d = build("disk")
    rsys = ReducedSystem(d.system, d.setup)
    e = np.zeros(0)
    w, _ = reduced_step(rsys, e, [0.1], e)
    p = d.params
    assert w[0] == pytest.approx(0.1 - 4 * p["eta"] * p["g"] / p["r"], abs=1e-9)


def test_flat_free_system_keeps_constant_holonomy():
    rsys = ReducedSystem(rayleigh_polar(0.0, H), POLAR)
    # at the unit circle the radial force vanishes, so a pure rotation is a solution
    w = np.array([0.01])
    tau = np.array([1.0])
    psi = psi_residual(rsys, tau, w, tau, w, tau)
    assert abs(psi[0]) <= 1e-9


def test_reduced_trajectory_reconstructs_full(polar_curve):
    rc = reduce_trajectory(POLAR, polar_curve)
    stepped = reduced_trajectory(RSYS, rc.point(0), 100)
    np.testing.assert_allclose(stepped.taus, rc.taus, atol=1e-9)
    np.testing.assert_allclose(stepped.ws, rc.ws, atol=1e-9)


def test_reduced_trajectory_rejects_zero_steps(polar_curve):
    with pytest.raises(ValueError):
        reduced_trajectory(RSYS, reduce_trajectory(POLAR, polar_curve).point(0), 0)
