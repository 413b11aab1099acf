"""Reduction of a symmetric forced discrete system to (conjugate bundle) x (shape space).

A pair (q0, q1) is represented on the reduced side by (tau0, w, tau1):
the shape points of both ends and the discrete holonomy w = hol(q0, q1).
For abelian groups w is already invariant, so (tau0, w) stands for the
conjugate-bundle class.

The pulled-back Lagrangian and force live on Q x G x Q/G through
F1: (q0, w0, tau1) -> q1.  Residuals are evaluated on the section
representatives q_k = s(tau_k).
"""

from dataclasses import dataclass

import numpy as np

from .numdiff import gradient
from .errors import NonConvergence, SingularJacobian
from .solver import StepConfig, newton_solve
from .symmetry import back_leg, f1_leg, f1_tangent, induced_connection
from .systems import d1_lagrangian, d2_lagrangian


@dataclass(frozen=True)
class ReducedPoint:
    tau0: np.ndarray
    w: np.ndarray
    tau1: np.ndarray


@dataclass(frozen=True)
class ReducedCurve:
    """tau0, then w_0..w_{N-1} and tau_1..tau_N as (N, m) and (N, n-m) arrays."""

    tau0: np.ndarray
    ws: np.ndarray
    taus: np.ndarray

    def __post_init__(self):
        ws = np.asarray(self.ws, float)
        taus = np.asarray(self.taus, float)
        if ws.ndim == 1:
            ws = ws[:, None]
        if taus.ndim == 1:
            taus = taus.reshape(ws.shape[0], -1)
        if ws.shape[0] != taus.shape[0]:
            raise ValueError(f"{ws.shape[0]} holonomies but {taus.shape[0]} shape points")
        object.__setattr__(self, "tau0", np.atleast_1d(np.asarray(self.tau0, float)).reshape(taus.shape[1]))
        object.__setattr__(self, "ws", ws)
        object.__setattr__(self, "taus", taus)

    def __len__(self):
        return self.ws.shape[0]

    def tau(self, k):
        return self.tau0 if k == 0 else self.taus[k - 1]

    def point(self, k):
        return ReducedPoint(self.tau(k), self.ws[k], self.taus[k])


class ReducedSystem:
    """Pulled-back Lagrangian and force of ``base`` through F1."""

    def __init__(self, base, setup):
        if base.dim != setup.dim:
            raise ValueError(f"system has dimension {base.dim}, setup {setup.dim}")
        self.base = base
        self.setup = setup

    def check_lagrangian(self, q0, w0, tau1):
        return self.base.lagrangian(q0, f1_leg(self.setup, q0, w0, tau1))

    def lagrangian_partials(self, q0, w0, tau1):
        """(D1, D2, D3) of the pulled-back Lagrangian, by the chain rule through F1."""
        q1 = f1_leg(self.setup, q0, w0, tau1)
        A, B, C = f1_tangent(self.setup, q0, w0, tau1)
        a1 = d1_lagrangian(self.base.lagrangian, q0, q1)
        a2 = d2_lagrangian(self.base.lagrangian, q0, q1)
        return a1 + a2 @ A, a2 @ B, a2 @ C

    def lagrangian_partials_fd(self, q0, w0, tau1, step=1e-6):
        q0 = np.asarray(q0, float)
        w0 = np.atleast_1d(np.asarray(w0, float))
        tau1 = np.atleast_1d(np.asarray(tau1, float))
        L = self.check_lagrangian
        return (gradient(lambda x: L(x, w0, tau1), q0, step),
                gradient(lambda x: L(q0, x, tau1), w0, step),
                gradient(lambda x: L(q0, w0, x), tau1, step))

    def check_force_components(self, q0, w0, tau1):
        """(f1, f2, f3): the pulled-back force split over the q0, w0 and tau1 slots."""
        q1 = f1_leg(self.setup, q0, w0, tau1)
        A, B, C = f1_tangent(self.setup, q0, w0, tau1)
        fm = np.asarray(self.base.force.minus(q0, q1), float)
        fp = np.asarray(self.base.force.plus(q0, q1), float)
        return fm + fp @ A, fp @ B, fp @ C

    def representatives(self, tau_prev, w_prev, tau_k, w_k, tau_next):
        q_k = self.setup.quotient.s(tau_k)
        q_prev = back_leg(self.setup, tau_prev, w_prev, q_k)
        q_next = f1_leg(self.setup, q_k, w_k, tau_next)
        return q_prev, q_k, q_next

    def _pieces(self, tau_prev, w_prev, tau_k, w_k, tau_next):
        q_prev, q_k, q_next = self.representatives(tau_prev, w_prev, tau_k, w_k, tau_next)
        before = (q_prev, np.atleast_1d(w_prev), tau_k)
        after = (q_k, np.atleast_1d(w_k), tau_next)
        L_b, L_a = self.lagrangian_partials(*before), self.lagrangian_partials(*after)
        f_b, f_a = self.check_force_components(*before), self.check_force_components(*after)
        D1A_a, _ = self.setup.discrete.partials(q_k, q_next)
        _, D2A_b = self.setup.discrete.partials(q_prev, q_k)
        return q_k, L_b, L_a, f_b, f_a, D1A_a, D2A_b


def reduce_lagrangian(base, setup):
    return ReducedSystem(base, setup)


def reduce_force(rsys, q0, w0, tau1):
    return rsys.check_force_components(q0, w0, tau1)


def phi_residual(rsys, tau_prev, w_prev, tau_k, w_k, tau_next):
    """Shape-space component of the reduced equations, a covector of length n - m."""
    setup = rsys.setup
    if setup.shape_dim == 0:
        return np.zeros(0)
    q_k, L_b, L_a, f_b, f_a, D1A_a, D2A_b = rsys._pieces(tau_prev, w_prev, tau_k, w_k, tau_next)
    H = setup.horizontal_matrix(q_k)
    lag = L_a[0] @ H + L_b[2] + L_a[1] @ D1A_a @ H + L_b[1] @ D2A_b @ H
    frc = f_a[0] @ H + f_b[2] + f_a[1] @ D1A_a @ H + f_b[1] @ D2A_b @ H
    return lag + frc


def psi_residual(rsys, tau_prev, w_prev, tau_k, w_k, tau_next):
    """Group-direction component, as coordinates of an element of the dual Lie algebra."""
    setup = rsys.setup
    q_k, L_b, L_a, f_b, f_a, D1A_a, D2A_b = rsys._pieces(tau_prev, w_prev, tau_k, w_k, tau_next)
    gens = np.column_stack([setup.action.generator(e, q_k) for e in np.eye(setup.group_dim)])
    # right translation by w^-1 is the identity in abelian chart coordinates
    lag = L_b[1] - L_a[1]
    frc = (f_a[0] + f_a[1] @ D1A_a + f_b[1] @ D2A_b) @ gens
    return lag + frc


def reduced_residual(rsys, tau_prev, w_prev, tau_k, w_k, tau_next):
    return np.concatenate([phi_residual(rsys, tau_prev, w_prev, tau_k, w_k, tau_next),
                           psi_residual(rsys, tau_prev, w_prev, tau_k, w_k, tau_next)])


def reduced_step(rsys, tau_prev, w_prev, tau_k, cfg=None):
    """Solve the reduced equations at index k for (w_k, tau_{k+1})."""
    cfg = cfg or StepConfig()
    m = rsys.setup.group_dim
    tau_prev = np.atleast_1d(np.asarray(tau_prev, float))
    tau_k = np.atleast_1d(np.asarray(tau_k, float))
    w_prev = np.atleast_1d(np.asarray(w_prev, float))

    def residual(x):
        return reduced_residual(rsys, tau_prev, w_prev, tau_k, x[:m], x[m:])

    x0 = np.concatenate([w_prev, 2.0 * tau_k - tau_prev])
    x = newton_solve(residual, x0, cfg)
    return x[:m], x[m:]


def reduce_trajectory(setup, curve):
    q = curve.points
    if len(q) < 2:
        raise ValueError("curve needs at least two points")
    pi, hol = setup.quotient.pi, setup.discrete
    return ReducedCurve(
        tau0=pi(q[0]),
        ws=np.array([hol(q[k], q[k + 1]) for k in range(len(q) - 1)]),
        taus=np.array([pi(q[k]) for k in range(1, len(q))]).reshape(len(q) - 1, setup.shape_dim),
    )


def reduced_trajectory(rsys, seed, N, cfg=None):
    """March the reduced equations from ``seed`` = (tau0, w0, tau1) for N steps."""
    if N < 1:
        raise ValueError("N must be at least 1")
    setup = rsys.setup
    ws = np.empty((N, setup.group_dim))
    taus = np.empty((N, setup.shape_dim))
    tau0 = np.atleast_1d(np.asarray(seed.tau0, float)).reshape(setup.shape_dim)
    ws[0] = seed.w
    taus[0] = np.asarray(seed.tau1, float).reshape(setup.shape_dim)
    for k in range(1, N):
        tau_prev = tau0 if k == 1 else taus[k - 2]
        try:
            ws[k], taus[k] = reduced_step(rsys, tau_prev, ws[k - 1], taus[k - 1], cfg)
        except (NonConvergence, SingularJacobian) as exc:
            raise exc.at(k) from exc
    return ReducedCurve(tau0, ws, taus)


def reduced_residual_norms(rsys, rcurve):
    """(phi, psi) infinity norms at every interior index of a reduced curve."""
    out = []
    for k in range(1, len(rcurve)):
        args = (rcurve.tau(k - 1), rcurve.ws[k - 1], rcurve.tau(k), rcurve.ws[k], rcurve.tau(k + 1))
        phi = phi_residual(rsys, *args)
        psi = psi_residual(rsys, *args)
        out.append((np.max(np.abs(phi), initial=0.0), np.max(np.abs(psi), initial=0.0)))
    return np.array(out).reshape(-1, 2)


def fhat_components(rsys, tau0, w0, tau1):
    """Coefficients of the reduced force on (dtau0, dw0, dtau1) and on the Lie algebra leg.

    Computed from the section representative over tau0 alone: a tangent
    (dtau0, dw0, dtau1) is lifted through the horizontal lift and F1,
    then made horizontal for the induced connection; the Lie algebra leg
    pairs the force with diagonal generators.
    """
    setup = rsys.setup
    m, k = setup.group_dim, setup.shape_dim
    q0 = setup.quotient.s(tau0)
    w0 = np.atleast_1d(np.asarray(w0, float))
    q1 = f1_leg(setup, q0, w0, tau1)
    A, B, C = f1_tangent(setup, q0, w0, tau1)
    f1, f2, f3 = rsys.check_force_components(q0, w0, tau1)
    H0 = setup.horizontal_matrix(q0)
    force = rsys.base.force

    c_xi = np.array([force(q0, q1, setup.action.generator(e, q0), setup.action.generator(e, q1))
                     for e in np.eye(m)])

    def value(dtau0, dw, dtau1):
        dq0 = H0 @ dtau0
        dq1 = A @ dq0 + B @ dw + C @ dtau1
        raw = f1 @ dq0 + f2 @ dw + f3 @ dtau1
        return raw - induced_connection(setup, q0, q1, dq0, dq1) @ c_xi

    zk, zm = np.zeros(k), np.zeros(m)
    c_tau0 = np.array([value(e, zm, zk) for e in np.eye(k)]).reshape(k)
    c_w = np.array([value(zk, e, zk) for e in np.eye(m)]).reshape(m)
    c_tau1 = np.array([value(zk, zm, e) for e in np.eye(k)]).reshape(k)
    return c_tau0, c_w, c_tau1, c_xi


def tangent_upsilon(setup, q0, q1, dq0, dq1):
    """(dtau0, dw, dtau1) = T Upsilon (dq0, dq1)."""
    D1A, D2A = setup.discrete.partials(q0, q1)
    P0, P1 = setup.quotient.dpi(q0), setup.quotient.dpi(q1)
    return P0 @ dq0, D1A @ dq0 + D2A @ dq1, P1 @ dq1


def evaluate_fhat(rsys, q0, q1, dq0, dq1):
    """(reduced-side value, direct value) of the force on a tangent probe at (q0, q1)."""
    setup = rsys.setup
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    dq0 = np.asarray(dq0, float)
    dq1 = np.asarray(dq1, float)
    tau0, w0, tau1 = setup.quotient.pi(q0), setup.discrete(q0, q1), setup.quotient.pi(q1)
    c_tau0, c_w, c_tau1, c_xi = fhat_components(rsys, tau0, w0, tau1)
    dtau0, dw, dtau1 = tangent_upsilon(setup, q0, q1, dq0, dq1)
    xi = induced_connection(setup, q0, q1, dq0, dq1)
    reduced = c_tau0 @ dtau0 + c_w @ dw + c_tau1 @ dtau1 + c_xi @ xi
    return float(reduced), float(rsys.base.force(q0, q1, dq0, dq1))
