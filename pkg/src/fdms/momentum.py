"""Forced discrete momentum maps and their drift along trajectories.

Along a solved trajectory the forced DEL equation at q_k reads
J-(q_k, q_{k+1}) = J+(q_{k-1}, q_k), and for an invariant L_d one has
J+ - J- = f_d(xi_QxQ) pointwise.  Hence the per-step increment of J+ is
the force on the diagonal generator at the later pair, and that of J-
is the same quantity at the earlier pair; when it is constant both maps
drift by the same constant.
"""

from dataclasses import dataclass

import numpy as np

from .systems import d1_lagrangian, d2_lagrangian, pairing


def _gen(action, xi, q):
    return action.generator(np.atleast_1d(np.asarray(xi, float)), np.asarray(q, float))


def j_plus(sys, action, xi, q0, q1):
    a = d2_lagrangian(sys.lagrangian, q0, q1) + np.asarray(sys.force.plus(q0, q1), float)
    return pairing(a, _gen(action, xi, q1))


def j_minus(sys, action, xi, q0, q1):
    a = -d1_lagrangian(sys.lagrangian, q0, q1) - np.asarray(sys.force.minus(q0, q1), float)
    return pairing(a, _gen(action, xi, q0))


def noether_residual(sys, action, xi, q0, q1):
    """f_d(q0, q1) on the diagonal generator (xi_Q(q0), xi_Q(q1))."""
    return sys.force(q0, q1, _gen(action, xi, q0), _gen(action, xi, q1))


def lagrangian_on_generator(sys, action, xi, q0, q1):
    L = sys.lagrangian
    return pairing(d1_lagrangian(L, q0, q1), _gen(action, xi, q0)) + \
        pairing(d2_lagrangian(L, q0, q1), _gen(action, xi, q1))


def momentum_gap_identity(sys, action, xi, q0, q1):
    """J+ - J- - (dL_d + f_d)(xi_QxQ); zero for every pair."""
    return (j_plus(sys, action, xi, q0, q1) - j_minus(sys, action, xi, q0, q1)
            - lagrangian_on_generator(sys, action, xi, q0, q1)
            - noether_residual(sys, action, xi, q0, q1))


@dataclass(frozen=True)
class MomentumReport:
    xi: np.ndarray
    j_plus: np.ndarray
    j_minus: np.ndarray
    noether_residual: np.ndarray
    drift_increments: np.ndarray
    drift_increments_minus: np.ndarray
    transfer_residual: np.ndarray
    mu_estimate: float
    tolerance: float

    @property
    def drift_spread(self):
        inc = np.concatenate([self.drift_increments, self.drift_increments_minus])
        return float(np.max(np.abs(inc - self.mu_estimate), initial=0.0))

    @property
    def constant_drift(self):
        return self.drift_spread <= self.tolerance

    @property
    def well_defined(self):
        """J+ and J- agree at every step."""
        return float(np.max(np.abs(self.j_plus - self.j_minus), initial=0.0)) <= self.tolerance


def drift_report(sys, action, xi, curve, tolerance=1e-9):
    q = curve.points
    if len(q) < 2:
        raise ValueError("curve needs at least two points")
    pairs = [(q[k], q[k + 1]) for k in range(len(q) - 1)]
    jp = np.array([j_plus(sys, action, xi, a, b) for a, b in pairs])
    jm = np.array([j_minus(sys, action, xi, a, b) for a, b in pairs])
    nr = np.array([noether_residual(sys, action, xi, a, b) for a, b in pairs])
    inc_p = np.diff(jp)
    inc_m = np.diff(jm)
    mu = float(np.mean(inc_p)) if inc_p.size else 0.0
    return MomentumReport(
        xi=np.atleast_1d(np.asarray(xi, float)),
        j_plus=jp, j_minus=jm, noether_residual=nr,
        drift_increments=inc_p, drift_increments_minus=inc_m,
        transfer_residual=jm[1:] - jp[:-1],
        mu_estimate=mu, tolerance=tolerance,
    )


def lie_derivative_residual(sys, action, xi, q0, q1, dq0, dq1, t=1e-5):
    """Central difference in t of the force pulled back along the generator flow."""
    xi = np.atleast_1d(np.asarray(xi, float))

    def pulled(s):
        g = s * xi
        return sys.force(action(g, q0), action(g, q1),
                         action.pushforward(g, q0, dq0), action.pushforward(g, q1, dq1))

    return (pulled(t) - pulled(-t)) / (2.0 * t)


def exterior_derivative_on_generator(sys, action, xi, q0, q1, dq0, dq1, step=1e-5):
    """df_d(xi_QxQ, Y) with Y the constant field (dq0, dq1) in chart coordinates.

    df(X, Y) = X(f(Y)) - Y(f(X)) - f([X, Y]); for constant Y the bracket
    is -DX . Y.
    """
    n = sys.dim
    p = np.concatenate([q0, q1])
    Y = np.concatenate([dq0, dq1])
    xi = np.atleast_1d(np.asarray(xi, float))

    def X(z):
        return np.concatenate([action.generator(xi, z[:n]), action.generator(xi, z[n:])])

    def f_on(z, V):
        return sys.force(z[:n], z[n:], V[:n], V[n:])

    def along(fun, v):
        return (fun(p + step * v) - fun(p - step * v)) / (2.0 * step)

    Xp = X(p)
    term_x = along(lambda z: f_on(z, Y), Xp)
    term_y = along(lambda z: f_on(z, X(z)), Y)
    DX_Y = along(X, Y)
    return term_x - term_y + f_on(p, DX_Y)
