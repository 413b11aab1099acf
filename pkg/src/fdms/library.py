"""Shipped example systems and their symmetry data, registered by name.

* ``rayleigh-cart``: a particle in the plane with the radial potential
  |q|^2 (|q|^2 - 1)^2 and Rayleigh friction -k qdot, discretized by the
  midpoint rule.
* ``rayleigh-polar``: the same particle on the covering space R+ x R of
  the punctured plane in polar coordinates (r, eta), with R acting by
  eta-translation.
* ``disk``: a disk spinning on a rough table, covering space R, with a
  constant friction torque.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .symmetry import (DiscreteConnection, GroupAction, PrincipalConnection,
                       QuotientChart, SymmetrySetup)
from .systems import (ContinuousForcedSystem, DiscreteForce, DiscreteLagrangian,
                      ForcedDiscreteSystem, discretize_midpoint)


def _potential(s):
    # V as a function of s = |q|^2, with its first two s-derivatives
    return s * (s - 1.0) ** 2, (s - 1.0) * (3.0 * s - 1.0), 6.0 * s - 4.0


def rayleigh_continuous(k):
    def L(q, v):
        return 0.5 * float(v @ v) - _potential(float(q @ q))[0]

    def f(q, v):
        return -k * np.asarray(v, float)

    return ContinuousForcedSystem(2, L, f, label="rayleigh-cart")


def rayleigh_cartesian(k=0.5, h=0.01):
    sys = discretize_midpoint(rayleigh_continuous(k), h)

    def grad_V(q):
        return 2.0 * _potential(float(q @ q))[1] * q

    def hess_V(q):
        s = float(q @ q)
        _, dV, d2V = _potential(s)
        return 2.0 * dV * np.eye(2) + 4.0 * d2V * np.outer(q, q)

    def d1(q0, q1):
        return -(q1 - q0) / h - 0.5 * h * grad_V(0.5 * (q0 + q1))

    def d2(q0, q1):
        return (q1 - q0) / h - 0.5 * h * grad_V(0.5 * (q0 + q1))

    def del_jac(q_prev, q, q_next):
        return -np.eye(2) / h - 0.25 * h * hess_V(0.5 * (q + q_next)) - 0.5 * k * np.eye(2)

    return replace(sys, lagrangian=replace(sys.lagrangian, d1=d1, d2=d2),
                   del_jacobian=del_jac, label="rayleigh-cart")


def rayleigh_cartesian_closed_form(k, h):
    """The discrete Lagrangian and force of the Cartesian Rayleigh system in closed form.

    The potential factor is squared, as in the continuous Lagrangian.
    """

    def L_d(x0, y0, x1, y1):
        mx, my = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        s = mx ** 2 + my ** 2
        return 0.5 * h * (((x1 - x0) / h) ** 2 + ((y1 - y0) / h) ** 2) - h * s * (s - 1.0) ** 2

    def f_d(x0, y0, x1, y1):
        c = -0.5 * k
        return np.array([c * (x1 - x0), c * (y1 - y0), c * (x1 - x0), c * (y1 - y0)])

    return L_d, f_d


# --- polar covering system -------------------------------------------------

def _polar_parts(q0, q1, h):
    a, b = q0[0], q1[0]
    d = q1[1] - q0[1]
    R = 0.5 * (a + b)
    return a, b, d, R


def _W(R):
    return R * R * (R * R - 1.0) ** 2, 2.0 * R * (R * R - 1.0) * (3.0 * R * R - 1.0), \
        30.0 * R ** 4 - 24.0 * R ** 2 + 2.0


def polar_lagrangian_value(r0, eta0, r1, eta1, h):
    R = 0.5 * (r1 + r0)
    return 0.5 * h * ((r1 - r0) / h) ** 2 + 0.5 * h * R ** 2 * ((eta1 - eta0) / h) ** 2 \
        - R ** 2 * (R ** 2 - 1.0) ** 2


def polar_force_coefficients(r0, eta0, r1, eta1, k, h):
    """(c_r0, c_eta0, c_r1, c_eta1) of the polar friction force."""
    R = 0.5 * (r1 + r0)
    d = eta1 - eta0
    c_r0 = 0.5 * k * (-2.0 / h ** 2 * (r1 - r0) + R * (d / h) ** 2)
    c_eta0 = -k / h ** 2 * R ** 2 * d
    c_r1 = -0.5 * k * (2.0 / h ** 2 * (r1 - r0) + R * (d / h) ** 2)
    c_eta1 = -k / h ** 2 * R ** 2 * d
    return c_r0, c_eta0, c_r1, c_eta1


def rayleigh_polar(k=0.5, h=0.01):
    def L_d(q0, q1):
        return polar_lagrangian_value(q0[0], q0[1], q1[0], q1[1], h)

    def d1(q0, q1):
        a, b, d, R = _polar_parts(q0, q1, h)
        return np.array([-(b - a) / h + R * d * d / (2 * h) - 0.5 * _W(R)[1], -R * R * d / h])

    def d2(q0, q1):
        a, b, d, R = _polar_parts(q0, q1, h)
        return np.array([(b - a) / h + R * d * d / (2 * h) - 0.5 * _W(R)[1], R * R * d / h])

    def minus(q0, q1):
        c = polar_force_coefficients(q0[0], q0[1], q1[0], q1[1], k, h)
        return np.array([c[0], c[1]])

    def plus(q0, q1):
        c = polar_force_coefficients(q0[0], q0[1], q1[0], q1[1], k, h)
        return np.array([c[2], c[3]])

    def del_jac(q_prev, q, q_next):
        # d/dq_next of D1 L_d(q, q_next) + f-(q, q_next)
        a, b, d, R = _polar_parts(q, q_next, h)
        W2 = _W(R)[2]
        return np.array([
            [-1.0 / h + d * d / (4 * h) - 0.25 * W2 + 0.5 * k * (-2.0 / h ** 2 + d * d / (2 * h ** 2)),
             R * d / h + k * R * d / h ** 2],
            [-R * d / h - k * R * d / h ** 2,
             -R * R / h - k * R * R / h ** 2],
        ])

    return ForcedDiscreteSystem(
        dim=2,
        lagrangian=DiscreteLagrangian(L_d, d1, d2),
        force=DiscreteForce(minus, plus),
        label="rayleigh-polar",
        del_jacobian=del_jac,
    )


def polar_reduced_lagrangian(r0, g0, r1, h):
    """Closed form of the reduced Lagrangian in (r0, g0, r1)."""
    R = 0.5 * (r1 + r0)
    return 0.5 * h * ((r1 - r0) / h) ** 2 + 0.5 * h * R ** 2 * (g0 / h) ** 2 - R ** 2 * (R ** 2 - 1.0) ** 2


def polar_reduced_force(r0, g0, r1, k, h):
    """Coefficients of dr0, dr1 and the Lie algebra dual basis in the reduced force."""
    c_r0 = k / h ** 2 * ((r0 - r1) + (r0 + r1) / 4.0 * g0 ** 2)
    c_r1 = k / h ** 2 * ((r0 - r1) - (r0 + r1) / 4.0 * g0 ** 2)
    c_xi = -k / h ** 2 * (r0 + r1) ** 2 / 2.0 * g0
    return c_r0, c_r1, c_xi


def translation_setup(dim, shape_dim, sampler=None, analytic=True):
    """R^m acting by translation of the last m coordinates, m = dim - shape_dim.

    Shape coordinates are the first ``shape_dim`` coordinates; the
    discrete connection is the difference of the fiber coordinates.
    With ``analytic=False`` every derivative falls back to finite
    differences.
    """
    m = dim - shape_dim
    fiber = slice(shape_dim, dim)

    def act(g, q):
        out = np.array(q, float)
        out[fiber] += g
        return out

    def generator(xi, q):
        out = np.zeros(dim)
        out[fiber] = xi
        return out

    def form(q, dq):
        return np.asarray(dq, float)[fiber]

    def lift(q, u):
        out = np.zeros(dim)
        out[:shape_dim] = u
        return out

    def hol(q0, q1):
        return q1[fiber] - q0[fiber]

    D2 = np.zeros((m, dim))
    D2[:, fiber] = np.eye(m)

    def project(q):
        return np.asarray(q, float)[:shape_dim]

    def section(tau):
        out = np.zeros(dim)
        out[:shape_dim] = tau
        return out

    E_w = np.zeros((dim, m))
    E_w[fiber, :] = np.eye(m)
    E_tau = np.zeros((dim, shape_dim))
    E_tau[:shape_dim, :] = np.eye(shape_dim)
    P_fiber = np.zeros((dim, dim))
    P_fiber[fiber, fiber] = np.eye(m)

    def f1_tan(q0, w0, tau1):
        # F1(q0, w0, tau1) = (tau1, fiber(q0) + w0)
        return P_fiber, E_w, E_tau

    if not analytic:
        return SymmetrySetup(
            dim=dim,
            action=GroupAction(act, m),
            principal=PrincipalConnection(form, lift),
            discrete=DiscreteConnection(hol),
            quotient=QuotientChart(project, section, shape_dim),
            sampler=sampler,
        )
    return SymmetrySetup(
        dim=dim,
        action=GroupAction(act, m, generator, affine=True),
        principal=PrincipalConnection(form, lift),
        discrete=DiscreteConnection(hol, lambda q0, q1: -D2, lambda q0, q1: D2),
        quotient=QuotientChart(project, section, shape_dim, lambda q: E_tau.T),
        f1_tangent=f1_tan,
        sampler=sampler,
    )


def polar_setup(analytic=True):
    def sampler(rng):
        return np.array([rng.uniform(0.5, 1.5), rng.uniform(-np.pi, np.pi)])

    return translation_setup(2, 1, sampler, analytic)


def disk(m=1.0, r=1.0, eta=0.1, g=9.8, h=0.1):
    """Disk with friction torque; each force leg is -eta*m*g*r/h."""
    c = m * r * r / (2.0 * h)
    leg = -eta * m * g * r / h

    def L_d(q0, q1):
        return 0.5 * c * float((q1[0] - q0[0]) ** 2)

    return ForcedDiscreteSystem(
        dim=1,
        lagrangian=DiscreteLagrangian(L_d, lambda q0, q1: -c * (q1 - q0), lambda q0, q1: c * (q1 - q0)),
        force=DiscreteForce(lambda q0, q1: np.array([leg]), lambda q0, q1: np.array([leg])),
        label="disk",
        del_jacobian=lambda q_prev, q, q_next: np.array([[-c]]),
    )


def disk_setup(analytic=True):
    return translation_setup(1, 0, lambda rng: rng.uniform(-np.pi, np.pi, 1), analytic)


def rotation_action():
    """R acting on the plane by rotation (free away from the origin)."""

    def act(g, q):
        c, s = np.cos(g[0]), np.sin(g[0])
        return np.array([c * q[0] - s * q[1], s * q[0] + c * q[1]])

    def generator(xi, q):
        return xi[0] * np.array([-q[1], q[0]])

    return GroupAction(act, 1, generator, affine=True)


# --- registry --------------------------------------------------------------

@dataclass(frozen=True)
class Builtin:
    name: str
    system: ForcedDiscreteSystem
    action: GroupAction
    setup: Optional[SymmetrySetup]
    params: dict
    seeds: tuple = ()


@dataclass(frozen=True)
class Family:
    build: Callable
    defaults: dict
    dim: int
    group_dim: int
    seeds: tuple = field(default=())


def _build_cart(p):
    return rayleigh_cartesian(p["k"], p["h"]), rotation_action(), None


def _build_polar(p):
    setup = polar_setup()
    return rayleigh_polar(p["k"], p["h"]), setup.action, setup


def _build_disk(p):
    setup = disk_setup()
    return disk(p["m"], p["r"], p["eta"], p["g"], p["h"]), setup.action, setup


FAMILIES = {
    "rayleigh-cart": Family(_build_cart, {"k": 0.5, "h": 0.01}, 2, 1,
                            ((0.8, 0.1), (0.8, 0.12))),
    "rayleigh-polar": Family(_build_polar, {"k": 0.5, "h": 0.01}, 2, 1,
                             ((1.0, 0.0), (1.002, 0.01))),
    "disk": Family(_build_disk, {"m": 1.0, "r": 1.0, "eta": 0.1, "g": 9.8, "h": 0.1}, 1, 1,
                   ((0.0,), (0.1,))),
}


def build(name, **params):
    if name not in FAMILIES:
        raise KeyError(f"unknown system {name!r}; known: {', '.join(sorted(FAMILIES))}")
    fam = FAMILIES[name]
    unknown = set(params) - set(fam.defaults)
    if unknown:
        raise KeyError(f"unknown parameters for {name}: {', '.join(sorted(unknown))}")
    p = {**fam.defaults, **{k: float(v) for k, v in params.items()}}
    if not p["h"] > 0:
        raise ValueError("h must be positive")
    system, action, setup = fam.build(p)
    return Builtin(name, system, action, setup, p, fam.seeds)
