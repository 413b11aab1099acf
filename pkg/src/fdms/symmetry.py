"""Abelian vector-group symmetries, connections and the quotient chart.

The group is R^m with addition, so group elements and Lie algebra
elements are both float arrays of length m and exp is the identity.
Connection partials are m x n matrices; horizontal lifts at q are
assembled into an n x (n - m) matrix by lifting the shape basis.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NoSection, NonConvergence
from .numdiff import jacobian

GENERATOR_STEP = 1e-6


@dataclass(frozen=True)
class GroupAction:
    act: Callable
    group_dim: int
    generator_fn: Optional[Callable] = None
    # affine in q: pushforward is an exact difference, no step needed
    affine: bool = False

    def __call__(self, g, q):
        return np.asarray(self.act(np.atleast_1d(np.asarray(g, float)), np.asarray(q, float)), float)

    def generator(self, xi, q):
        xi = np.atleast_1d(np.asarray(xi, float))
        if self.generator_fn is not None:
            return np.asarray(self.generator_fn(xi, q), float)
        t = GENERATOR_STEP
        return (self(t * xi, q) - self(-t * xi, q)) / (2.0 * t)

    def pushforward(self, g, q, dq):
        """Tangent map of q -> g.q applied to dq."""
        q = np.asarray(q, float)
        dq = np.asarray(dq, float)
        if self.affine:
            return self(g, q + dq) - self(g, q)
        t = GENERATOR_STEP
        return (self(g, q + t * dq) - self(g, q - t * dq)) / (2.0 * t)


@dataclass(frozen=True)
class PrincipalConnection:
    form: Callable
    horizontal_lift: Callable


@dataclass(frozen=True)
class DiscreteConnection:
    hol: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    level: Optional[Callable] = None
    fd_step: float = 1e-6

    def __call__(self, q0, q1):
        return np.atleast_1d(np.asarray(self.hol(np.asarray(q0, float), np.asarray(q1, float)), float))

    def partials(self, q0, q1):
        q0 = np.asarray(q0, float)
        q1 = np.asarray(q1, float)
        D1 = self.d1(q0, q1) if self.d1 is not None else jacobian(lambda x: self(x, q1), q0, self.fd_step)
        D2 = self.d2(q0, q1) if self.d2 is not None else jacobian(lambda x: self(q0, x), q1, self.fd_step)
        return np.atleast_2d(np.asarray(D1, float)), np.atleast_2d(np.asarray(D2, float))

    def level_of(self, q, group_dim):
        if self.level is None:
            return np.zeros(group_dim)
        return np.atleast_1d(np.asarray(self.level(q), float))


@dataclass(frozen=True)
class QuotientChart:
    project: Callable
    section: Callable
    shape_dim: int
    project_jacobian: Optional[Callable] = None

    def pi(self, q):
        return np.atleast_1d(np.asarray(self.project(np.asarray(q, float)), float)).reshape(self.shape_dim)

    def dpi(self, q):
        """Tangent of the projection at q, a (n - m) x n matrix."""
        q = np.asarray(q, float)
        if self.project_jacobian is not None:
            return np.asarray(self.project_jacobian(q), float).reshape(self.shape_dim, q.size)
        if self.shape_dim == 0:
            return np.zeros((0, q.size))
        return jacobian(self.pi, q)

    def s(self, tau):
        tau = np.asarray(tau, float).reshape(self.shape_dim)
        try:
            q = np.asarray(self.section(tau), float)
        except (ValueError, ArithmeticError) as exc:
            raise NoSection(f"no section point over {tau}: {exc}") from exc
        if not np.all(np.isfinite(q)):
            raise NoSection(f"no section point over {tau}")
        return q


def _default_sampler(dim):
    return lambda rng: rng.uniform(-1.0, 1.0, dim)


@dataclass(frozen=True)
class SymmetrySetup:
    dim: int
    action: GroupAction
    principal: PrincipalConnection
    discrete: DiscreteConnection
    quotient: QuotientChart
    # optional analytic tangent of F1: (q0, w0, tau1) -> (dF/dq0, dF/dw0, dF/dtau1)
    f1_tangent: Optional[Callable] = None
    sampler: Optional[Callable] = None

    @property
    def group_dim(self):
        return self.action.group_dim

    @property
    def shape_dim(self):
        return self.quotient.shape_dim

    def sample_point(self, rng):
        sampler = self.sampler or _default_sampler(self.dim)
        return np.asarray(sampler(rng), float)

    def horizontal_matrix(self, q):
        cols = [np.asarray(self.principal.horizontal_lift(q, e), float)
                for e in np.eye(self.shape_dim)]
        if not cols:
            return np.zeros((self.dim, 0))
        return np.column_stack(cols)


def upsilon(setup, q0, q1):
    """Invariant coordinates (tau0, w, tau1) of the pair (q0, q1)."""
    return setup.quotient.pi(q0), setup.discrete(q0, q1), setup.quotient.pi(q1)


def _solve_group(residual, g0, tol=1e-13, max_iters=20):
    # residual is affine in g for equivariant connections; usually exits at once
    g = np.array(g0, float)
    r = residual(g)
    for _ in range(max_iters):
        if np.max(np.abs(r), initial=0.0) <= tol * (1.0 + np.max(np.abs(g), initial=0.0)):
            return g
        J = jacobian(residual, g)
        g = g - np.linalg.solve(J, r)
        r = residual(g)
    if np.max(np.abs(r), initial=0.0) <= tol * (1.0 + np.max(np.abs(g), initial=0.0)):
        return g
    raise NonConvergence(max_iters, float(np.max(np.abs(r))))


def f1_leg(setup, q0, w0, tau1):
    """The point q1 over tau1 with hol(q0, q1) = w0."""
    w0 = np.atleast_1d(np.asarray(w0, float))
    s = setup.quotient.s(tau1)
    g0 = w0 - setup.discrete(q0, s)
    g = _solve_group(lambda g: setup.discrete(q0, setup.action(g, s)) - w0, g0)
    return setup.action(g, s)


def back_leg(setup, tau_prev, w_prev, q):
    """The point p over tau_prev with hol(p, q) = w_prev."""
    w_prev = np.atleast_1d(np.asarray(w_prev, float))
    s = setup.quotient.s(tau_prev)
    g0 = setup.discrete(s, q) - w_prev
    g = _solve_group(lambda g: setup.discrete(setup.action(g, s), q) - w_prev, g0)
    return setup.action(g, s)


def f1_tangent(setup, q0, w0, tau1, step=1e-6):
    """Partial tangent maps of F1 in its three slots."""
    if setup.f1_tangent is not None:
        A, B, C = setup.f1_tangent(np.asarray(q0, float), np.atleast_1d(np.asarray(w0, float)),
                                   np.atleast_1d(np.asarray(tau1, float)))
        return np.atleast_2d(A), np.atleast_2d(B).reshape(setup.dim, setup.group_dim), \
            np.asarray(C, float).reshape(setup.dim, setup.shape_dim)
    q0 = np.asarray(q0, float)
    w0 = np.atleast_1d(np.asarray(w0, float))
    tau1 = np.asarray(tau1, float).reshape(setup.shape_dim)
    A = jacobian(lambda x: f1_leg(setup, x, w0, tau1), q0, step)
    B = jacobian(lambda x: f1_leg(setup, q0, x, tau1), w0, step)
    C = jacobian(lambda x: f1_leg(setup, q0, w0, x), tau1, step).reshape(setup.dim, setup.shape_dim)
    return A, B, C


def induced_connection(setup, q0, q1, dq0, dq1):
    """Average of the principal connection on both tangent legs."""
    a0 = np.atleast_1d(np.asarray(setup.principal.form(q0, dq0), float))
    a1 = np.atleast_1d(np.asarray(setup.principal.form(q1, dq1), float))
    return 0.5 * (a0 + a1)


def _random_group(rng, m, scale=1.0):
    return rng.uniform(-scale, scale, m)


def audit_invariance(L, setup, samples=100, rng=None):
    """Max |L_d(g q0, g q1) - L_d(q0, q1)| over random probes."""
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(samples):
        q0, q1 = setup.sample_point(rng), setup.sample_point(rng)
        g = _random_group(rng, setup.group_dim)
        worst = max(worst, abs(L(setup.action(g, q0), setup.action(g, q1)) - L(q0, q1)))
    return worst


def audit_force_equivariance(force, setup, samples=100, rng=None):
    """Max violation of f_d(g q0, g q1)(Tg dq0, Tg dq1) = f_d(q0, q1)(dq0, dq1)."""
    rng = np.random.default_rng(rng)
    worst = 0.0
    act = setup.action
    for _ in range(samples):
        q0, q1 = setup.sample_point(rng), setup.sample_point(rng)
        dq0, dq1 = rng.standard_normal((2, setup.dim))
        g = _random_group(rng, setup.group_dim)
        moved = force(act(g, q0), act(g, q1), act.pushforward(g, q0, dq0), act.pushforward(g, q1, dq1))
        worst = max(worst, abs(moved - force(q0, q1, dq0, dq1)))
    return worst


def audit_connections(setup, samples=100, rng=None):
    """Max violation of every action, connection and chart axiom on random probes."""
    rng = np.random.default_rng(rng)
    m, k = setup.group_dim, setup.shape_dim
    act, chart, conn = setup.action, setup.quotient, setup.discrete
    out = dict.fromkeys((
        "action_identity", "action_composition", "action_free",
        "form_on_generator", "form_on_horizontal", "horizontal_projects",
        "discrete_equivariance", "discrete_level", "section_projects", "projection_invariant",
    ), 0.0)

    def bump(key, value):
        out[key] = max(out[key], float(value))

    for _ in range(samples):
        q, q1 = setup.sample_point(rng), setup.sample_point(rng)
        g, g1 = _random_group(rng, m), _random_group(rng, m)
        xi = rng.standard_normal(m)
        u = rng.standard_normal(k)
        bump("action_identity", np.max(np.abs(act(np.zeros(m), q) - q)))
        bump("action_composition", np.max(np.abs(act(g + g1, q) - act(g, act(g1, q)))))
        # free action: a non-trivial g must move q
        bump("action_free", 0.0 if np.max(np.abs(act(g, q) - q)) > 0 else 1.0)
        bump("form_on_generator", np.max(np.abs(np.atleast_1d(setup.principal.form(q, act.generator(xi, q))) - xi)))
        hl = np.asarray(setup.principal.horizontal_lift(q, u), float)
        bump("form_on_horizontal", np.max(np.abs(setup.principal.form(q, hl)), initial=0.0))
        dpi = chart.dpi(q) @ hl
        bump("horizontal_projects", np.max(np.abs(dpi - u), initial=0.0))
        lhs = conn(act(g, q), act(g1, q1))
        bump("discrete_equivariance", np.max(np.abs(lhs - (g1 + conn(q, q1) - g))))
        lev = conn.level_of(q, m)
        bump("discrete_level", np.max(np.abs(conn(q, act(lev, q)))))
        tau = chart.pi(q)
        bump("section_projects", np.max(np.abs(chart.pi(chart.s(tau)) - tau), initial=0.0))
        bump("projection_invariant", np.max(np.abs(chart.pi(act(g, q)) - tau), initial=0.0))
    return out


def connection_partials_discrepancy(setup, samples=100, rng=None):
    """Relative gap between analytic hol partials and central differences."""
    conn = setup.discrete
    if conn.d1 is None or conn.d2 is None:
        raise ValueError("connection has no analytic partials")
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(samples):
        q0, q1 = setup.sample_point(rng), setup.sample_point(rng)
        A1, A2 = conn.partials(q0, q1)
        N1 = jacobian(lambda x: conn(x, q1), q0, conn.fd_step)
        N2 = jacobian(lambda x: conn(q0, x), q1, conn.fd_step)
        worst = max(worst, float(np.max(np.abs(A1 - N1) / (1 + np.abs(A1)))),
                    float(np.max(np.abs(A2 - N2) / (1 + np.abs(A2)))))
    return worst
