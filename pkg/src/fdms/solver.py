"""Forced discrete Euler-Lagrange residual and a Newton stepper."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, NonConvergence, SingularJacobian
from .numdiff import forward_jacobian
from .systems import as_point, d1_lagrangian, d2_lagrangian

log = logging.getLogger(__name__)

GUESS_POLICIES = ("linear_extrapolation", "previous_point", "user_supplied")

# reciprocal condition number below which a Newton Jacobian is treated as singular
_RCOND_FLOOR = 1e-14


@dataclass(frozen=True)
class StepConfig:
    newton_tol: float = 1e-12
    max_iters: int = 50
    jacobian_fd_step: float = 1e-7
    initial_guess_policy: str = "linear_extrapolation"

    def __post_init__(self):
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.initial_guess_policy not in GUESS_POLICIES:
            raise ValueError(f"unknown initial guess policy {self.initial_guess_policy!r}")


@dataclass(frozen=True)
class DiscreteCurve:
    points: np.ndarray
    step_label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, k):
        return self.points[k]

    @property
    def dim(self):
        return self.points.shape[1]


def del_residual_terms(sys, q_prev, q, q_next):
    """The four covectors of the forced DEL equation at q, by name."""
    L = sys.lagrangian
    terms = (
        ("D2 L_d(q_prev, q)", lambda: d2_lagrangian(L, q_prev, q)),
        ("D1 L_d(q, q_next)", lambda: d1_lagrangian(L, q, q_next)),
        ("f_d+(q_prev, q)", lambda: sys.force.plus(q_prev, q)),
        ("f_d-(q, q_next)", lambda: sys.force.minus(q, q_next)),
    )
    out = {}
    for name, term in terms:
        try:
            value = np.atleast_1d(np.asarray(term(), dtype=float))
        except EvaluationError as exc:
            raise EvaluationError(f"{exc} (term {name})", term=name) from exc
        if not np.all(np.isfinite(value)):
            raise EvaluationError(f"non-finite value in term {name}", term=name)
        out[name] = value
    return out


def del_residual(sys, q_prev, q, q_next):
    """D2 L_d(q_prev, q) + D1 L_d(q, q_next) + f+(q_prev, q) + f-(q, q_next)."""
    return sum(del_residual_terms(sys, q_prev, q, q_next).values())


def del_scale(sys, q_prev, q, q_next):
    """Largest entry among the DEL terms; roundoff in the residual scales with it."""
    return max(float(np.max(np.abs(t))) for t in del_residual_terms(sys, q_prev, q, q_next).values())


# safety factor on the roundoff floor of a central-difference partial
_FD_NOISE_FACTOR = 64.0


def fd_noise_floor(sys, q_prev, q, q_next):
    """Roundoff level of the residual when a Lagrangian partial is differenced.

    A central difference of L_d with step s carries an error near
    eps |L_d| / s, which no Newton iteration can get below.  Zero when
    both partials are analytic.
    """
    L = sys.lagrangian
    if L.has_partials:
        return 0.0
    size = abs(L(q_prev, q)) + abs(L(q, q_next)) + 1.0
    return _FD_NOISE_FACTOR * np.finfo(float).eps * size / L.fd_step


def tolerance_at(cfg, scale, floor=0.0):
    # absolute below unit term size, relative above it, never below the noise floor
    return max(cfg.newton_tol * max(1.0, scale), floor)


def newton_solve(residual, x0, cfg, jac=None, scale=None, floor=None):
    """Solve residual(x) = 0 by Newton with a finite-difference Jacobian.

    Converged when the residual infinity norm is within ``newton_tol``
    times max(1, scale(x)), or below ``floor(x)`` when that is larger;
    ``scale`` defaults to 1 and ``floor`` to 0.  Iteration also stops once
    the update is at roundoff level or the residual stops decreasing.
    """
    x = np.array(x0, dtype=float)
    r = residual(x)

    def norm(v):
        return float(np.max(np.abs(v))) if v.size else 0.0

    def ok(x, r):
        s = 1.0 if scale is None else scale(x)
        return norm(r) <= tolerance_at(cfg, s, 0.0 if floor is None else floor(x))

    for it in range(cfg.max_iters):
        if norm(r) <= cfg.newton_tol:
            return x
        J = jac(x) if jac is not None else forward_jacobian(residual, x, r, cfg.jacobian_fd_step)
        if not np.all(np.isfinite(J)):
            raise SingularJacobian(np.inf)
        rcond = 1.0 / np.linalg.cond(J) if J.size else 1.0
        if not rcond > _RCOND_FLOOR:
            raise SingularJacobian(1.0 / rcond if rcond > 0 else np.inf)
        dx = np.linalg.solve(J, r)
        x_new = x - dx
        r_new = residual(x_new)
        log.debug("newton iteration %d residual %.3e", it + 1, norm(r_new))
        if it > 0 and norm(r_new) >= norm(r) and ok(x, r):
            # stagnated at the evaluation noise; keep the better iterate
            break
        x, r = x_new, r_new
        if norm(dx) <= 4.0 * np.finfo(float).eps * max(1.0, norm(x)):
            break
    if ok(x, r):
        return x
    raise NonConvergence(cfg.max_iters, norm(r))


def newton_step(sys, q_prev, q, cfg=None, guess=None):
    cfg = cfg or StepConfig()
    q_prev = as_point(q_prev, sys.dim)
    q = as_point(q, sys.dim)
    if cfg.initial_guess_policy == "user_supplied":
        if guess is None:
            raise ValueError("initial_guess_policy 'user_supplied' needs a guess")
        x0 = as_point(guess, sys.dim)
    elif cfg.initial_guess_policy == "previous_point":
        x0 = q.copy()
    else:
        x0 = 2.0 * q - q_prev
    jac = None
    if sys.del_jacobian is not None:
        jac = lambda x: np.asarray(sys.del_jacobian(q_prev, q, x), float)
    return newton_solve(lambda x: del_residual(sys, q_prev, q, x), x0, cfg, jac,
                        scale=lambda x: del_scale(sys, q_prev, q, x),
                        floor=lambda x: fd_noise_floor(sys, q_prev, q, x))


def trajectory(sys, q0, q1, N, cfg=None):
    if N < 1:
        raise ValueError("N must be at least 1")
    cfg = cfg or StepConfig()
    pts = np.empty((N + 1, sys.dim))
    pts[0] = as_point(q0, sys.dim)
    pts[1] = as_point(q1, sys.dim)
    for k in range(1, N):
        try:
            pts[k + 1] = newton_step(sys, pts[k - 1], pts[k], cfg)
        except (NonConvergence, SingularJacobian) as exc:
            raise exc.at(k) from exc
    return DiscreteCurve(pts, step_label=sys.label)


def residual_norms(sys, curve, relative=False):
    """Infinity norm of the DEL residual at every interior index.

    With ``relative`` each norm is divided by max(1, term scale), the
    quantity the Newton certificate bounds by ``newton_tol`` when the
    Lagrangian partials are analytic.
    """
    q = curve.points
    out = []
    for k in range(1, len(curve) - 1):
        r = np.max(np.abs(del_residual(sys, q[k - 1], q[k], q[k + 1])))
        if relative:
            r = r / max(1.0, del_scale(sys, q[k - 1], q[k], q[k + 1]))
        out.append(r)
    return np.array(out)


def action_sum(sys, curve):
    q = curve.points
    if len(q) < 2:
        raise ValueError("curve needs at least two points")
    return float(sum(sys.lagrangian(q[k], q[k + 1]) for k in range(len(q) - 1)))


def lagrange_dalembert_sum(sys, curve, variation, step=1e-6):
    """First variation of the action plus the virtual work of the force.

    The action derivative is a central difference along ``variation``;
    the force term is summed directly.  Vanishes on trajectories when the
    variation has fixed endpoints.
    """
    q = curve.points
    dq = np.asarray(variation, float).reshape(q.shape)

    def action(eps):
        return action_sum(sys, DiscreteCurve(q + eps * dq))

    d_action = (action(step) - action(-step)) / (2.0 * step)
    work = sum(sys.force(q[k], q[k + 1], dq[k], dq[k + 1]) for k in range(len(q) - 1))
    return d_action + work
