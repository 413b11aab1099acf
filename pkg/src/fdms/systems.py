"""Forced discrete mechanical systems on a single global chart.

Configuration points and covectors are plain float arrays of length
``dim``.  A covector returned by ``d1_lagrangian`` lives at the first
point of the pair, one returned by ``d2_lagrangian`` at the second.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, EvaluationError
from .numdiff import gradient

Array = np.ndarray
PairMap = Callable[[Array, Array], Array]


def as_point(q, dim=None):
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.ndim != 1:
        raise DimensionError(f"expected a flat coordinate array, got shape {q.shape}")
    if dim is not None and q.size != dim:
        raise DimensionError(f"expected {dim} coordinates, got {q.size}")
    if not np.all(np.isfinite(q)):
        raise EvaluationError(f"non-finite coordinates {q}")
    return q


def pairing(alpha, v):
    """Canonical dual pairing of a covector with a tangent vector."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if alpha.shape != v.shape:
        raise DimensionError(f"cannot pair covector of shape {alpha.shape} with {v.shape}")
    return float(alpha @ v)


@dataclass(frozen=True)
class DiscreteLagrangian:
    eval: Callable[[Array, Array], float]
    d1: Optional[PairMap] = None
    d2: Optional[PairMap] = None
    fd_step: float = 1e-6

    def __call__(self, q0, q1):
        return float(self.eval(q0, q1))

    @property
    def has_partials(self):
        return self.d1 is not None and self.d2 is not None


def _finite(value, what):
    value = np.atleast_1d(np.asarray(value, dtype=float))
    if not np.all(np.isfinite(value)):
        raise EvaluationError(f"non-finite value in {what}", term=what)
    return value


def d1_lagrangian(L, q0, q1):
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    if L.d1 is not None:
        return _finite(L.d1(q0, q1), "D1 L_d")
    return _finite(gradient(lambda x: L.eval(x, q1), q0, L.fd_step), "D1 L_d")


def d2_lagrangian(L, q0, q1):
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    if L.d2 is not None:
        return _finite(L.d2(q0, q1), "D2 L_d")
    return _finite(gradient(lambda x: L.eval(q0, x), q1, L.fd_step), "D2 L_d")


@dataclass(frozen=True)
class DiscreteForce:
    """A 1-form on Q x Q stored as its two legs.

    ``minus(q0, q1)`` is a covector at q0, ``plus(q0, q1)`` one at q1.
    """

    minus: PairMap
    plus: PairMap

    def __call__(self, q0, q1, dq0, dq1):
        return pairing(self.minus(q0, q1), dq0) + pairing(self.plus(q0, q1), dq1)

    @classmethod
    def zero(cls, dim):
        return cls(lambda q0, q1: np.zeros(dim), lambda q0, q1: np.zeros(dim))

    @classmethod
    def from_one_form(cls, form, dim):
        """Split a whole 1-form ``form(q0, q1) -> array(2*dim)``."""

        def minus(q0, q1):
            return np.asarray(form(q0, q1), float)[:dim]

        def plus(q0, q1):
            return np.asarray(form(q0, q1), float)[dim:]

        return cls(minus, plus)


@dataclass(frozen=True)
class ForcedDiscreteSystem:
    dim: int
    lagrangian: DiscreteLagrangian
    force: DiscreteForce
    label: str = ""
    # optional analytic Jacobian of the DEL residual in its third slot
    del_jacobian: Optional[Callable[[Array, Array, Array], Array]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be positive")


@dataclass(frozen=True)
class ContinuousForcedSystem:
    """(Q, L, f) with a horizontal force ``force(q, qdot) -> covector at q``."""

    dim: int
    lagrangian: Callable[[Array, Array], float]
    force: Callable[[Array, Array], Array]
    label: str = ""


def midpoint_map(q, qdot, h):
    q = np.asarray(q, float)
    qdot = np.asarray(qdot, float)
    return q - 0.5 * h * qdot, q + 0.5 * h * qdot


def midpoint_inverse(q0, q1, h):
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    return 0.5 * (q0 + q1), (q1 - q0) / h


def discretize_midpoint(cs, h):
    """Build (L_d, f_d) from (L, f) through the midpoint map, scaled by h.

    A horizontal force has no fiber component, so the pulled-back
    force puts half of ``h * f`` on each leg.
    """
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h}")

    def L_d(q0, q1):
        q, v = midpoint_inverse(q0, q1, h)
        return h * float(cs.lagrangian(q, v))

    def leg(q0, q1):
        q, v = midpoint_inverse(q0, q1, h)
        return 0.5 * h * np.asarray(cs.force(q, v), float)

    return ForcedDiscreteSystem(
        dim=cs.dim,
        lagrangian=DiscreteLagrangian(L_d),
        force=DiscreteForce(leg, leg),
        label=f"{cs.label}-midpoint" if cs.label else "midpoint",
    )


def roundtrip_check(h, dim=2, samples=100, rng=None, scale=10.0):
    """Max discrepancy of both compositions of the midpoint map and its inverse.

    Velocity errors are measured as displacements h |dv|; recovering v
    divides a coordinate difference by h, so its raw roundoff grows like 1/h.
    """
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h}")
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(samples):
        q, v = rng.uniform(-scale, scale, (2, dim))
        q2, v2 = midpoint_inverse(*midpoint_map(q, v, h), h)
        worst = max(worst, np.max(np.abs(q2 - q)), h * np.max(np.abs(v2 - v)))
        a, b = rng.uniform(-scale, scale, (2, dim))
        a2, b2 = midpoint_map(*midpoint_inverse(a, b, h), h)
        worst = max(worst, np.max(np.abs(a2 - a)), np.max(np.abs(b2 - b)))
    return float(worst)


def partials_discrepancy(L, probes):
    """Worst |analytic - central difference| / (1 + |analytic|) over probe pairs."""
    if not L.has_partials:
        raise ValueError("Lagrangian has no analytic partials to check")
    worst = 0.0
    for q0, q1 in probes:
        for analytic, numeric in (
            (L.d1(q0, q1), gradient(lambda x: L.eval(x, q1), q0, L.fd_step)),
            (L.d2(q0, q1), gradient(lambda x: L.eval(q0, x), q1, L.fd_step)),
        ):
            analytic = np.asarray(analytic, float)
            worst = max(worst, float(np.max(np.abs(analytic - numeric) / (1.0 + np.abs(analytic)))))
    return worst
