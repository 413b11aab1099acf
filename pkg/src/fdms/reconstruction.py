"""Lifting reduced curves back to the configuration space."""

from dataclasses import dataclass

import numpy as np

from .errors import BasePointMismatch
from .solver import DiscreteCurve, StepConfig, residual_norms
from .symmetry import f1_leg, upsilon

BASE_POINT_TOL = 1e-10


def reconstruct(setup, rcurve, q0, certify=True):
    """The unique curve through q0 whose pairs reduce to ``rcurve``."""
    q0 = np.asarray(q0, float)
    tau0 = setup.quotient.pi(q0)
    if np.max(np.abs(tau0 - rcurve.tau0), initial=0.0) > BASE_POINT_TOL:
        raise BasePointMismatch(f"q0 lies over {tau0}, reduced curve starts at {rcurve.tau0}")
    pts = np.empty((len(rcurve) + 1, setup.dim))
    pts[0] = q0
    for k in range(len(rcurve)):
        pts[k + 1] = f1_leg(setup, pts[k], rcurve.ws[k], rcurve.taus[k])
    if certify:
        gap = lift_gap(setup, pts, rcurve)
        if gap > 1e-9 * (1.0 + np.max(np.abs(pts))):
            raise BasePointMismatch(f"lift does not reduce back to the input (gap {gap:.3e})")
    return DiscreteCurve(pts, step_label="reconstructed")


def lift_gap(setup, points, rcurve):
    """Max mismatch between the invariants of consecutive lifted pairs and the reduced data."""
    worst = 0.0
    for k in range(len(rcurve)):
        tau_a, w, tau_b = upsilon(setup, points[k], points[k + 1])
        worst = max(worst,
                    np.max(np.abs(tau_a - rcurve.tau(k)), initial=0.0),
                    np.max(np.abs(w - rcurve.ws[k])),
                    np.max(np.abs(tau_b - rcurve.taus[k]), initial=0.0))
    return float(worst)


@dataclass(frozen=True)
class LiftReport:
    curve: DiscreteCurve
    residuals: np.ndarray
    max_residual: float
    threshold: float
    passed: bool


def lift_is_trajectory(base, setup, rcurve, q0, cfg=None):
    cfg = cfg or StepConfig()
    curve = reconstruct(setup, rcurve, q0)
    res = residual_norms(base, curve)
    worst = float(np.max(res, initial=0.0))
    threshold = 10.0 * cfg.newton_tol
    return LiftReport(curve, res, worst, threshold, worst <= threshold)
