"""Forced discrete mechanical systems: DEL stepping, abelian reduction and momentum drift."""

from .errors import (BasePointMismatch, DimensionError, EvaluationError, FDMSError, NonConvergence,
                     NoSection, SingularJacobian)
from .library import FAMILIES, build
from .solver import DiscreteCurve, StepConfig, newton_step, trajectory
from .systems import (ContinuousForcedSystem, DiscreteForce, DiscreteLagrangian, ForcedDiscreteSystem,
                      discretize_midpoint)

__all__ = [
    "BasePointMismatch", "DimensionError", "EvaluationError", "FDMSError", "NonConvergence",
    "NoSection", "SingularJacobian", "FAMILIES", "build", "DiscreteCurve", "StepConfig",
    "newton_step", "trajectory", "ContinuousForcedSystem", "DiscreteForce", "DiscreteLagrangian",
    "ForcedDiscreteSystem", "discretize_midpoint",
]
