import numpy as np
import pytest

from fdms.systems import DiscreteForce, DiscreteLagrangian, ForcedDiscreteSystem


def free_particle(h=1.0, dim=1):
    """L_d = |q1 - q0|^2 / 2h with no force."""
    return ForcedDiscreteSystem(
        dim=dim,
        lagrangian=DiscreteLagrangian(lambda q0, q1: float((q1 - q0) @ (q1 - q0)) / (2.0 * h)),
        force=DiscreteForce.zero(dim),
        label="free",
    )


@pytest.fixture
def rng():
    return np.random.default_rng(7)
