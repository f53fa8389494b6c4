import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from alarmflag.augment import augment
from alarmflag.plant import CascadeModel, Grid, discretize
from alarmflag.solver import ConstraintSpec, solve_constrained

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def cascade_model():
    return discretize(CascadeModel(), Grid(), 15)


@pytest.fixture(scope="session")
def exp1(cascade_model):
    aug = augment(cascade_model.mdp, cascade_model.alarms, 1)
    return aug, solve_constrained(aug, ConstraintSpec(0.5))


@pytest.fixture(scope="session")
def exp2(cascade_model):
    aug = augment(cascade_model.mdp, cascade_model.alarms, 3)
    return aug, solve_constrained(aug, ConstraintSpec((0.5, 0.3, 0.1)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
