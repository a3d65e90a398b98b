import numpy as np
import pytest

from sitdde import ModelParams, positive_equilibria

# Reference parameter set with a single positive equilibrium near N = 899,
# used throughout as the main worked case.
REFERENCE = dict(a=18.0, b=35.0, c=0.19, r=0.99, xi1=0.02, xi2=1.5, xi3=0.1)

# Parameter sets of the delay-sweep and fertility-sweep scan scenarios.
DELAY_SCAN = dict(a=5.0, b=18.0, c=0.05, r=1.0, xi1=0.5, xi2=0.2, xi3=0.3)
FERTILITY_SCAN = dict(a=5.0, b=18.0, c=2.89, r=1.0, xi1=1.5, xi2=1.2, xi3=2.3)

# Pre-screened parameter tuples (a, b, c, r, xi1, xi2, xi3) whose positive
# equilibrium is stable at tau = 0 and has at least one certified crossing
# frequency; they exercise the full Hopf chain non-vacuously.
CROSSING_CORPUS = (
    (6.1590, 24.0408, 11.1175, 19.6275, 1.8140, 2.0212, 2.2517),
    (14.5408, 21.5065, 23.0151, 3.3442, 0.3395, 2.4879, 0.3802),
    (12.4470, 23.7118, 3.6561, 14.5349, 1.6746, 1.6317, 2.4344),
    (9.2233, 7.7964, 1.5353, 15.3259, 1.9845, 2.1719, 2.0256),
    (15.6398, 6.1342, 18.3233, 16.5312, 1.5693, 1.5625, 1.7390),
)


def make_params(d: dict, tau: float = 0.0) -> ModelParams:
    return ModelParams(tau=tau, **d)


def corpus_params(tau: float = 0.0):
    return [
        ModelParams(a=a, b=b, c=c, r=r, xi1=x1, xi2=x2, xi3=x3, tau=tau)
        for (a, b, c, r, x1, x2, x3) in CROSSING_CORPUS
    ]


@pytest.fixture(scope="session")
def reference_params():
    return make_params(REFERENCE)


@pytest.fixture(scope="session")
def reference_equilibrium(reference_params):
    reports = positive_equilibria(reference_params)
    assert len(reports) == 1
    return reports[0]


def random_table_params(rng: np.random.Generator, tau: float | None = None) -> ModelParams:
    """Draw one parameter set from the plausible ranges."""
    return ModelParams(
        a=rng.uniform(1, 20),
        b=rng.uniform(5, 25),
        c=rng.uniform(0.01, 25),
        r=rng.uniform(1, 20),
        xi1=rng.uniform(0.02, 3.5),
        xi2=rng.uniform(1.5, 2.5),
        xi3=rng.uniform(0.1, 2.5),
        tau=rng.uniform(0.1, 7.0) if tau is None else tau,
    )
