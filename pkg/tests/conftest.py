import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")

from hgdilute.errors import InvalidInputError
from hgdilute.generators import random_hypergraph


def sample_hypergraph(rng: random.Random, max_vertices=6, max_edges=5, max_degree=3,
                      max_rank=3):
    """Feasible random connected hypergraph; resamples infeasible parameter draws."""
    while True:
        ne = rng.randint(1, max_edges)
        rank = rng.randint(2, max_rank)
        nv = rng.randint(2, max(2, min(max_vertices, ne * (rank - 1) + 1)))
        try:
            return random_hypergraph(
                nv, ne, max_degree, rank, seed=rng.randint(0, 10**9), retries=60
            )
        except InvalidInputError:
            continue


@pytest.fixture
def rng():
    return random.Random(0xD17)
