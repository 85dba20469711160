import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cluster_consensus import ScenarioSpec, build_clustered_network


@pytest.fixture(scope="session")
def tiny_spec():
    """Three clusters of four nodes each: fast to run, rich enough to break."""
    return ScenarioSpec(
        family="ring",
        cluster_sizes=(4, 4, 4),
        gamma=0.5,
        beta=0.1,
        tau=3,
        seed=7,
        max_iters=400,
    )


@pytest.fixture(scope="session")
def tiny_network(tiny_spec):
    return build_clustered_network(tiny_spec)
