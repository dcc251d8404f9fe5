import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def brute_induced(edges, S):
    """Induced edge set from the raw edge list, independent of Graph."""
    S = set(int(v) for v in S)
    out = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u != v and u in S and v in S:
            out.add((min(u, v), max(u, v)))
    return out


def random_edge_list(rng, n, p):
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def report(capsys, line):
    """Print a line past pytest's capture so it lands in the run log."""
    with capsys.disabled():
        print("\n" + line)
