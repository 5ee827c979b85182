import numpy as np
import pytest

from ldpcsched.codes import CodeSpec, TannerGraph, construct_regular_code


@pytest.fixture(scope="session")
def toy_graph():
    # checks {v1, v2} and {v2, v3} in 1-indexed notation
    return TannerGraph(3, [[0, 1], [1, 2]])


@pytest.fixture(scope="session")
def code512():
    return construct_regular_code(CodeSpec(512, 256, 3, 6), 1)


@pytest.fixture(scope="session")
def code96():
    return construct_regular_code(CodeSpec(96, 48, 3, 6), 3)


def random_tree_code(rng, n_max=16):
    """Cycle-free Tanner graph grown one check at a time.

    Every new check attaches to exactly one existing variable plus fresh
    ones, so no cycle can close. Variable labels are shuffled afterwards.
    """
    n = 1
    checks = []
    while True:
        dc = int(rng.integers(2, 5))
        if n + dc - 1 > n_max:
            break
        anchor = int(rng.integers(0, n))
        checks.append([anchor] + list(range(n, n + dc - 1)))
        n += dc - 1
        if len(checks) >= 2 and rng.random() < 0.15:
            break
    perm = rng.permutation(n)
    return TannerGraph(n, [[int(perm[v]) for v in row] for row in checks])
