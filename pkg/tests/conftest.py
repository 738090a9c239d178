import os

import numpy as np
import pytest


def seeded_rng(default_seed):
    """RNG for sampled checks; FRACDYN_SEED overrides the per-test default."""
    return np.random.default_rng(int(os.environ.get("FRACDYN_SEED", default_seed)))


@pytest.fixture
def rng():
    return seeded_rng(20260810)


def assert_multiset_close(actual, expected, tol):
    """Match two complex multisets greedily within tol."""
    actual = [complex(v) for v in actual]
    expected = [complex(v) for v in expected]
    assert len(actual) == len(expected)
    remaining = list(expected)
    for value in actual:
        best = min(range(len(remaining)), key=lambda i: abs(remaining[i] - value))
        assert abs(remaining[best] - value) <= tol, (
            f"{value} has no partner within {tol}; closest {remaining[best]}"
        )
        remaining.pop(best)
