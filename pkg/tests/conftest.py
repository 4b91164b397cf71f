import numpy as np
import pytest
from hypothesis import settings

from tvsip import Signal

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def piecewise_constant(rng, n=64, min_width=6, max_jumps=7):
    """Random plateaus of width >= min_width with normal levels."""
    k = int(rng.integers(2, max_jumps + 1))
    cuts = np.sort(rng.choice(np.arange(min_width, n - min_width), k, replace=False))
    edges = [0]
    for c in cuts:
        if c - edges[-1] >= min_width:
            edges.append(int(c))
    edges.append(n)
    v = np.zeros(n)
    for a, b in zip(edges[:-1], edges[1:]):
        v[a:b] = rng.normal()
    return Signal.from_array(v)


def rectangles(rng, n=24, count=3):
    """Sum of random axis-aligned rectangles on an n x n grid."""
    v = np.zeros((n, n))
    for _ in range(count):
        i0, j0 = rng.integers(0, n - 4, size=2)
        i1 = int(rng.integers(i0 + 3, n + 1))
        j1 = int(rng.integers(j0 + 3, n + 1))
        v[i0:i1, j0:j1] += rng.normal()
    return Signal.from_array(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
