import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from knotforge.oracle import enumerate_shadows


_shadow_cache = {}


def shadows(n):
    """All prime reduced shadows with n crossings (cached per session)."""
    if n not in _shadow_cache:
        _shadow_cache[n] = enumerate_shadows(n)
    return _shadow_cache[n]


@pytest.fixture(scope="session")
def corpus8():
    """Shadows for 3 <= n <= 8, keyed by n."""
    return {n: shadows(n) for n in range(3, 9)}


@pytest.fixture(scope="session")
def corpus9(corpus8):
    out = dict(corpus8)
    out[9] = shadows(9)
    return out


@pytest.fixture(scope="session")
def store9(tmp_path_factory):
    """A store generated to nine crossings."""
    from knotforge.census import KnotStore, generate

    root = tmp_path_factory.mktemp("db9")
    store = KnotStore(root)
    generate(9, store)
    return store
