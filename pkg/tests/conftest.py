from __future__ import annotations

import random
from pathlib import Path

import pytest

from gtype.algebra import has_double_boundary
from gtype.core import GeometricType, parse_geometric_type

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> GeometricType:
    return parse_geometric_type((FIXTURES / f"{name}.gt").read_text())


@pytest.fixture(scope="session")
def t_id():
    return load_fixture("t_id")


@pytest.fixture(scope="session")
def t_bak():
    return load_fixture("t_bak")


@pytest.fixture(scope="session")
def t_hs():
    return load_fixture("t_hs")


@pytest.fixture(scope="session")
def t_cat():
    return load_fixture("t_cat")


def random_type(rng: random.Random, max_n: int = 3, max_count: int = 3) -> GeometricType:
    """A uniformly scrambled valid type with n <= max_n, h_i, v_i <= max_count."""
    while True:
        n = rng.randint(1, max_n)
        h = tuple(rng.randint(1, max_count) for _ in range(n))
        total = sum(h)
        # random composition of `total` into n parts, each within bounds
        v = []
        remaining = total
        for idx in range(n):
            slots = n - idx - 1
            lo = max(1, remaining - slots * max_count)
            hi = min(max_count, remaining - slots)
            if lo > hi:
                break
            pick = rng.randint(lo, hi)
            v.append(pick)
            remaining -= pick
        else:
            if remaining == 0:
                break
    hlabels = [(i, j) for i in range(1, n + 1) for j in range(1, h[i - 1] + 1)]
    vlabels = [(k, l) for k in range(1, n + 1) for l in range(1, v[k - 1] + 1)]
    rng.shuffle(vlabels)
    rho = dict(zip(hlabels, vlabels))
    eps = {hl: rng.choice((1, -1)) for hl in hlabels}
    return GeometricType.build(n, h, tuple(v), rho, eps)


def random_type_no_double_boundary(rng: random.Random, max_n: int = 3,
                                   max_count: int = 3) -> GeometricType:
    while True:
        T = random_type(rng, max_n, max_count)
        if not has_double_boundary(T):
            return T


def corpus(seed: int, count: int, max_n: int = 3, max_count: int = 3,
           no_double_boundary: bool = True) -> list[GeometricType]:
    rng = random.Random(seed)
    make = random_type_no_double_boundary if no_double_boundary else random_type
    return [make(rng, max_n, max_count) for _ in range(count)]
