from __future__ import annotations

import random
from fractions import Fraction

import pytest

from tropsym import Divisor, Point, fixture
from tropsym.io import FIXTURES


@pytest.fixture(scope="session")
def models():
    return {name: fixture(name) for name in FIXTURES}


def random_point(rng: random.Random, m, denominators=(1, 2, 3, 4)) -> Point:
    """A vertex or an interior point at a rational position."""
    if rng.random() < 0.3:
        return Point(vertex=rng.choice(m.vertices))
    e = rng.choice(m.edges)
    den = rng.choice(denominators)
    n = int(e.length * den)
    if n < 2:
        den *= 2
        n = int(e.length * den)
    return Point(edge=e.id, pos=Fraction(rng.randint(1, n - 1), den))


def random_effective(rng: random.Random, m, degree: int, **kw) -> Divisor:
    return Divisor(m, [(random_point(rng, m, **kw), 1) for _ in range(degree)])


def random_divisor(rng: random.Random, m, degree: int, n_terms: int = 4, **kw) -> Divisor:
    """A divisor of the given degree with a few positive and negative terms."""
    terms = [(random_point(rng, m, **kw), rng.randint(-2, 2)) for _ in range(n_terms)]
    D = Divisor(m, terms)
    fix = degree - D.degree
    return D + Divisor(m, [(random_point(rng, m, **kw), fix)])
