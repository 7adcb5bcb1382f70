"""Seeded random instances (rational generator sets, bipolar polytopes)."""

from __future__ import annotations

import random
from fractions import Fraction

from .geometry import ConvexBody, hull_with_origin


def random_rational(rng: random.Random, lo=-3, hi=3, denom=4) -> Fraction:
    return Fraction(rng.randint(lo * denom, hi * denom), denom)


def random_points(rng: random.Random, n: int, dim: int = 2, lo=-3, hi=3, denom=4):
    return [tuple(random_rational(rng, lo, hi, denom) for _ in range(dim)) for _ in range(n)]


def random_generator_set(rng: random.Random, max_points: int = 8, dim: int = 2) -> ConvexBody:
    """Hull of 1 to ``max_points`` random rational points in ``[-3, 3]^dim``."""
    return ConvexBody.from_points(random_points(rng, rng.randint(1, max_points), dim))


def random_bipolar_polytope(rng: random.Random, max_points: int = 6, dim: int = 2,
                            interior: bool = True) -> ConvexBody:
    """Random polytope containing the origin.

    With ``interior`` the origin is forced into the interior by adding a small
    cross around it, which keeps the polar bounded.
    """
    pts = random_points(rng, rng.randint(1, max_points), dim)
    if interior:
        r = Fraction(rng.randint(1, 4), 4)
        for i in range(dim):
            for s in (1, -1):
                e = [Fraction(0)] * dim
                e[i] = s * r
                pts.append(tuple(e))
        return ConvexBody.from_points(pts).canonical()
    return hull_with_origin(ConvexBody.from_points(pts)).canonical()


def rng_for(seed: int, *tags) -> random.Random:
    """Independent stream per (seed, tag) so that adding a check elsewhere
    does not shift the instances of another."""
    return random.Random(repr((int(seed),) + tags))
