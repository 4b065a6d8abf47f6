"""Random scheme generators shared by the property tests."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from kakutani.scheme import Atom, GeoTail, build_scheme


def random_finite(rng: random.Random, max_blocks: int = 4, den: int = 12):
    """Atoms with lengths k/den summing to one, at least two blocks."""
    k = rng.randint(2, max_blocks)
    cuts = sorted(rng.sample(range(1, den), k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return build_scheme([Atom(Fraction(p, den)) for p in parts])


def random_with_tail(rng: random.Random):
    """One geometric tail plus atoms filling the remaining mass."""
    first = Fraction(1, rng.choice([2, 3, 4]))
    ratio = Fraction(1, rng.choice([2, 3, 4]))
    mass = first / (1 - ratio)
    rest = 1 - mass
    blocks = [GeoTail(first, ratio, rng.choice(["asc", "desc"]))]
    if rest > 0:
        if rng.random() < 0.5 and rest > Fraction(1, 6):
            blocks += [Atom(rest / 2), Atom(rest / 2)]
        else:
            blocks.append(Atom(rest))
    rng.shuffle(blocks)
    return build_scheme(blocks)


def random_scheme(rng: random.Random):
    return random_with_tail(rng) if rng.random() < 0.35 else random_finite(rng)


@st.composite
def finite_schemes(draw, max_blocks: int = 4, den: int = 12):
    k = draw(st.integers(2, max_blocks))
    cuts = sorted(draw(st.sets(st.integers(1, den - 1), min_size=k - 1, max_size=k - 1)))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return build_scheme([Atom(Fraction(p, den)) for p in parts])


@st.composite
def schemes(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_scheme(random.Random(seed))


thresholds = st.integers(2, 300).map(lambda d: Fraction(1, d))
