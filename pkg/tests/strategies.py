"""Random graph expressions for property tests."""

import random

from hypothesis import strategies as st

from bei.errors import BeiError
from bei.families import (
    Circ, FanAtom, FanSpec, FpAtom, KAtom, MarkRef, PathAtom, Star, realize,
)


def random_fan(rng: random.Random, n_max=5, h_max=3, pure=None) -> FanSpec:
    n = rng.randint(2, n_max)
    w = rng.randint(0, n)
    W = rng.sample(range(1, n + 1), w)
    parts = []
    while W:
        size = rng.randint(1, len(W))
        parts.append(tuple(sorted(W[:size])))
        W = W[size:]
    parts.sort()
    use_pure = rng.random() < 0.5 if pure is None else pure
    sizes = tuple(tuple(j + (1 if use_pure else rng.randint(1, h_max)) for j in range(1, len(p) + 1))
                  for p in parts)
    return FanSpec(n, tuple(parts), sizes)


def random_atom(rng: random.Random):
    r = rng.random()
    if r < 0.35:
        return FpAtom(rng.randint(1, 4))
    if r < 0.5:
        return PathAtom(rng.randint(2, 5))
    if r < 0.55:
        return KAtom(2)
    return FanAtom(random_fan(rng))


def random_expr(rng: random.Random, depth: int = 2, tries: int = 50):
    """A random expression with at most ``depth`` levels of gluing; marks are
    drawn from the leaves still available on each side."""
    if depth == 0 or rng.random() < 0.25:
        return random_atom(rng)
    for _ in range(tries):
        left = random_expr(rng, depth - 1)
        right = random_expr(rng, depth - 1)
        lm, rm = realize(left), realize(right)
        if not lm.marks or not rm.marks:
            continue
        fa, fb = rng.choice(lm.marks), rng.choice(rm.marks)
        ia, la = lm.origin[fa]
        ib, lb = rm.origin[fb]
        cls = Circ if rng.random() < 0.5 else Star
        node = cls(left, right, MarkRef(la, ia + 1), MarkRef(lb, ib + 1))
        try:
            realize(node)
        except BeiError:
            continue
        return node
    return random_atom(rng)


@st.composite
def expressions(draw, depth=2):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_expr(random.Random(seed), depth)


@st.composite
def fan_specs(draw, n_max=5, h_max=3, pure=None):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_fan(random.Random(seed), n_max, h_max, pure)
