"""Shared strategies and small builders for the test suite."""

import itertools
import random
from fractions import Fraction

import numpy as np

from hypothesis import strategies as st

from surfchar.exactalg import QQ, in_E, with_sqrt
from surfchar.sl2core import Mat2


def M(a, b, c, d, tower=QQ):
    return Mat2(tower(a), tower(b), tower(c), tower(d))


def _bits(m):
    return max(abs(int(x.rational())) for x in m.entries()).bit_length()


@st.composite
def sl2z(draw, bits=10):
    """Random SL2(Z) matrix as a product of elementary matrices."""
    m = M(1, 0, 0, 1)
    for _ in range(draw(st.integers(1, 6))):
        k = draw(st.integers(-3, 3))
        e = M(1, k, 0, 1) if draw(st.booleans()) else M(1, 0, k, 1)
        nxt = m * e
        if _bits(nxt) > bits:
            break
        m = nxt
    if draw(st.booleans()):
        m = -m
    return m


def random_sl2z(rng: random.Random, bits=10):
    """The same distribution as ``sl2z`` driven by a seeded RNG."""
    m = M(1, 0, 0, 1)
    for _ in range(rng.randint(1, 8)):
        k = rng.randint(-4, 4)
        e = M(1, k, 0, 1) if rng.random() < 0.5 else M(1, 0, k, 1)
        nxt = m * e
        if _bits(nxt) > bits:
            break
        m = nxt
    return -m if rng.random() < 0.5 else m


Q235 = with_sqrt(with_sqrt(with_sqrt(QQ, 2), 3), 5)


def two_cos_values():
    """2cos(2 pi j/n) for the n <= 12 whose values lie in Q(sqrt2, sqrt3, sqrt5)."""
    r2, r3, r5 = (Q235.gen(i) for i in range(3))
    return {
        1: [Q235(2)],
        2: [Q235(-2)],
        3: [Q235(-1)],
        4: [Q235(0)],
        5: [(r5 - 1) / 2, (-r5 - 1) / 2],
        6: [Q235(1)],
        8: [r2, -r2],
        10: [(r5 + 1) / 2, (1 - r5) / 2],
        12: [r3, -r3],
    }


def in_E_grid():
    """Check in_E against a numeric conjugate oracle on a grid in Q235.

    The grid takes rational parts in halves from -2 to 2 and root
    coefficients in halves from -1 to 1. Returns the elements found in E.
    """
    halves = [Fraction(h, 2) for h in range(-2, 3)]
    consts = [Fraction(h, 2) for h in range(-4, 5)]
    gens = [Q235.gen(i) for i in range(3)]
    roots = np.sqrt([2.0, 3.0, 5.0])
    signs = list(itertools.product((1, -1), repeat=3))
    hits = set()
    for a, coeffs in itertools.product(consts, itertools.product(halves, repeat=3)):
        x = a + sum(c * g for c, g in zip(coeffs, gens))
        conj = [float(a) + sum(e * float(k) * r for e, k, r in zip(sg, coeffs, roots)) for sg in signs]
        poly = np.poly(conj)
        integral = np.allclose(poly, np.round(poly), atol=1e-7)
        oracle = integral and all(abs(t) <= 2 + 1e-9 for t in conj)
        assert in_E(x) == oracle, x
        if oracle:
            hits.add(x)
    return hits
