"""Instance generators shared by the test modules."""

import numpy as np

from twoproj.pairs import ProjectionPair, pair_with_angles, random_pair, two_by_two_pair
from twoproj.words import Family, Word, WordCombination

FAMILIES = [Family.A, Family.B, Family.C, Family.D]


def half_pair():
    """``P = diag(1, 0)``, ``Q = [[1/2, 1/2], [1/2, 1/2]]``."""
    return ProjectionPair(*two_by_two_pair(0.5))


def two_angle_pair():
    """Direct sum of generic 2x2 blocks with angles pi/6 and pi/3."""
    return pair_with_angles((0, 0, 0, 0), [np.pi / 6, np.pi / 3])


def random_word(rng, k_max=3, allow_identity=True):
    while True:
        w = Word(FAMILIES[int(rng.integers(4))], int(rng.integers(0, k_max + 1)))
        if allow_identity or not w.is_identity:
            return w


def random_coefficient(rng):
    return complex(*rng.standard_normal(2))


def lower_bound_instance(rng):
    """A random (pair, combination) for which ``||prod X_i|| = 1``.

    Three regimes: every word is ``P - P∧Q``, every word is ``Q - P∧Q``, or
    a pair with one principal angle in ``[1e-6, 1e-5]`` so that every
    alternating product has norm within ``1e-8`` of one.
    """
    kind = int(rng.integers(3))
    dim = int(rng.integers(2, 13))
    mode = "complement" if rng.random() < 0.5 else "identity"
    if kind < 2:
        pair = random_pair(dim, rng)
        word = Word(Family.B if kind == 0 else Family.D, 0)
        words = [word] * int(rng.integers(1, 6))
    else:
        m = int(rng.integers(1, dim // 2 + 1))
        rest = dim - 2 * m
        cuts = np.sort(rng.integers(0, rest + 1, size=3))
        corners = (int(cuts[0]), int(cuts[1] - cuts[0]), int(cuts[2] - cuts[1]), int(rest - cuts[2]))
        angles = np.concatenate([[rng.uniform(1e-6, 1e-5)], rng.uniform(0.05, 1.5, size=m - 1)])
        pair = pair_with_angles(corners, angles, rng)
        words = [random_word(rng, 2, allow_identity=False) for _ in range(int(rng.integers(1, 7)))]
    terms = [(random_coefficient(rng), w) for w in words]
    return pair, WordCombination(random_coefficient(rng), terms, mode)
