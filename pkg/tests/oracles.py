"""Independent reference computations used by the tests.

Nothing here imports the package: the Steenrod action is computed directly on
F2[x1, x2, x3] = H^*((RP^inf)^3) from Sq^k(x^m) = C(m, k) x^(m+k) and the
Cartan formula, with plain dictionaries and math.comb.
"""

from __future__ import annotations

from collections import Counter
from itertools import product
from math import comb


def _sq_power(k: int, m: int):
    return (m + k) if comb(m, k) % 2 else None


def sq_monomial(k: int, mono: tuple[int, ...]) -> Counter:
    """Sq^k of x1^m1 x2^m2 x3^m3 as a mod-2 multiset of monomials."""
    out: Counter = Counter()
    for split in product(*(range(min(k, m) + 1) for m in mono)):
        if sum(split) != k:
            continue
        exps = [_sq_power(i, m) for i, m in zip(split, mono)]
        if None not in exps:
            out[tuple(exps)] ^= 1
    return Counter({m: 1 for m, c in out.items() if c})


def act(word: tuple[int, ...], poly: Counter) -> Counter:
    """Apply Sq^word (leftmost letter last) to a polynomial."""
    for k in reversed(word):
        new: Counter = Counter()
        for mono, c in poly.items():
            if c:
                for m in sq_monomial(k, mono):
                    new[m] ^= 1
        poly = Counter({m: 1 for m, c in new.items() if c})
    return poly


def act_sum(words, poly: Counter) -> Counter:
    total: Counter = Counter()
    for w in words:
        for m in act(w, poly):
            total[m] ^= 1
    return Counter({m: 1 for m, c in total.items() if c})


X123 = Counter({(1, 1, 1): 1})

# every monomial of degree 1..12 in three variables; a check on all of them
# separates the admissible basis through degree 12 (see the faithfulness test)
TEST_MONOMIALS = [m for m in product(range(13), repeat=3) if 0 < sum(m) <= 12]


def action_matrix(words) -> dict:
    """Column per test monomial: the image of the (summed) words, as a frozenset."""
    return {m: frozenset(act_sum(words, Counter({m: 1}))) for m in TEST_MONOMIALS}


def words_up_to(degree: int, letters: int):
    out = []

    def grow(prefix, budget):
        if prefix:
            out.append(tuple(prefix))
        if len(prefix) == letters:
            return
        for i in range(1, budget + 1):
            grow(prefix + [i], budget - i)

    grow([], degree)
    return out


def admissible_brute(degree: int):
    """Admissible sequences of exactly this degree, by brute force over all words."""
    return [w for w in words_up_to(degree, degree) if sum(w) == degree
            and all(w[j] >= 2 * w[j + 1] for j in range(len(w) - 1))]


def poincare_brute(degrees: list[int], exterior: list[bool], D: int) -> list[int]:
    """Count monomials degree by degree by direct enumeration."""
    counts = [0] * (D + 1)

    def rec(i, deg):
        if i == len(degrees):
            counts[deg] += 1
            return
        top = 1 if exterior[i] else (D - deg) // degrees[i]
        for e in range(top + 1):
            if deg + e * degrees[i] > D:
                break
            rec(i + 1, deg + e * degrees[i])

    rec(0, 0)
    return counts
