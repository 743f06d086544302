"""Mod-2 Steenrod squares as words, with their Adem normal form and the Cartan formula.

Words are read left to right as composition, so ``Sq[2,1]`` means
Sq^2 Sq^1.  A word may carry a twist ``s``; its final letter then stands for
the higher Bockstein Sq^1_s attached to a Z/2^s fundamental class, and the
word prints as ``Sq[2,1]_s3``.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterator, Sequence


def binom2(n: int, k: int) -> int:
    """Binomial coefficient mod 2 (Lucas): 1 iff the bits of k are a subset of those of n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & ~n) == 0 else 0


@dataclass(frozen=True)
class SteenrodWord:
    entries: tuple[int, ...] = ()
    twist: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(i) for i in self.entries))
        if any(i <= 0 for i in self.entries):
            raise ValueError(f"square indices must be positive: {self.entries}")
        if self.twist is not None:
            if self.twist < 1:
                raise ValueError("twist must be a positive integer")
            if not self.entries or self.entries[-1] != 1:
                raise ValueError("a twisted word must end in 1 (the higher Bockstein)")

    @property
    def degree(self) -> int:
        return sum(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "1"
        s = "Sq[" + ",".join(map(str, self.entries)) + "]"
        if self.twist is not None:
            s += f"_s{self.twist}"
        return s

    def sort_key(self):
        return (self.degree, self.entries, self.twist or 0)


class AdmissibleSequence(SteenrodWord):
    """An admissible word: i_j >= 2 i_{j+1} throughout."""

    def __post_init__(self):
        super().__post_init__()
        if not is_admissible(self):
            raise ValueError(f"{self} is not admissible")

    @property
    def excess(self) -> int:
        e = self.entries
        return e[0] - sum(e[1:]) if e else 0


def is_admissible(w: SteenrodWord | Sequence[int]) -> bool:
    e = w.entries if isinstance(w, SteenrodWord) else tuple(w)
    return all(e[j] >= 2 * e[j + 1] for j in range(len(e) - 1))


def excess(seq: SteenrodWord | Sequence[int]) -> int:
    e = seq.entries if isinstance(seq, SteenrodWord) else tuple(seq)
    if not is_admissible(e):
        raise ValueError(f"excess is only defined for admissible sequences, got {e}")
    return e[0] - sum(e[1:]) if e else 0


@dataclass(frozen=True)
class SteenrodSum:
    """F2-linear combination of admissible sequences of one degree."""

    terms: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        degs = {t.degree for t in self.terms}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous sum: degrees {sorted(degs)}")

    @property
    def degree(self) -> int | None:
        for t in self.terms:
            return t.degree
        return None

    def sorted_terms(self) -> list[AdmissibleSequence]:
        return sorted(self.terms, key=lambda t: t.sort_key(), reverse=True)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.sorted_terms())

    def __add__(self, other: "SteenrodSum") -> "SteenrodSum":
        return SteenrodSum(self.terms ^ other.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(t) for t in self.sorted_terms())


# -- Adem rewriting ---------------------------------------------------------

def adem_relation(a: int, b: int) -> list[tuple[int, ...]]:
    """Right-hand side of Sq^a Sq^b for 0 < a < 2b, as words (Sq^0 dropped)."""
    if not 0 < a < 2 * b:
        raise ValueError(f"Sq^{a}Sq^{b} is already admissible")
    out = []
    for c in range(a // 2 + 1):
        if binom2(b - c - 1, a - 2 * c):
            out.append((a + b - c, c) if c else (a + b - c,))
    return out


def _toggle(acc: Counter, items) -> None:
    for t in items:
        acc[t] ^= 1


@lru_cache(maxsize=None)
def _reduce(word: tuple[int, ...]) -> frozenset:
    """Admissible normal form of an untwisted word, memoized on the word."""
    if len(word) <= 1:
        return frozenset([word])
    a = word[0]
    acc: Counter = Counter()
    for tail in _reduce(word[1:]):
        _toggle(acc, _left_multiply(a, tail))
    return frozenset(t for t, c in acc.items() if c)


@lru_cache(maxsize=None)
def _left_multiply(a: int, adm: tuple[int, ...]) -> frozenset:
    """Normal form of Sq^a * Sq^adm with adm admissible."""
    if not adm or a >= 2 * adm[0]:
        return frozenset([(a,) + adm])
    acc: Counter = Counter()
    for head in adem_relation(a, adm[0]):
        _toggle(acc, _reduce(head + adm[1:]))
    return frozenset(t for t, c in acc.items() if c)


def adem_reduce(w: SteenrodWord | Sequence[int]) -> SteenrodSum:
    """Rewrite a word as the unique F2-sum of admissible sequences.

    A twisted word reduces like the untwisted one and every surviving term
    keeps the twist: the final Bockstein letter only meets Adem relations
    through Sq^1 Sq^1 = 0, which kills the term.
    """
    if not isinstance(w, SteenrodWord):
        w = SteenrodWord(tuple(w))
    terms = _reduce(w.entries)
    return SteenrodSum(frozenset(AdmissibleSequence(t, w.twist) for t in terms))


def compose(*words: SteenrodWord) -> SteenrodWord:
    """Concatenate words left to right; only the last may carry a twist."""
    for w in words[:-1]:
        if w.twist is not None:
            raise ValueError("only the rightmost word may be twisted")
    entries = tuple(i for w in words for i in w.entries)
    return SteenrodWord(entries, words[-1].twist if words else None)


# -- Enumeration --------------------------------------------------------------

def admissible_sequences(max_degree: int, max_excess: int | None = None) -> Iterator[tuple[int, ...]]:
    """All admissible tuples of degree <= max_degree (and excess <= max_excess).

    Includes the empty tuple; output is sorted by (degree, entries).
    """
    found = []

    def extend(prefix: tuple[int, ...], budget: int):
        found.append(prefix)
        hi = budget if not prefix else min(budget, prefix[-1] // 2)
        for i in range(1, hi + 1):
            extend(prefix + (i,), budget - i)

    extend((), max_degree)
    if max_excess is not None:
        found = [s for s in found if excess(s) <= max_excess]
    found.sort(key=lambda s: (sum(s), s))
    return iter(found)


# -- Numerics of the gap sets -------------------------------------------------

def nu2(a: int) -> int:
    """Number of ones in the binary expansion of a positive integer."""
    if a < 1:
        raise ValueError("nu2 is defined on positive integers")
    return bin(a).count("1")


def in_gap_set(a: int, n: int) -> bool:
    """Membership of ``a`` in the set of odd integers with at least n+1 binary ones."""
    if a < 1 or n < 1:
        raise ValueError("in_gap_set expects a >= 1 and n >= 1")
    return a % 2 == 1 and nu2(a) >= n + 1


# -- Cartan formula -----------------------------------------------------------

def cartan_expand(k: int, factors: Sequence[Hashable]) -> frozenset:
    """Formal Sq^k of a product, distributed by the Cartan formula over F2.

    Each term is a sorted tuple of ``(factor, i)`` pairs standing for the
    product of Sq^i(factor); identical terms cancel in pairs, so a repeated
    factor produces the symmetric cancellations that give
    Sq^{2j}(x^2) = (Sq^j x)^2.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    factors = list(factors)
    acc: Counter = Counter()
    if not factors:
        if k == 0:
            acc[()] = 1
        return frozenset(t for t, c in acc.items() if c)

    def split(i: int, remaining: int, chosen: tuple):
        if i == len(factors) - 1:
            term = tuple(sorted(chosen + ((factors[i], remaining),), key=repr))
            acc[term] ^= 1
            return
        for j in range(remaining + 1):
            split(i + 1, remaining - j, chosen + ((factors[i], j),))

    split(0, k, ())
    return frozenset(t for t, c in acc.items() if c)


def format_cartan_term(term: tuple) -> str:
    parts = []
    for factor, i in term:
        parts.append(str(factor) if i == 0 else f"Sq{i}({factor})")
    return "*".join(parts) if parts else "1"


# -- Text form ----------------------------------------------------------------

_WORD_RE = re.compile(r"\s*(?:(1)|Sq\[(\s*\d+(?:\s*,\s*\d+)*)?\s*\](?:_s(\d+))?)\s*$")


def parse_word(text: str) -> SteenrodWord:
    """Parse ``Sq[i1,...,im]`` with optional ``_s<k>`` suffix, or ``1``."""
    m = _WORD_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse Steenrod word {text!r}")
    if m.group(1):
        return SteenrodWord(())
    body = m.group(2)
    entries = tuple(int(x) for x in body.split(",")) if body else ()
    twist = int(m.group(3)) if m.group(3) else None
    return SteenrodWord(entries, twist)
