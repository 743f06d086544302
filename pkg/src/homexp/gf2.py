"""GF(2) linear algebra on Python ints used as packed bit rows.

Bit ``i`` of a row is the coefficient of basis vector ``i``.  Every routine
here is dense elimination keyed by leading bit; the degree slices this
package works with are small enough that nothing fancier pays off.
"""

from __future__ import annotations

from typing import Iterable, Iterator


def bits(v: int) -> Iterator[int]:
    """Indices of the set bits of ``v``, lowest first."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def weight(v: int) -> int:
    return bin(v).count("1")


class Echelon:
    """Row-echelon basis grown one vector at a time.

    Each stored row carries an ``aux`` int that is XORed along during
    reduction.  Callers use it to track linear combinations (a bitmask over
    inserted vectors) or to carry the value of a linear map.
    """

    __slots__ = ("pivots",)

    def __init__(self, rows: Iterable[int] = ()):
        self.pivots: dict[int, tuple[int, int]] = {}
        for row in rows:
            self.add(row)

    def __len__(self) -> int:
        return len(self.pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def rows(self) -> list[int]:
        return [self.pivots[k][0] for k in sorted(self.pivots)]

    def reduce(self, v: int, aux: int = 0) -> tuple[int, int]:
        """Return ``(r, aux')`` with ``r`` the canonical coset representative.

        ``r`` has no bit at any pivot position, which makes it unique in
        ``v + span``.
        """
        pivots = self.pivots
        kept = 0
        while v:
            lead = v.bit_length() - 1
            hit = pivots.get(lead)
            if hit is None:
                kept |= 1 << lead
                v ^= 1 << lead
            else:
                v ^= hit[0]
                aux ^= hit[1]
        return kept, aux

    def add(self, v: int, aux: int = 0) -> tuple[int, int]:
        """Insert ``v``; returns the reduced vector and aux (zero vector if dependent)."""
        r, a = self.reduce(v, aux)
        if r:
            self.pivots[r.bit_length() - 1] = (r, a)
        return r, a

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def copy(self) -> "Echelon":
        e = Echelon()
        e.pivots = dict(self.pivots)
        return e


def rank(rows: Iterable[int]) -> int:
    return Echelon(rows).rank


def in_span(v: int, rows: Iterable[int]) -> bool:
    return Echelon(rows).contains(v)


def nullspace(rows: list[int]) -> list[int]:
    """Basis of ``{c : XOR of rows[i] for i in c = 0}`` as bitmasks over row indices."""
    ech = Echelon()
    kernel = []
    for i, row in enumerate(rows):
        r, combo = ech.add(row, 1 << i)
        if not r:
            kernel.append(combo)
    return kernel


def combine(rows: list[int], mask: int) -> int:
    out = 0
    for i in bits(mask):
        out ^= rows[i]
    return out


def intersection(us: list[int], vs: list[int]) -> list[int]:
    """Basis of span(us) ∩ span(vs)."""
    combos = nullspace(list(us) + list(vs))
    low = (1 << len(us)) - 1
    ech = Echelon()
    out = []
    for c in combos:
        w = combine(us, c & low)
        if ech.add(w)[0]:
            out.append(w)
    return out


def complement(rows: list[int], sub: list[int]) -> list[int]:
    """Vectors from ``rows`` extending a basis of span(sub) to span(sub + rows)."""
    ech = Echelon(sub)
    out = []
    for row in rows:
        if ech.add(row)[0]:
            out.append(row)
    return out


def same_span(us: list[int], vs: list[int]) -> bool:
    a = Echelon(us)
    return a.rank == rank(vs) and all(a.contains(v) for v in vs)
