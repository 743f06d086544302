"""Truncated graded-commutative algebras over F2 and their primitive Hopf structure.

Elements of a fixed degree are packed bit vectors over that degree's
monomial basis (see :mod:`homexp.gf2`).  Monomials are exponent tuples
indexed like ``algebra.generators``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import gf2


class ResourceError(RuntimeError):
    """A degree slice would exceed the configured monomial cap."""


@dataclass(frozen=True)
class AlgebraGenerator:
    name: str
    degree: int
    exterior: bool = False


@dataclass(frozen=True)
class Slice:
    """A basis of some subspace or quotient living in one degree."""

    degree: int
    basis: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


class TruncatedAlgebra:
    """Polynomial algebra on named generators (x^2 = 0 for exterior ones), through degree D."""

    def __init__(self, generators: Sequence[AlgebraGenerator], max_degree: int,
                 monomial_cap: int = 2_000_000):
        if max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        for g in generators:
            if g.degree <= 0:
                raise ValueError(f"generator {g.name} must have positive degree")
        self.generators = tuple(generators)
        self.max_degree = max_degree
        self.monomial_cap = monomial_cap
        self._names = {g.name: i for i, g in enumerate(self.generators)}
        if len(self._names) != len(self.generators):
            raise ValueError("generator names must be distinct")
        self._bases = self._enumerate()
        self._index = [{m: i for i, m in enumerate(b)} for b in self._bases]

    @classmethod
    def polynomial(cls, gens: Iterable[tuple], max_degree: int) -> "TruncatedAlgebra":
        """Convenience constructor from ``(name, degree[, exterior])`` tuples."""
        return cls([AlgebraGenerator(*g) for g in gens], max_degree)

    # -- bases ----------------------------------------------------------------

    def _enumerate(self) -> list[list[tuple[int, ...]]]:
        D = self.max_degree
        k = len(self.generators)
        # DP over generators keeps each degree's list sorted lexicographically
        layers: list[list[tuple[int, ...]]] = [[] for _ in range(D + 1)]
        layers[0].append(())
        for g in self.generators:
            top = 1 if g.exterior else D // g.degree
            new: list[list[tuple[int, ...]]] = [[] for _ in range(D + 1)]
            for d in range(D + 1):
                for mono in layers[d]:
                    for e in range(top + 1):
                        nd = d + e * g.degree
                        if nd > D:
                            break
                        new[nd].append(mono + (e,))
                        if len(new[nd]) > self.monomial_cap:
                            raise ResourceError(
                                f"more than {self.monomial_cap} monomials in degree {nd}")
            layers = new
        for d in range(D + 1):
            layers[d].sort()
        assert all(len(m) == k for layer in layers for m in layer)
        return layers

    def basis(self, a: int) -> list[tuple[int, ...]]:
        if not 0 <= a <= self.max_degree:
            raise ValueError(f"degree {a} outside 0..{self.max_degree}")
        return self._bases[a]

    def dim(self, a: int) -> int:
        if a < 0 or a > self.max_degree:
            return 0
        return len(self._bases[a])

    def dimensions(self) -> list[int]:
        return [len(b) for b in self._bases]

    def index(self, mono: tuple[int, ...]) -> int:
        return self._index[self.degree_of(mono)][mono]

    def degree_of(self, mono: tuple[int, ...]) -> int:
        return sum(e * g.degree for e, g in zip(mono, self.generators))

    def unit_vector(self, mono: tuple[int, ...]) -> int:
        return 1 << self.index(mono)

    def generator_monomial(self, i: int) -> tuple[int, ...]:
        m = [0] * len(self.generators)
        m[i] = 1
        return tuple(m)

    def generator_index(self, name: str) -> int:
        return self._names[name]

    def generator_vector(self, i: int) -> int:
        return self.unit_vector(self.generator_monomial(i))

    def one(self) -> int:
        return 1

    # -- arithmetic -------------------------------------------------------------

    def mono_mul(self, m1: tuple[int, ...], m2: tuple[int, ...]) -> tuple[int, ...] | None:
        out = tuple(a + b for a, b in zip(m1, m2))
        for e, g in zip(out, self.generators):
            if g.exterior and e > 1:
                return None
        return out

    def mul(self, a: int, x: int, b: int, y: int) -> int:
        """Product of a degree-a vector and a degree-b vector (degree a+b)."""
        if not x or not y:
            return 0
        if a + b > self.max_degree:
            raise ValueError(f"product lands in degree {a + b} > {self.max_degree}")
        ba, bb = self._bases[a], self._bases[b]
        idx = self._index[a + b]
        out = 0
        for i in gf2.bits(x):
            mi = ba[i]
            for j in gf2.bits(y):
                m = self.mono_mul(mi, bb[j])
                if m is not None:
                    out ^= 1 << idx[m]
        return out

    def frobenius(self, a: int, x: int) -> int:
        """x -> x^2 (additive over F2)."""
        if not x:
            return 0
        idx = self._index[2 * a] if 2 * a <= self.max_degree else None
        if idx is None:
            raise ValueError(f"square lands in degree {2 * a} > {self.max_degree}")
        out = 0
        for i in gf2.bits(x):
            m = self._bases[a][i]
            sq = self.mono_mul(m, m)
            if sq is not None:
                out ^= 1 << idx[sq]
        return out

    def power(self, a: int, x: int, k: int) -> int:
        out, deg = 1, 0
        for _ in range(k):
            out = self.mul(deg, out, a, x)
            deg += a
        return out

    def is_square(self, mono: tuple[int, ...]) -> bool:
        return all(e % 2 == 0 for e in mono)

    # -- text -------------------------------------------------------------------

    def format_monomial(self, mono: tuple[int, ...]) -> str:
        parts = []
        for e, g in zip(mono, self.generators):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    def format(self, a: int, x: int) -> str:
        if not x:
            return "0"
        terms = [self._bases[a][i] for i in gf2.bits(x)]
        terms.sort(reverse=True)
        return " + ".join(self.format_monomial(m) for m in terms)

    def parse_element(self, text: str) -> tuple[int, int]:
        """Parse a homogeneous polynomial in generator names; returns (degree, vector)."""
        return _ElementParser(self, text).parse()

    def atom(self, token: str) -> tuple[int, int]:
        """Hook for subclasses: value of a name token as (degree, vector)."""
        i = self._names.get(token)
        if i is None:
            raise ValueError(f"unknown generator {token!r}")
        return self.generators[i].degree, self.generator_vector(i)

    def atom_pattern(self) -> str:
        names = sorted(self._names, key=len, reverse=True)
        return "|".join(re.escape(n) for n in names) or r"(?!x)x"


class _ElementParser:
    """sum := term ('+' term)* ; term := factor ('*' factor)* ; factor := atom ('^' int)?"""

    def __init__(self, algebra: TruncatedAlgebra, text: str):
        self.alg = algebra
        self.text = text
        self.pos = 0
        self.atom_re = re.compile(r"\s*(" + algebra.atom_pattern() + r")")

    def error(self, msg: str):
        raise ValueError(f"{msg} at position {self.pos} in {self.text!r}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> tuple[int, int]:
        deg, vec = self.sum()
        if self.peek():
            self.error("unexpected input")
        return deg, vec

    def sum(self) -> tuple[int, int]:
        deg, vec = self.term()
        while self.peek() == "+":
            self.pos += 1
            d2, v2 = self.term()
            if not v2:
                continue
            if vec and d2 != deg:
                self.error("inhomogeneous sum")
            if not vec:
                deg = d2
            vec ^= v2
        return deg, vec

    def term(self) -> tuple[int, int]:
        deg, vec = self.factor()
        while self.peek() == "*":
            self.pos += 1
            d2, v2 = self.factor()
            vec = self.alg.mul(deg, vec, d2, v2) if (vec and v2) else 0
            deg += d2
        return deg, vec

    def factor(self) -> tuple[int, int]:
        self.skip()
        m = self.atom_re.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            deg, vec = self.alg.atom(m.group(1))
        elif self.peek() in ("0", "1"):
            deg, vec = 0, int(self.peek())
            self.pos += 1
        elif self.peek() == "(":
            self.pos += 1
            deg, vec = self._parenthesized()
        else:
            self.error("expected a generator")
        if self.peek() == "^":
            self.pos += 1
            m = re.compile(r"\s*(\d+)").match(self.text, self.pos)
            if not m:
                self.error("expected an exponent")
            self.pos = m.end()
            k = int(m.group(1))
            vec = self.alg.power(deg, vec, k)
            deg *= k
        return deg, vec

    def _parenthesized(self) -> tuple[int, int]:
        deg, vec = self.sum()
        if self.peek() != ")":
            self.error("expected ')'")
        self.pos += 1
        return deg, vec


# -- Hopf structure -----------------------------------------------------------

class HopfStructure:
    """The algebra with every listed generator primitive.

    Over F2, Δ(g^e) = Σ_k binom(e, k) g^k ⊗ g^(e-k), so the coproduct of a
    monomial is the sum of its factorisations m' ⊗ m'' with odd
    coefficient product.
    """

    def __init__(self, algebra: TruncatedAlgebra):
        self.algebra = algebra
        self._rows: dict[int, list[int]] = {}

    def split_terms(self, mono: tuple[int, ...]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """All (m', m'') with odd coefficient in Δ(mono), trivial splittings included."""
        out = [((), ())]
        for e in mono:
            nxt = []
            for k in range(e + 1):
                if (k & ~e) == 0:  # binom(e, k) odd
                    for left, right in out:
                        nxt.append((left + (k,), right + (e - k,)))
            out = nxt
        return out

    def reduced_coproduct_rows(self, a: int) -> list[int]:
        """Row i is Δ̄ of basis monomial i, packed over an index of tensor pairs."""
        rows = self._rows.get(a)
        if rows is not None:
            return rows
        alg = self.algebra
        zero = tuple(0 for _ in alg.generators)
        pair_index: dict = {}
        rows = []
        for mono in alg.basis(a):
            row = 0
            for left, right in self.split_terms(mono):
                if left == zero or right == zero:
                    continue
                key = (left, right)
                j = pair_index.setdefault(key, len(pair_index))
                row ^= 1 << j
            rows.append(row)
        self._rows[a] = rows
        return rows

    def coassociativity_holds(self, mono: tuple[int, ...]) -> bool:
        """(Δ⊗1)Δ = (1⊗Δ)Δ on one basis monomial."""
        from collections import Counter
        lhs: Counter = Counter()
        rhs: Counter = Counter()
        for left, right in self.split_terms(mono):
            for l1, l2 in self.split_terms(left):
                lhs[(l1, l2, right)] ^= 1
            for r1, r2 in self.split_terms(right):
                rhs[(left, r1, r2)] ^= 1
        return {k for k, v in lhs.items() if v} == {k for k, v in rhs.items() if v}


def decomposables(A: TruncatedAlgebra, a: int) -> list[int]:
    """Spanning vectors of the products of positive-degree elements in degree a."""
    rows = []
    for i, g in enumerate(A.generators):
        b = a - g.degree
        if b <= 0:
            continue
        gv = A.generator_vector(i)
        for j in range(A.dim(b)):
            p = A.mul(g.degree, gv, b, 1 << j)
            if p:
                rows.append(p)
    return rows


def indecomposables(A: TruncatedAlgebra, a: int) -> Slice:
    """Q^a: representatives of a basis of A^a modulo decomposables."""
    if a <= 0:
        return Slice(a, ())
    dec = decomposables(A, a)
    units = [1 << i for i in range(A.dim(a))]
    return Slice(a, tuple(gf2.complement(units, dec)))


def primitives(Hf: HopfStructure, a: int) -> Slice:
    """P^a: kernel of the reduced coproduct on the degree-a slice."""
    if a <= 0:
        return Slice(a, ())
    rows = Hf.reduced_coproduct_rows(a)
    return Slice(a, tuple(gf2.nullspace(rows)))


def frobenius_image(A: TruncatedAlgebra, a: int) -> list[int]:
    """Degree-a part of the image of x -> x^2."""
    if a % 2:
        return []
    half = a // 2
    ech = gf2.Echelon()
    out = []
    for j in range(A.dim(half)):
        v = A.frobenius(half, 1 << j)
        if v and ech.add(v)[0]:
            out.append(v)
    return out


@dataclass(frozen=True)
class MilnorMooreResult:
    degree: int
    exact: bool
    kernel: tuple[int, ...]  # ker(P^a -> Q^a)
    frobenius_primitives: tuple[int, ...]  # P(ξH)^a
    witness: int | None = None


def milnor_moore_check(Hf: HopfStructure, a: int) -> MilnorMooreResult:
    """Exactness of 0 -> P(ξH) -> PH -> QH in degree a."""
    A = Hf.algebra
    prim = list(primitives(Hf, a).basis)
    dec = decomposables(A, a) if a > 0 else []
    kernel = gf2.intersection(prim, dec)
    squares = frobenius_image(A, a)
    # ξH is a sub-Hopf algebra, so its primitives are P(H) ∩ ξH
    pxi = gf2.intersection(prim, squares)
    if gf2.same_span(kernel, pxi):
        return MilnorMooreResult(a, True, tuple(kernel), tuple(pxi))
    ech = gf2.Echelon(pxi)
    witness = next((k for k in kernel if not ech.contains(k)), None)
    if witness is None:
        witness = next(p for p in pxi if not gf2.in_span(p, kernel))
    return MilnorMooreResult(a, False, tuple(kernel), tuple(pxi), witness)
