"""Finite products of Eilenberg-Mac Lane spaces and Serre's bases for their mod-2 cohomology."""

from __future__ import annotations

import csv
import io
import re
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

from . import gf2
from .hopf import AlgebraGenerator, TruncatedAlgebra
from .steenrod import (
    AdmissibleSequence,
    SteenrodWord,
    adem_reduce,
    admissible_sequences,
    excess,
)

DEFAULT_DEGREE_CAP = 40
DEFAULT_MONOMIAL_CAP = 2_000_000


class SpaceParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class OddTorsionWarning(UserWarning):
    """Odd torsion was dropped: it is invisible to mod-2 cohomology."""


@dataclass(frozen=True)
class Group2Local:
    """Z^free_rank + sum of Z/2^s for s in torsion_exponents (odd part only flagged)."""

    free_rank: int = 0
    torsion_exponents: tuple[int, ...] = ()
    odd_part_present: bool = False

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        if any(s < 1 for s in self.torsion_exponents):
            raise ValueError("torsion exponents must be positive")
        object.__setattr__(self, "torsion_exponents", tuple(sorted(self.torsion_exponents)))

    @property
    def is_trivial(self) -> bool:
        """Trivial after 2-completion."""
        return self.free_rank == 0 and not self.torsion_exponents

    @property
    def has_2torsion(self) -> bool:
        return bool(self.torsion_exponents)

    def without_torsion(self) -> "Group2Local":
        return Group2Local(self.free_rank, (), self.odd_part_present)

    def __add__(self, other: "Group2Local") -> "Group2Local":
        return Group2Local(self.free_rank + other.free_rank,
                           self.torsion_exponents + other.torsion_exponents,
                           self.odd_part_present or other.odd_part_present)

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{2 ** s}" for s in self.torsion_exponents]
        return "+".join(parts) if parts else "0"


@dataclass(frozen=True)
class EmlSpace:
    factors: tuple[tuple[Group2Local, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((g, int(n)) for g, n in self.factors))
        for _, n in self.factors:
            if n < 1:
                raise ValueError(f"K(G,n) needs n >= 1, got {n}")

    def __str__(self) -> str:
        if not self.factors:
            return "pt"
        return " x ".join(f"K({g},{n})" for g, n in self.factors)

    def summands(self) -> list["Summand"]:
        out = []
        for f, (g, n) in enumerate(self.factors):
            for _ in range(g.free_rank):
                out.append(Summand(len(out), f, n, None))
            for s in g.torsion_exponents:
                out.append(Summand(len(out), f, n, s))
        return out

    @property
    def max_twist(self) -> int:
        return max((s for g, _ in self.factors for s in g.torsion_exponents), default=1)


@dataclass(frozen=True)
class Summand:
    """One cyclic 2-local summand of one factor: Z (twist_page None) or Z/2^s."""

    index: int
    factor: int
    n: int
    twist_page: int | None

    @property
    def group(self) -> str:
        return "Z" if self.twist_page is None else f"Z/{2 ** self.twist_page}"


# -- Parsing --------------------------------------------------------------------

class _SpaceParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.odd: list[str] = []

    def error(self, msg: str):
        raise SpaceParseError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, s: str):
        self.skip()
        if not self.text.startswith(s, self.pos):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def number(self) -> int:
        self.skip()
        m = re.compile(r"[+-]?\d+").match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def space(self) -> EmlSpace:
        self.skip()
        if self.text.strip() in ("", "pt", "*"):
            return EmlSpace(())
        factors = [self.factor()]
        while True:
            self.skip()
            if self.pos >= len(self.text):
                break
            self.expect("x")
            factors.append(self.factor())
        return EmlSpace(tuple(factors))

    def factor(self) -> tuple[Group2Local, int]:
        self.expect("K(")
        g = self.group()
        self.expect(",")
        start = self.pos
        n = self.number()
        if n <= 0:
            self.pos = start
            self.error(f"n must be positive, got {n}")
        self.expect(")")
        return g, n

    def group(self) -> Group2Local:
        g = self.term()
        while True:
            self.skip()
            if self.text.startswith("+", self.pos):
                self.pos += 1
                g = g + self.term()
            else:
                return g

    def term(self) -> Group2Local:
        self.skip()
        start = self.pos
        if self.text.startswith("0", self.pos):
            self.pos += 1
            return Group2Local()
        self.expect("Z")
        self.skip()
        if self.text.startswith("^", self.pos):
            self.pos += 1
            r = self.number()
            if r < 0:
                self.error("rank must be non-negative")
            return Group2Local(free_rank=r)
        if self.text.startswith("/", self.pos):
            self.pos += 1
            self.skip()
            m = re.compile(r"2\s*\^\s*(\d+)").match(self.text, self.pos)
            if m:
                self.pos = m.end()
                s = int(m.group(1))
                if s < 1:
                    self.error("Z/2^s needs s >= 1")
                return Group2Local(torsion_exponents=(s,))
            order = self.number()
            if order < 2:
                self.error("cyclic group order must be at least 2")
            s = 0
            while order % 2 == 0:
                order //= 2
                s += 1
            if order > 1:
                self.odd.append(self.text[start:self.pos].strip())
            return Group2Local(torsion_exponents=(s,) if s else (), odd_part_present=order > 1)
        return Group2Local(free_rank=1)


def parse_group(text: str) -> Group2Local:
    p = _SpaceParser(text)
    g = p.group()
    p.skip()
    if p.pos != len(text):
        p.error("unexpected input")
    _warn_odd(p.odd)
    return g


def parse_space(text: str) -> EmlSpace:
    """Parse ``K(G,n) x K(G',n') ...``; G is a '+'-sum of Z, Z^r, Z/2^s, Z/m."""
    p = _SpaceParser(text)
    space = p.space()
    _warn_odd(p.odd)
    return space


def _warn_odd(odd: list[str]) -> None:
    if odd:
        warnings.warn(f"odd torsion dropped from mod-2 computations: {', '.join(odd)}",
                      OddTorsionWarning, stacklevel=3)


# -- Serre generators -----------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    name: str
    word: SteenrodWord
    summand: Summand
    degree: int
    exterior: bool = False

    @property
    def twist_page(self) -> int | None:
        return self.summand.twist_page


@dataclass
class GeneratorTable:
    space: EmlSpace
    max_degree: int
    generators: list[Generator] = field(default_factory=list)

    def degrees(self) -> list[int]:
        return [g.degree for g in self.generators]

    def by_degree(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for g in self.generators:
            counts[g.degree] = counts.get(g.degree, 0) + 1
        return dict(sorted(counts.items()))

    def to_json(self) -> dict:
        return {
            "space": str(self.space),
            "max_degree": self.max_degree,
            "generators": [
                {
                    "name": g.name,
                    "sequence": list(g.word.entries),
                    "twist": g.word.twist,
                    "degree": g.degree,
                    "summand": g.summand.index,
                    "group": g.summand.group,
                    "n": g.summand.n,
                    "twist_page": g.summand.twist_page,
                    "exterior": g.exterior,
                }
                for g in self.generators
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "count"])
        for d, c in self.by_degree().items():
            w.writerow([d, c])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"# Serre generators of {self.space} through degree {self.max_degree}"]
        for g in self.generators:
            kind = " (exterior)" if g.exterior else ""
            lines.append(f"{g.degree:4d}  {g.name}{kind}")
        return "\n".join(lines) + "\n"


def fundamental_label(space: EmlSpace, summand: Summand) -> str:
    label = f"u{summand.n}"
    if len(space.summands()) > 1:
        label += f".{summand.index}"
    return label


def _generator_name(word: SteenrodWord, label: str) -> str:
    return label if not word.entries else f"{word}{label}"


def serre_generators(space: EmlSpace, D: int) -> GeneratorTable:
    """Polynomial (or, for n = 1, exterior) generators of H^*(space; F2) through degree D."""
    if D < 1:
        raise ValueError("degree bound must be at least 1")
    table = GeneratorTable(space, D)
    gens = []
    for sm in space.summands():
        label = fundamental_label(space, sm)
        n, s = sm.n, sm.twist_page
        if n == 1:
            # classical low-dimensional cases; the polynomial theorem needs care here
            if s == 1:
                gens.append(Generator(label, SteenrodWord(()), sm, 1))
            else:
                gens.append(Generator(label, SteenrodWord(()), sm, 1, exterior=True))
                if s is not None and D >= 2:
                    w = SteenrodWord((1,), s)
                    gens.append(Generator(_generator_name(w, label), w, sm, 2))
            continue
        for seq in admissible_sequences(D - n, max_excess=n - 1):
            if s is None and seq and seq[-1] == 1:
                continue
            twist = s if (s is not None and s >= 2 and seq and seq[-1] == 1) else None
            w = AdmissibleSequence(seq, twist)
            gens.append(Generator(_generator_name(w, label), w, sm, n + sum(seq)))
    gens = [g for g in gens if g.degree <= D]
    gens.sort(key=lambda g: (g.degree, g.summand.index, g.word.entries))
    table.generators = gens
    return table


def poincare_series(space: EmlSpace, D: int) -> list[int]:
    """Coefficients p_0..p_D of the product of 1/(1-t^d) (or 1+t^d for exterior) over generators."""
    series = [1] + [0] * D
    if D < 1:
        return series
    for g in serre_generators(space, D).generators:
        d = g.degree
        if g.exterior:
            for a in range(D, d - 1, -1):
                series[a] += series[a - d]
        else:
            for a in range(d, D + 1):
                series[a] += series[a - d]
    return series


def multiply_series(p: list[int], q: list[int]) -> list[int]:
    D = min(len(p), len(q)) - 1
    return [sum(p[i] * q[a - i] for i in range(a + 1)) for a in range(D + 1)]


# -- Symbolic evaluation ------------------------------------------------------------

def unstable_value(entries: tuple[int, ...], n: int, twist_page: int | None,
                   twisted: bool = False) -> tuple[tuple[int, ...], int] | None:
    """Sq^entries u_n for admissible ``entries``, without building any algebra.

    Returns ``(generator_entries, k)`` meaning the Serre generator
    Sq^{generator_entries} u_n raised to the power 2^k, or None for zero.
    ``twisted`` marks a word whose last letter is the higher Bockstein of a
    Z/2^s summand (ignored when s = 1).
    """
    s = twist_page
    if twisted and s is None:
        raise ValueError("a twisted word needs a Z/2^s summand")
    if twisted and s == 1:
        twisted = False
    k = 0
    while True:
        if not entries:
            return (), k
        if not twisted and entries[-1] == 1 and (s is None or s >= 2):
            return None
        if twisted and entries == (1,):
            return entries, k
        e = excess(entries)
        if e > n:
            return None
        if e < n:
            return entries, k
        entries, k = entries[1:], k + 1


def evaluate_word(word: SteenrodWord, n: int, twist_page: int | None) -> set[tuple[tuple[int, ...], int]]:
    """Adem-reduce ``word`` and evaluate on u_n; a set of (generator, k) terms, XOR-combined."""
    out: set = set()
    for term in adem_reduce(word):
        v = unstable_value(term.entries, n, twist_page, term.twist is not None)
        if v is not None:
            out ^= {v}
    return out


# -- Ambient algebra with Steenrod action -----------------------------------------

class CohomologyAlgebra(TruncatedAlgebra):
    """The truncated algebra of a space, together with the action of the squares."""

    def __init__(self, table: GeneratorTable, monomial_cap: int = DEFAULT_MONOMIAL_CAP):
        self.table = table
        self.space = table.space
        self.summands = self.space.summands()
        super().__init__(
            [AlgebraGenerator(g.name, g.degree, g.exterior) for g in table.generators],
            table.max_degree, monomial_cap)
        self._lookup = {(g.summand.index, g.word.entries, g.word.twist): i
                        for i, g in enumerate(table.generators)}
        self._labels = {fundamental_label(self.space, sm): sm for sm in self.summands}
        self._sq_gen: dict = {}
        self._sq_mono: dict = {}
        self.evaluate = lru_cache(maxsize=None)(self._evaluate)

    def fundamental_vector(self, sm: Summand) -> int:
        return self.generator_vector(self._lookup[(sm.index, (), None)])

    def twisted_bockstein_vector(self, sm: Summand) -> int:
        return self.generator_vector(self._lookup[(sm.index, (1,), sm.twist_page)])

    # -- evaluation of admissible sequences on fundamental classes ---------------

    def _evaluate(self, entries: tuple[int, ...], twist: int | None, summand: int) -> int:
        """Sq^entries (twisted by ``twist``) applied to the fundamental class of a summand."""
        sm = self.summands[summand]
        n, s = sm.n, sm.twist_page
        degree = n + sum(entries)
        if degree > self.max_degree:
            raise ValueError(f"degree {degree} beyond truncation {self.max_degree}")
        if twist is not None:
            if s is None:
                raise ValueError("a twisted Bockstein needs a Z/2^s summand")
            if twist != s:
                raise ValueError(f"twist _s{twist} does not match summand Z/{2 ** s}")
            if s == 1:
                twist = None
        if not entries:
            return self.fundamental_vector(sm)
        if twist is None and entries[-1] == 1 and (s is None or s >= 2):
            # Sq^1 kills the reduction of an integral (or mod 2^s, s >= 2) class
            return 0
        if twist is not None and entries == (1,):
            return self.twisted_bockstein_vector(sm)
        e = excess(entries)
        if e > n:
            return 0
        if e == n:
            inner = self.evaluate(entries[1:], twist, summand)
            return self.frobenius(entries[0], inner)
        key = (sm.index, entries, twist)
        if key not in self._lookup:
            raise KeyError(f"no generator {SteenrodWord(entries, twist)} on summand {summand}")
        return self.generator_vector(self._lookup[key])

    def apply_word(self, word: SteenrodWord, summand: int) -> tuple[int, int]:
        """Normalize ``word`` by Adem relations and apply it to the fundamental class."""
        sm = self.summands[summand]
        degree = sm.n + word.degree
        out = 0
        for term in adem_reduce(word):
            out ^= self.evaluate(term.entries, term.twist, summand)
        return degree, out

    # -- the action on arbitrary elements ----------------------------------------

    def sq_generator(self, k: int, i: int) -> int:
        key = (k, i)
        hit = self._sq_gen.get(key)
        if hit is None:
            g = self.table.generators[i]
            if k == 0:
                hit = self.generator_vector(i)
            else:
                w = SteenrodWord((k,) + g.word.entries, g.word.twist)
                hit = self.apply_word(w, g.summand.index)[1]
            self._sq_gen[key] = hit
        return hit

    def sq_monomial(self, k: int, mono: tuple[int, ...]) -> int:
        """Sq^k of a basis monomial, by the Cartan formula."""
        key = (k, mono)
        hit = self._sq_mono.get(key)
        if hit is not None:
            return hit
        deg = self.degree_of(mono)
        if k == 0:
            out = self.unit_vector(mono)
        elif k > deg:
            out = 0
        elif deg + k > self.max_degree:
            raise ValueError(f"Sq^{k} lands in degree {deg + k} > {self.max_degree}")
        elif k == deg:
            out = self.frobenius(deg, self.unit_vector(mono))
        elif any(mono) and all(e % 2 == 0 for e in mono):
            # Sq^k(y^2) = (Sq^{k/2} y)^2, zero for odd k
            root = tuple(e // 2 for e in mono)
            out = 0 if k % 2 else self.frobenius(deg // 2 + k // 2, self.sq_monomial(k // 2, root))
        else:
            i = next(j for j, e in enumerate(mono) if e)
            rest = list(mono)
            rest[i] -= 1
            rest = tuple(rest)
            gdeg = self.generators[i].degree
            rdeg = deg - gdeg
            out = 0
            for a in range(0, min(k, gdeg) + 1):
                b = k - a
                if b > rdeg:
                    continue
                left = self.sq_generator(a, i)
                right = self.sq_monomial(b, rest)
                if left and right:
                    out ^= self.mul(gdeg + a, left, rdeg + b, right)
        self._sq_mono[key] = out
        return out

    def sq(self, k: int, a: int, x: int) -> int:
        """Sq^k on a degree-a vector."""
        out = 0
        basis = self.basis(a)
        for i in gf2.bits(x):
            out ^= self.sq_monomial(k, basis[i])
        return out

    def bockstein(self, a: int, x: int) -> int:
        return self.sq(1, a, x)

    # -- element syntax ------------------------------------------------------------

    def atom_pattern(self) -> str:
        return r"(?:Sq\[\d+(?:,\d+)*\](?:_s\d+)?)*u\d+(?:\.\d+)?"

    def atom(self, token: str) -> tuple[int, int]:
        m = re.fullmatch(r"((?:Sq\[\d+(?:,\d+)*\](?:_s\d+)?)*)(u\d+(?:\.\d+)?)", token)
        if not m or m.group(2) not in self._labels:
            raise ValueError(f"unknown class {token!r}; fundamental classes: {sorted(self._labels)}")
        sm = self._labels[m.group(2)]
        words = re.findall(r"Sq\[([\d,]+)\](?:_s(\d+))?", m.group(1))
        entries: tuple[int, ...] = ()
        twist = None
        for k, (body, tw) in enumerate(words):
            if tw and k != len(words) - 1:
                raise ValueError(f"only the last word may be twisted in {token!r}")
            entries += tuple(int(x) for x in body.split(","))
            twist = int(tw) if tw else None
        if twist is not None and sm.twist_page == 1 and twist == 1:
            twist = None
        word = SteenrodWord(entries, twist)
        return self.apply_word(word, sm.index)


def ambient_algebra(space: EmlSpace, D: int, monomial_cap: int = DEFAULT_MONOMIAL_CAP) -> CohomologyAlgebra:
    """Polynomial algebra on the Serre generators, bases per degree <= D."""
    return CohomologyAlgebra(serre_generators(space, D), monomial_cap)
