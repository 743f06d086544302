"""The mod-2 Bockstein spectral sequence of a product of Eilenberg-Mac Lane spaces.

Pages are stored degree by degree as subquotients of the ambient algebra B_1:
a relation space (everything killed so far) plus class representatives that
are canonical modulo it.  d_1 is Sq^1.  Later differentials are not computed
from chain-level data.  A small set of rules pins them down: Browder's
squaring formula and the Leibniz rule do most of the work, with the higher
Bockstein of each twisted fundamental class and the permanence of integral
classes filling in the rest.  Every application is cross-checked for
consistency.  Classes that no rule reaches are logged as
rule gaps and given d = 0.

To keep every degree <= D exact, the ambient algebra is built to
D + r_max - 1; page r is then exact through D + r_max - r.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

from . import gf2
from .eml import CohomologyAlgebra, EmlSpace, ambient_algebra, parse_space, DEFAULT_MONOMIAL_CAP

log = logging.getLogger(__name__)


class InconsistencyError(RuntimeError):
    """A differential rule produced contradictory data (d∘d != 0, a non-cycle, ...)."""


class HorizonError(ValueError):
    """The degree bound is too small for the requested computation."""


@dataclass
class RuleGap:
    page: int
    degree: int
    representative: str


@dataclass
class DegreeData:
    """One degree of one page."""

    boundary: gf2.Echelon
    reps: list[int]
    d: list[int] | None = None
    rules: list[str] | None = None
    _coords: gf2.Echelon | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinate_echelon(self) -> gf2.Echelon:
        if self._coords is None:
            ech = self.boundary.copy()
            for i, v in enumerate(self.reps):
                if not ech.add(v, 1 << i)[0]:
                    raise InconsistencyError("class representatives are dependent modulo the boundary")
            self._coords = ech
        return self._coords


class BssPage:
    """Page r of the sequence, exact in degrees 0..top."""

    def __init__(self, r: int, algebra: CohomologyAlgebra, top: int, degrees: list[DegreeData]):
        self.r = r
        self.algebra = algebra
        self.top = top
        self.degrees = degrees
        self.gaps: list[RuleGap] = []

    def dim(self, a: int) -> int:
        return self.degrees[a].dim if 0 <= a <= self.top else 0

    def dimensions(self) -> list[int]:
        return [d.dim for d in self.degrees]

    def d_known(self, a: int) -> bool:
        return 0 <= a <= self.top and self.degrees[a].d is not None

    def coords(self, a: int, v: int) -> int | None:
        """Coordinates of v in the class basis, or None when v is not a cycle on this page."""
        kept, c = self.degrees[a].coordinate_echelon().reduce(v)
        return None if kept else c

    def is_class(self, a: int, v: int) -> bool:
        return self.coords(a, v) is not None

    def is_zero_class(self, a: int, v: int) -> bool:
        return self.degrees[a].boundary.contains(v)

    def canonical(self, a: int, v: int) -> int:
        return self.degrees[a].boundary.reduce(v)[0]

    def differential(self, a: int, v: int) -> int:
        """d_r of a degree-a cycle, canonical modulo the degree-(a+1) boundary."""
        deg = self.degrees[a]
        if deg.d is None:
            raise HorizonError(f"d_{self.r} in degree {a} lies beyond the horizon (top {self.top})")
        c = self.coords(a, v)
        if c is None:
            raise InconsistencyError(
                f"{self.algebra.format(a, v)} is not a cycle on page {self.r}")
        return gf2.combine(deg.d, c)

    def rank(self, a: int) -> int:
        deg = self.degrees[a] if 0 <= a <= self.top else None
        if deg is None or deg.d is None:
            return 0
        return gf2.rank(deg.d)

    def class_basis(self, a: int) -> list[str]:
        return [self.algebra.format(a, v) for v in self.degrees[a].reps]


# -- construction ------------------------------------------------------------------

def page1(algebra: CohomologyAlgebra, top: int | None = None) -> BssPage:
    """B_1 is the whole algebra; d_1 = Sq^1."""
    top = algebra.max_degree if top is None else top
    degrees = []
    for a in range(top + 1):
        n = algebra.dim(a)
        reps = [1 << i for i in range(n)]
        deg = DegreeData(gf2.Echelon(), reps)
        if a + 1 <= top:
            deg.d = [algebra.sq(1, a, v) for v in reps]
            deg.rules = ["Sq1"] * n
        degrees.append(deg)
    return BssPage(1, algebra, top, degrees)


def turn_page(page: BssPage) -> BssPage:
    """Homology of (B_r, d_r) in each degree where it is exact.  Differentials are left empty."""
    r, top = page.r, page.top - 1
    if top < 0:
        raise HorizonError("no degree survives to the next page")
    degrees = []
    for a in range(top + 1):
        cur = page.degrees[a]
        boundary = cur.boundary.copy()
        if a >= 1:
            for v in page.degrees[a - 1].d:
                boundary.add(v)
        kernel = gf2.nullspace(cur.d)
        ech = boundary.copy()
        reps = []
        for combo in kernel:
            v = gf2.combine(cur.reps, combo)
            red = ech.reduce(v)[0]
            if red:
                ech.add(red)
                reps.append(red)
        # keep representatives canonical modulo the final relation space
        reps = [boundary.reduce(v)[0] for v in reps]
        expected = len(kernel) - (gf2.rank(page.degrees[a - 1].d) if a >= 1 else 0)
        if len(reps) != expected:
            raise InconsistencyError(
                f"rank-nullity fails on page {r + 1} degree {a}: {len(reps)} != {expected}")
        degrees.append(DegreeData(boundary, reps))
    return BssPage(r + 1, page.algebra, top, degrees)


class _Solver:
    """Collects (class, d value) pairs in one degree and checks them against each other."""

    def __init__(self, page: BssPage, a: int):
        self.page = page
        self.a = a
        self.deg = page.degrees[a]
        self.ech = self.deg.boundary.copy()
        self.full = self.ech.rank + self.deg.dim
        self.rule_of: dict[int, str] = {}

    @property
    def done(self) -> bool:
        return self.ech.rank >= self.full

    def offer(self, v: int, dv: int, rule: str) -> None:
        page, a = self.page, self.a
        A = page.algebra
        if not page.is_class(a, v):
            raise InconsistencyError(
                f"rule {rule}: {A.format(a, v)} is not a cycle on page {page.r}")
        if not page.is_class(a + 1, dv):
            raise InconsistencyError(
                f"rule {rule}: value {A.format(a + 1, dv)} for d_{page.r}({A.format(a, v)}) "
                f"is not a class on page {page.r}")
        dv = page.canonical(a + 1, dv)
        kept, acc = self.ech.add(v, dv)
        if kept:
            self.rule_of[kept.bit_length() - 1] = rule
        elif acc:
            raise InconsistencyError(
                f"rule {rule} on page {page.r}: d({A.format(a, v)}) = {A.format(a + 1, dv)} "
                f"contradicts earlier rules by {A.format(a + 1, acc)}")

    def finish(self) -> tuple[list[int], list[str], list[int]]:
        gaps = []
        for v in self.deg.reps:
            kept, _ = self.ech.reduce(v)
            if kept:
                self.ech.add(kept, 0)
                self.rule_of[kept.bit_length() - 1] = "gap"
                gaps.append(v)
        values, rules = [], []
        for v in self.deg.reps:
            kept, dv = self.ech.reduce(v)
            assert not kept
            values.append(dv)
            used = {self.rule_of.get(p) for p in gf2.bits(v) if p in self.rule_of}
            rules.append("+".join(sorted(x for x in used if x)) or "relation")
        return values, rules, gaps


def populate_differential(page: BssPage, prev: BssPage, space: EmlSpace) -> None:
    """Fill in d_r on page r >= 2 from the rule set."""
    A = page.algebra
    r = page.r
    summands = A.summands
    for a in range(page.top):
        deg = page.degrees[a]
        if not deg.reps:
            deg.d, deg.rules = [], []
            continue
        if not page.degrees[a + 1].reps:
            deg.d = [0] * deg.dim
            deg.rules = ["degree"] * deg.dim
            continue
        solver = _Solver(page, a)
        if a == 0:
            solver.offer(A.one(), 0, "unit")
        # d_r d_r = 0: anything hit from degree a-1 is a cycle
        if a >= 1:
            for v in page.degrees[a - 1].d:
                if v:
                    solver.offer(v, 0, "image")
        for sm in summands:
            s = sm.twist_page
            if sm.n == a:
                u = A.fundamental_vector(sm)
                if s is None:
                    solver.offer(u, 0, "integral")
                elif s >= 2 and r < s:
                    solver.offer(u, 0, "twisted")
                elif s >= 2 and r == s:
                    solver.offer(u, A.twisted_bockstein_vector(sm), "twisted")
            if s is not None and s >= 2 and sm.n + 1 == a and A.max_degree >= a:
                solver.offer(A.twisted_bockstein_vector(sm), 0, "integral")
        if a % 4 == 0 and a >= 4:
            _offer_browder(solver, page, prev, a // 2)
        if not solver.done:
            _offer_products(solver, page, a)
        values, rules, gaps = solver.finish()
        deg.d, deg.rules = values, rules
        for v in gaps:
            g = RuleGap(r, a, A.format(a, v))
            page.gaps.append(g)
            log.warning("rule gap on page %d degree %d: %s", r, a, g.representative)


def _offer_browder(solver: _Solver, page: BssPage, prev: BssPage, q: int) -> None:
    """d_{r+1}(x^2) = x d_r x, plus Sq^q Sq^1 x when r = 1, for x of even degree q."""
    A = page.algebra
    for x in prev.degrees[q].reps:
        dx = prev.differential(q, x)
        value = A.mul(q, x, q + 1, dx) if dx else 0
        if prev.r == 1 and dx:
            value ^= A.sq(q, q + 1, dx)
        solver.offer(A.frobenius(q, x), value, "browder")
        if solver.done:
            return


def _offer_products(solver: _Solver, page: BssPage, a: int) -> None:
    A = page.algebra
    for b in range(1, a // 2 + 1):
        c = a - b
        xs, ys = page.degrees[b], page.degrees[c]
        for i, x in enumerate(xs.reps):
            for j, y in enumerate(ys.reps):
                if b == c and j < i:
                    continue
                v = A.mul(b, x, c, y)
                if not v:
                    continue
                dv = A.mul(b + 1, xs.d[i], c, y) ^ A.mul(b, x, c + 1, ys.d[j])
                solver.offer(v, dv, "leibniz")
                if solver.done:
                    return


# -- the spectral sequence -----------------------------------------------------------

class BocksteinSpectralSequence:
    """Pages 1..r_max of a space, exact in degrees <= D."""

    def __init__(self, space: EmlSpace | str, D: int, r_max: int,
                 monomial_cap: int = DEFAULT_MONOMIAL_CAP, progress=None):
        if isinstance(space, str):
            space = parse_space(space)
        if D < 1 or r_max < 1:
            raise ValueError("D and r_max must be positive")
        self.space = space
        self.D = D
        self.r_max = r_max
        self.algebra = ambient_algebra(space, D + r_max - 1, monomial_cap)
        self.pages: list[BssPage] = [page1(self.algebra)]
        self._progress = progress

    def page(self, r: int) -> BssPage:
        if not 1 <= r <= self.r_max:
            raise HorizonError(f"page {r} outside 1..{self.r_max}")
        while len(self.pages) < r:
            prev = self.pages[-1]
            if self._progress:
                self._progress(f"computing page {prev.r + 1} of {self.space}")
            nxt = turn_page(prev)
            populate_differential(nxt, prev, self.space)
            self.pages.append(nxt)
        return self.pages[r - 1]

    def all_pages(self) -> list[BssPage]:
        return [self.page(r) for r in range(1, self.r_max + 1)]

    @property
    def gaps(self) -> list[RuleGap]:
        return [g for p in self.pages for g in p.gaps]

    def page_dimensions(self) -> dict[int, list[int]]:
        return {p.r: p.dimensions()[: self.D + 1] for p in self.all_pages()}

    def audit(self, products: bool = True) -> "AuditReport":
        rep = AuditReport(self.D, self.r_max)
        for p in self.all_pages():
            rep.d_squared += audit_d_squared(p)
            if products:
                rep.leibniz += audit_leibniz(p)
            rep.pages += 1
        rep.gaps = list(self.gaps)
        return rep


@dataclass
class AuditReport:
    D: int
    r_max: int
    pages: int = 0
    d_squared: list[tuple[int, int, str]] = field(default_factory=list)
    leibniz: list[tuple[int, int, int, str]] = field(default_factory=list)
    gaps: list[RuleGap] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.d_squared and not self.leibniz


def audit_d_squared(page: BssPage) -> list[tuple[int, int, str]]:
    """(page, degree, class) for every class with d(dx) != 0."""
    bad = []
    for a in range(page.top - 1):
        deg = page.degrees[a]
        if deg.d is None or page.degrees[a + 1].d is None:
            continue
        for x, dx in zip(deg.reps, deg.d):
            if page.canonical(a + 2, page.differential(a + 1, dx)):
                bad.append((page.r, a, page.algebra.format(a, x)))
    return bad


def audit_leibniz(page: BssPage) -> list[tuple[int, int, int, str]]:
    """Check d(xy) = dx y + x dy on every pair of basis classes with |x|+|y| < top."""
    A = page.algebra
    bad = []
    for b in range(1, page.top):
        for c in range(b, page.top - b):
            xs, ys = page.degrees[b], page.degrees[c]
            if xs.d is None or ys.d is None or page.degrees[b + c].d is None:
                continue
            for i, x in enumerate(xs.reps):
                for j, y in enumerate(ys.reps):
                    if b == c and j < i:
                        continue
                    v = A.mul(b, x, c, y)
                    expect = A.mul(b + 1, xs.d[i], c, y) ^ A.mul(b, x, c + 1, ys.d[j])
                    got = page.differential(b + c, v)
                    if page.canonical(b + c + 1, got ^ expect):
                        bad.append((page.r, b, c, f"{A.format(b, x)} * {A.format(c, y)}"))
    return bad


# -- torsion ---------------------------------------------------------------------------

@dataclass
class TorsionReport:
    space: str
    D: int
    r_max: int
    entries: list[tuple[int, int, int]]

    def exponents(self) -> set[int]:
        return {r for _, r, _ in self.entries}

    def at_degree(self, degree: int) -> list[tuple[int, int, int]]:
        return [e for e in self.entries if e[0] == degree]

    def to_json(self) -> dict:
        return {
            "space": self.space,
            "max_degree": self.D,
            "r_max": self.r_max,
            "entries": [{"degree": a, "exponent": r, "multiplicity": m} for a, r, m in self.entries],
            "note": f"exact in degrees <= {self.D}; torsion of order above 2^{self.r_max} is not seen",
        }

    def to_csv(self) -> str:
        rows = ["degree,exponent,multiplicity"]
        rows += [f"{a},{r},{m}" for a, r, m in self.entries]
        return "\n".join(rows) + "\n"

    def to_text(self) -> str:
        lines = [f"# integral 2-torsion of {self.space}, degrees <= {self.D}, pages <= {self.r_max}"]
        lines += [f"H^{a}: {m} x Z/{2 ** r}" for a, r, m in self.entries]
        return "\n".join(lines) + "\n"


def torsion_report(ss: BocksteinSpectralSequence) -> TorsionReport:
    entries = []
    for p in ss.all_pages():
        for a in range(min(p.top, ss.D)):
            m = p.rank(a)
            if m:
                entries.append((a + 1, p.r, m))
    entries.sort()
    return TorsionReport(str(ss.space), ss.D, ss.r_max, entries)


# -- transversality ---------------------------------------------------------------------

@dataclass
class TrailStep:
    l: int
    page: int
    element: str
    differential: str

    def to_json(self) -> dict:
        return {"l": self.l, "page": self.page, "element": self.element, "differential": self.differential}


@dataclass
class Certificate:
    element: str
    degree: int
    checked_up_to: int
    trail: list[TrailStep]
    D: int
    r_max: int

    refuted = False

    def to_json(self) -> dict:
        return {"result": "certificate", "element": self.element, "degree": self.degree,
                "checked_up_to": self.checked_up_to, "max_degree": self.D, "r_max": self.r_max,
                "trail": [s.to_json() for s in self.trail]}


@dataclass
class Refutation:
    element: str
    degree: int
    failed_at: int
    reason: str
    trail: list[TrailStep]
    D: int
    r_max: int

    refuted = True

    def to_json(self) -> dict:
        return {"result": "refutation", "element": self.element, "degree": self.degree,
                "failed_at": self.failed_at, "reason": self.reason, "max_degree": self.D,
                "r_max": self.r_max, "trail": [s.to_json() for s in self.trail]}


def transverse_r_max(space: EmlSpace, l_max: int) -> int:
    return space.max_twist + 1 + l_max


def check_transverse(space: EmlSpace | str, element: str, l_max: int, D: int,
                     ss: BocksteinSpectralSequence | None = None) -> Certificate | Refutation:
    """Track x, x^2, x^4, ... through the pages.

    The first page r with d_r x != 0 is located; then x^(2^l) must be a
    nonzero class on page r+l with nonzero differential, for l <= l_max.
    """
    if isinstance(space, str):
        space = parse_space(space)
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    if ss is None:
        ss = BocksteinSpectralSequence(space, D, transverse_r_max(space, l_max))
    A = ss.algebra
    deg, x = A.parse_element(element)
    if deg < 1:
        raise ValueError("element must have positive degree")
    if (2 ** l_max) * deg + 1 > ss.D:
        raise HorizonError(
            f"need 2^{l_max}*{deg}+1 = {2 ** l_max * deg + 1} <= D, got D={ss.D}")
    label = A.format(deg, x)
    trail: list[TrailStep] = []

    def refute(l, why):
        return Refutation(label, deg, l, why, trail, ss.D, ss.r_max)

    start = None
    for r in range(1, ss.r_max - l_max + 1):
        p = ss.page(r)
        if not p.is_class(deg, x):
            return refute(0, f"not a cycle on page {r}")
        if p.is_zero_class(deg, x):
            return refute(0, f"zero on page {r}")
        dx = p.differential(deg, x)
        if dx:
            start = r
            trail.append(TrailStep(0, r, label, A.format(deg + 1, dx)))
            break
    if start is None:
        return refute(0, f"d_r vanishes for every r <= {ss.r_max - l_max}")
    y, ydeg = x, deg
    for l in range(1, l_max + 1):
        y, ydeg = A.frobenius(ydeg, y), 2 * ydeg
        p = ss.page(start + l)
        name = f"({label})^{2 ** l}"
        if not p.is_class(ydeg, y):
            return refute(l, f"{name} is not a cycle on page {p.r}")
        if p.is_zero_class(ydeg, y):
            return refute(l, f"{name} is zero on page {p.r}")
        dy = p.differential(ydeg, y)
        if not dy:
            return refute(l, f"d_{p.r} {name} = 0")
        trail.append(TrailStep(l, p.r, name, A.format(ydeg + 1, dy)))
    return Certificate(label, deg, l_max, trail, ss.D, ss.r_max)


def horizon_l(deg: int, D: int) -> int:
    """Largest l with 2^l deg + 1 <= D (or -1)."""
    l = -1
    while (2 ** (l + 1)) * deg + 1 <= D:
        l += 1
    return l


# -- exponent scan -----------------------------------------------------------------------

@dataclass
class ScanVerdict:
    space: str
    D: int
    r_max: int
    bounded: bool
    exponent: int | None
    certificate: Certificate | None = None
    tried: list[str] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return f"bounded-at-2^{self.exponent}" if self.bounded else "unbounded-evidence"

    def to_json(self) -> dict:
        out = {"space": self.space, "max_degree": self.D, "r_max": self.r_max,
               "verdict": self.kind, "bounded": self.bounded, "exponent": self.exponent,
               "tried": self.tried}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.bounded:
            out["qualifier"] = f"within horizon D={self.D}"
        return out


def transverse_candidates(ss: BocksteinSpectralSequence) -> Iterator[str]:
    """Fundamental classes of Z/2^s in even degree, then even-degree generators with d_1 != 0."""
    A = ss.algebra
    seen = set()
    for sm in A.summands:
        if sm.twist_page is not None and sm.n % 2 == 0:
            i = A._lookup[(sm.index, (), None)]
            seen.add(i)
            yield A.generators[i].name
    for i, g in enumerate(A.generators):
        if i in seen or g.degree % 2 or g.degree + 1 > A.max_degree:
            continue
        if A.sq_generator(1, i):
            yield g.name


def exponent_scan(space: EmlSpace | str, D: int, r_max: int) -> ScanVerdict:
    if isinstance(space, str):
        space = parse_space(space)
    ss = BocksteinSpectralSequence(space, D, r_max)
    tried = []
    for name in transverse_candidates(ss):
        deg = ss.algebra.generators[ss.algebra.generator_index(name)].degree
        l = min(horizon_l(deg, D), r_max - space.max_twist - 1)
        if l < 1:
            continue
        tried.append(name)
        res = check_transverse(space, name, l, D, ss=ss)
        if isinstance(res, Certificate):
            return ScanVerdict(str(space), D, r_max, False, None, res, tried)
    report = torsion_report(ss)
    k = max(report.exponents(), default=0)
    return ScanVerdict(str(space), D, r_max, True, k, None, tried)


# -- stable page ------------------------------------------------------------------------

def free_part_series(space: EmlSpace, D: int) -> list[int]:
    """Poincare series of (H^*(X;Z)/torsion) (x) F_2 for the spaces handled here."""
    series = [1] + [0] * D
    for sm in space.summands():
        if sm.twist_page is not None:
            continue
        n = sm.n
        if n % 2:
            factor = [1] + [0] * D
            if n <= D:
                factor[n] = 1
        else:
            factor = [1 if a % n == 0 else 0 for a in range(D + 1)]
        series = [sum(series[i] * factor[a - i] for i in range(a + 1)) for a in range(D + 1)]
    return series


def stable_page_mismatches(ss: BocksteinSpectralSequence, up_to: int | None = None) -> list[tuple[int, int, int]]:
    """(degree, dim on the last page, expected) wherever the last page differs from the free part."""
    up_to = ss.D if up_to is None else up_to
    last = ss.page(ss.r_max)
    expect = free_part_series(ss.space, up_to)
    return [(a, last.dim(a), expect[a]) for a in range(up_to + 1) if last.dim(a) != expect[a]]
