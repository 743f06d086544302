"""Homology exponents of H-spaces with finitely many homotopy groups, read off the groups.

Everything here is 2-local: odd torsion is dropped on parsing and never
affects a verdict.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .bss import (
    Certificate,
    HorizonError,
    InconsistencyError,
    ScanVerdict,
    check_transverse,
    exponent_scan,
    horizon_l,
)
from .eml import (
    EmlSpace,
    Group2Local,
    SpaceParseError,
    _warn_odd,
    _SpaceParser,
    evaluate_word,
    fundamental_label,
)
from .steenrod import AdmissibleSequence, SteenrodWord, in_gap_set


# -- witness sequences -----------------------------------------------------------------

def xi_sequence(n: int) -> AdmissibleSequence:
    """(2^(n-1) - 2, 2^(n-2) - 1, ..., 3, 1), of excess n - 2."""
    if n < 3:
        raise ValueError(f"xi needs n >= 3, got {n}")
    seq = AdmissibleSequence((2 ** (n - 1) - 2,) + tuple(2 ** j - 1 for j in range(n - 2, 0, -1)))
    if seq.excess != n - 2 or n + seq.degree != 2 ** n - 2:
        raise AssertionError(f"xi({n}) = {seq} violates its defining properties")
    return seq


def eta_sequence(n: int) -> AdmissibleSequence:
    """(2^(n-2) + 2^(n-3) - 2, ..., 5, 2): ends in 2, so it acts on integral classes."""
    if n < 4:
        raise ValueError(f"eta needs n >= 4, got {n}")
    seq = AdmissibleSequence((3 * 2 ** (n - 3) - 2,) + tuple(3 * 2 ** (j - 1) - 1 for j in range(n - 3, 0, -1)))
    if (seq.excess != n - 2 or seq.entries[-1] != 2
            or n + seq.degree != 2 ** (n - 1) + 2 ** (n - 2) - 2):
        raise AssertionError(f"eta({n}) = {seq} violates its defining properties")
    return seq


def xi_target_degree(n: int) -> int:
    return 2 ** n - 2


def eta_target_degree(n: int) -> int:
    return 2 ** (n - 1) + 2 ** (n - 2) - 2


def bockstein_of_witness_nonzero(seq: AdmissibleSequence, n: int, twist_page: int | None) -> bool:
    """Sq^1 applied to Sq^seq v_n, evaluated with the unstable rules, is nonzero."""
    twist = twist_page if (twist_page is not None and twist_page >= 2 and seq.entries
                           and seq.entries[-1] == 1) else None
    word = SteenrodWord((1,) + seq.entries, twist)
    return bool(evaluate_word(word, n, twist_page))


def predicted_degrees(n: int, k: int, has_2torsion: bool) -> int:
    """Degree 2^k |w| of the 2^k-th power of the witness w at stage n."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if has_2torsion:
        if n < 3:
            raise ValueError("the torsion case needs n >= 3")
        return 2 ** k * xi_target_degree(n)
    if n < 4:
        raise ValueError("the torsion-free case needs n >= 4")
    return 2 ** k * eta_target_degree(n)


# -- Postnikov data ----------------------------------------------------------------------

@dataclass(frozen=True)
class PostnikovSpec:
    groups: dict = field(default_factory=dict)
    h_space: bool = True

    def __post_init__(self):
        clean = {}
        for i, g in self.groups.items():
            if int(i) < 1:
                raise ValueError(f"homotopy degree must be >= 1, got {i}")
            if not isinstance(g, Group2Local):
                raise TypeError("homotopy groups must be Group2Local")
            clean[int(i)] = clean.get(int(i), Group2Local()) + g
        object.__setattr__(self, "groups", dict(sorted(clean.items())))

    def pi(self, i: int) -> Group2Local:
        return self.groups.get(i, Group2Local())

    @property
    def finite_stage(self) -> int:
        return max((i for i, g in self.groups.items() if not g.is_trivial), default=0)

    def __str__(self) -> str:
        parts = [f"{i}:{g}" for i, g in self.groups.items() if not g.is_trivial]
        return ", ".join(parts) if parts else "(contractible)"

    def as_eml_space(self) -> EmlSpace:
        return EmlSpace(tuple((g, i) for i, g in self.groups.items() if not g.is_trivial))


def parse_pi(text: str, h_space: bool = True) -> PostnikovSpec:
    """Parse ``"1:Z+Z/2, 2:Z, 3:Z/4"``."""
    groups: dict[int, Group2Local] = {}
    odd: list[str] = []
    offset = 0
    for chunk in text.split(","):
        stripped = chunk.strip()
        start = offset + (len(chunk) - len(chunk.lstrip()))
        offset += len(chunk) + 1
        if not stripped:
            continue
        m = re.fullmatch(r"(\d+)\s*:\s*(.+)", stripped)
        if not m:
            raise SpaceParseError("expected '<degree>:<group>'", text, start)
        i = int(m.group(1))
        if i < 1:
            raise SpaceParseError("homotopy degree must be >= 1", text, start)
        p = _SpaceParser(m.group(2))
        try:
            g = p.group()
            p.skip()
            if p.pos != len(p.text):
                p.error("unexpected input")
        except SpaceParseError as exc:
            raise SpaceParseError(str(exc).split(" at position")[0], text,
                                  start + m.start(2) + exc.position) from None
        odd += p.odd
        groups[i] = groups.get(i, Group2Local()) + g
    _warn_odd(odd)
    return PostnikovSpec(groups, h_space)


# -- verdicts -------------------------------------------------------------------------------

@dataclass
class Witness:
    stage: int
    element: str
    sequence: tuple[int, ...]
    summand_group: str
    degree: int
    reason: str

    def power_degrees(self, k_max: int) -> list[int]:
        return [2 ** k * self.degree for k in range(1, k_max + 1)]

    def detected_degrees(self, k_max: int) -> list[int]:
        return [2 ** k * self.degree + 1 for k in range(1, k_max + 1)]

    def to_json(self, k_max: int = 4) -> dict:
        return {"stage": self.stage, "element": self.element, "sequence": list(self.sequence),
                "summand": self.summand_group, "degree": self.degree, "reason": self.reason,
                "power_degrees": self.power_degrees(k_max),
                "detected_degrees": self.detected_degrees(k_max)}


@dataclass
class ExponentVerdict:
    spec: str
    has_exponent: bool
    normal_form: list[str] | None = None
    witness: Witness | None = None

    def normal_form_text(self) -> str:
        if self.normal_form is None:
            return ""
        return " x ".join(self.normal_form) if self.normal_form else "pt"

    def to_json(self, k_max: int = 4) -> dict:
        out = {"spec": self.spec, "has_exponent": self.has_exponent}
        if self.has_exponent:
            out["normal_form"] = self.normal_form
        else:
            out["witness"] = self.witness.to_json(k_max)
        return out

    def to_text(self, k_max: int = 4) -> str:
        if self.has_exponent:
            return f"{self.spec}: has a homology exponent; 2-completed normal form {self.normal_form_text()}\n"
        w = self.witness
        return (f"{self.spec}: no homology exponent\n"
                f"  witness at stage {w.stage}: {w.element} in degree {w.degree} ({w.reason})\n"
                f"  powers in degrees {w.power_degrees(k_max)}\n"
                f"  torsion detected in degrees {w.detected_degrees(k_max)}\n")


def _element_name(word: SteenrodWord, label: str) -> str:
    return label if not word.entries else f"{word}{label}"


def _witness_at(spec: PostnikovSpec, n: int) -> Witness:
    g = spec.pi(n)
    space = spec.as_eml_space()
    factor = next(f for f, (_, m) in enumerate(space.factors) if m == n)
    summands = [sm for sm in space.summands() if sm.factor == factor]
    if g.has_2torsion:
        sm = next(sm for sm in summands if sm.twist_page is not None)
        label = f"v{n}" if len(space.summands()) == 1 else fundamental_label(space, sm).replace("u", "v", 1)
        if n == 2:
            return Witness(2, label, (), sm.group, 2,
                           f"fundamental class of {sm.group} in degree 2 is 0-transverse")
        seq = xi_sequence(n)
        s = sm.twist_page
        word = SteenrodWord(seq.entries, s if s >= 2 else None)
        return Witness(n, _element_name(word, label), seq.entries, sm.group, xi_target_degree(n),
                       f"pi_{n} has 2-torsion; xi has excess {n - 2}")
    sm = summands[0]
    label = f"v{n}" if len(space.summands()) == 1 else fundamental_label(space, sm).replace("u", "v", 1)
    seq = eta_sequence(n)
    return Witness(n, _element_name(SteenrodWord(seq.entries), label), seq.entries, sm.group,
                   eta_target_degree(n), f"pi_{n} is torsion free above stage 3; eta has excess {n - 2}")


def classify(spec: PostnikovSpec) -> ExponentVerdict:
    if not spec.h_space:
        raise ValueError("the classification only applies to H-spaces")
    # pi_1 never obstructs, and a free pi_2 splits off as copies of CP^inf
    offending = [i for i, g in spec.groups.items()
                 if (i >= 4 and not g.is_trivial) or (i in (2, 3) and g.has_2torsion)]
    if not offending:
        form = []
        p1, p2, p3 = spec.pi(1), spec.pi(2), spec.pi(3)
        form += ["S^1"] * p1.free_rank
        form += [f"BZ/{2 ** s}" for s in p1.torsion_exponents]
        form += ["CP^inf"] * p2.free_rank
        form += ["K(Z,3)"] * p3.free_rank
        return ExponentVerdict(str(spec), True, normal_form=form)
    return ExponentVerdict(str(spec), False, witness=_witness_at(spec, max(offending)))


# -- cross validation --------------------------------------------------------------------------

@dataclass
class CrossValidation:
    space: str
    D: int
    r_max: int
    verdict: ExponentVerdict
    scan: ScanVerdict
    witness_check: object | None
    agree: bool
    notes: list[str]

    def to_json(self) -> dict:
        out = {"space": self.space, "max_degree": self.D, "r_max": self.r_max, "agree": self.agree,
               "classify": self.verdict.to_json(), "scan": self.scan.to_json(), "notes": self.notes}
        if self.witness_check is not None:
            out["witness_check"] = self.witness_check.to_json()
        return out


def _bss_name(w: Witness, space: EmlSpace) -> str:
    # the bss side names the fundamental class u<n>, the classifier v<n>
    return re.sub(r"v(\d+)", r"u\1", w.element)


def cross_validate(spec: PostnikovSpec, D: int = 20, r_max: int | None = None) -> CrossValidation:
    """Compare the group-theoretic verdict with the Bockstein computation on a single K(H,n)."""
    space = spec.as_eml_space()
    if len(space.factors) != 1:
        raise ValueError("cross validation needs exactly one nontrivial homotopy group")
    if r_max is None:
        r_max = space.max_twist + 1 + max(horizon_l(2, D), 0)
    verdict = classify(spec)
    scan = exponent_scan(space, D, r_max)
    notes = []
    agree = verdict.has_exponent == scan.bounded
    if not agree:
        notes.append(f"classifier says has_exponent={verdict.has_exponent}, scan says {scan.kind}")
    check = None
    if not verdict.has_exponent:
        w = verdict.witness
        l = min(horizon_l(w.degree, D), r_max - space.max_twist - 1)
        if l < 0:
            notes.append(f"witness {w.element} in degree {w.degree} lies beyond D={D}; not checked")
        else:
            check = check_transverse(space, _bss_name(w, space), l, D)
            if not isinstance(check, Certificate):
                agree = False
                notes.append(f"witness {w.element} refuted: {check.reason}")
            else:
                notes.append(f"witness {w.element} certified up to l={l}")
    return CrossValidation(str(space), D, r_max, verdict, scan, check, agree, notes)


def gap_witness_ok(n: int) -> bool:
    """Witness degree plus one lies in the relevant gap set."""
    ok = in_gap_set(xi_target_degree(n) + 1, n - 1)
    if n >= 4:
        ok = ok and in_gap_set(eta_target_degree(n) + 1, n - 2)
    return ok


__all__ = [
    "PostnikovSpec", "parse_pi", "ExponentVerdict", "Witness", "xi_sequence", "eta_sequence",
    "predicted_degrees", "classify", "cross_validate", "CrossValidation", "HorizonError",
    "InconsistencyError", "bockstein_of_witness_nonzero", "gap_witness_ok",
]
