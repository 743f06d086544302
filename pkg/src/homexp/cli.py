"""Command-line interface: ``homexp <subcommand> ...`` (or ``python3 -m homexp``).

Exit status: 0 success, 1 refuted expectation, 2 usage error, 3 internal inconsistency.
Data goes to stdout (or --output); progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import random
import sys
import warnings
from dataclasses import dataclass

from . import __version__
from .bss import (
    BocksteinSpectralSequence,
    Certificate,
    HorizonError,
    InconsistencyError,
    check_transverse,
    stable_page_mismatches,
    torsion_report,
    transverse_r_max,
)
from .classify import classify, cross_validate, parse_pi, predicted_degrees
from .eml import (
    EmlSpace,
    SpaceParseError,
    ambient_algebra,
    parse_space,
    poincare_series,
    serre_generators,
)
from .hopf import HopfStructure, ResourceError, indecomposables, milnor_moore_check, primitives
from .steenrod import SteenrodWord, adem_reduce, in_gap_set

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3

SAFE_MAX_DEGREE = 64
SAFE_MONOMIALS = 250_000
UNSAFE_MONOMIALS = 10 ** 12


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    space: str | None = None
    pi: str | None = None
    max_degree: int = 40
    r_max: int = 8
    l_max: int = 4
    format: str = "text"
    seed: int = 0
    output: str | None = None
    unsafe_bounds: bool = False
    element: str | None = None
    stage: int | None = None
    n: int | None = None
    k_max: int = 4
    torsion_free: bool = False
    min_degree: int = 1
    verbose: bool = False

    def monomial_cap(self) -> int:
        return UNSAFE_MONOMIALS if self.unsafe_bounds else SAFE_MONOMIALS


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="homexp", description="Mod-2 cohomology, Bockstein spectral sequences and "
                "homology exponents of Eilenberg-Mac Lane products and H-Postnikov pieces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--max-degree", "-D", type=int, default=40, help="degree bound D (default 40)")
    common.add_argument("--r-max", type=int, default=8, help="last Bockstein page (default 8)")
    common.add_argument("--l-max", type=int, default=4, help="transversality depth (default 4)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized spot checks")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--unsafe-bounds", action="store_true",
                        help=f"lift the D <= {SAFE_MAX_DEGREE} and basis-size caps")
    common.add_argument("--verbose", "-v", action="store_true", help="progress on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def space_cmd(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--space", "-s", required=True, help='e.g. "K(Z/2,2) x K(Z,3)"')
        return s

    space_cmd("generators", "Serre generators through degree D")
    space_cmd("poincare", "Poincare series through degree D")
    g = space_cmd("gaps", "dimensions of primitives and indecomposables with gap-set flags")
    g.add_argument("--stage", type=int, help="n for the gap set A_n (default: top Eilenberg-Mac Lane degree)")
    g.add_argument("--min-degree", type=int, default=1)
    space_cmd("bss", "Bockstein page dimensions per degree")
    space_cmd("torsion", "integral 2-torsion detected by the Bockstein spectral sequence")
    t = space_cmd("transverse", "transversality certificate or refutation for an element")
    t.add_argument("--element", "-e", required=True, help='e.g. "u2" or "Sq[2,1]u3"')
    c = sub.add_parser("classify", parents=[common], help="exponent verdict from homotopy groups")
    c.add_argument("--pi", required=True, help='e.g. "1:Z+Z/2, 2:Z, 3:Z/4"')
    c.add_argument("--k-max", type=int, default=4)
    pr = sub.add_parser("predict", parents=[common], help="predicted torsion degrees at a stage")
    pr.add_argument("--n", type=int, required=True, help="top stage n")
    pr.add_argument("--k-max", type=int, default=4)
    pr.add_argument("--torsion-free", action="store_true", help="pi_n torsion free (eta witness)")
    v = sub.add_parser("validate", parents=[common], help="cross validation plus invariant audits")
    grp = v.add_mutually_exclusive_group(required=True)
    grp.add_argument("--space", "-s")
    grp.add_argument("--pi")
    return p


def config_from_args(argv: list[str] | None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(ns.command)
    for key, value in vars(ns).items():
        if hasattr(cfg, key):
            setattr(cfg, key, value)
    for name in ("max_degree", "r_max", "k_max"):
        if getattr(cfg, name) < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    if cfg.l_max < 0:
        raise UsageError("--l-max must be non-negative")
    if cfg.max_degree > SAFE_MAX_DEGREE and not cfg.unsafe_bounds:
        raise UsageError(f"--max-degree above {SAFE_MAX_DEGREE} needs --unsafe-bounds")
    return cfg


# -- subcommands -------------------------------------------------------------------------

class Report:
    """Payload plus renderers; ``status`` is the exit code it implies."""

    def __init__(self, payload: dict, text: str, csv: str | None = None, status: int = EXIT_OK):
        self.payload, self.text, self.csv, self.status = payload, text, csv, status

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.payload, indent=2, sort_keys=True) + "\n"
        if fmt == "csv":
            if self.csv is None:
                raise UsageError("this subcommand has no CSV form; use --format json or text")
            return self.csv
        return self.text


def _space(cfg: RunConfig) -> EmlSpace:
    try:
        return parse_space(cfg.space)
    except (SpaceParseError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_generators(cfg: RunConfig) -> Report:
    table = serre_generators(_space(cfg), cfg.max_degree)
    return Report(table.to_json(), table.to_text(), table.to_csv())


def cmd_poincare(cfg: RunConfig) -> Report:
    space = _space(cfg)
    series = poincare_series(space, cfg.max_degree)
    csv = "degree,dimension\n" + "".join(f"{a},{d}\n" for a, d in enumerate(series))
    return Report({"space": str(space), "max_degree": cfg.max_degree, "series": series},
                  f"{series}\n", csv)


def cmd_gaps(cfg: RunConfig) -> Report:
    space = _space(cfg)
    if not space.factors:
        raise UsageError("gaps needs a nontrivial space")
    n = cfg.stage or max(m for _, m in space.factors)
    A = ambient_algebra(space, cfg.max_degree, cfg.monomial_cap())
    H = HopfStructure(A)
    rows = []
    for a in range(max(cfg.min_degree, 1), cfg.max_degree + 1):
        _progress(cfg, f"degree {a}")
        rows.append({"degree": a, "P": primitives(H, a).dimension, "Q": indecomposables(A, a).dimension,
                     "in_gap_set": in_gap_set(a, n)})
    payload = {"space": str(space), "max_degree": cfg.max_degree, "stage": n, "rows": rows}
    csv = "degree,P,Q,in_gap_set\n" + "".join(
        f"{r['degree']},{r['P']},{r['Q']},{int(r['in_gap_set'])}\n" for r in rows)
    text = f"# P and Q of {space}; * marks degrees in A_{n}\n" + "".join(
        f"{r['degree']:4d}  P={r['P']:<3d} Q={r['Q']:<3d}{' *' if r['in_gap_set'] else ''}\n" for r in rows)
    status = EXIT_OK
    if any(r["in_gap_set"] and (r["P"] or r["Q"]) for r in rows) and len(space.factors) == 1:
        status = EXIT_REFUTED
    return Report(payload, text, csv, status)


def _sequence(cfg: RunConfig, space: EmlSpace) -> BocksteinSpectralSequence:
    try:
        return BocksteinSpectralSequence(space, cfg.max_degree, cfg.r_max, cfg.monomial_cap(),
                                         progress=lambda m: _progress(cfg, m))
    except ResourceError as exc:
        raise UsageError(f"{exc}; lower --max-degree or pass --unsafe-bounds") from None


def cmd_bss(cfg: RunConfig) -> Report:
    space = _space(cfg)
    ss = _sequence(cfg, space)
    dims = ss.page_dimensions()
    payload = {"space": str(space), "max_degree": ss.D, "r_max": ss.r_max,
               "pages": [{"r": r, "dimensions": d} for r, d in dims.items()],
               "rule_gaps": [{"page": g.page, "degree": g.degree, "class": g.representative} for g in ss.gaps]}
    csv = "page," + ",".join(str(a) for a in range(ss.D + 1)) + "\n"
    csv += "".join(f"{r}," + ",".join(map(str, d)) + "\n" for r, d in dims.items())
    text = f"# Bockstein pages of {space}, degrees 0..{ss.D}\n"
    text += "".join(f"B_{r}: {d}\n" for r, d in dims.items())
    if ss.gaps:
        text += f"# {len(ss.gaps)} rule gap(s)\n"
    return Report(payload, text, csv)


def cmd_torsion(cfg: RunConfig) -> Report:
    ss = _sequence(cfg, _space(cfg))
    rep = torsion_report(ss)
    return Report(rep.to_json(), rep.to_text(), rep.to_csv())


def cmd_transverse(cfg: RunConfig) -> Report:
    space = _space(cfg)
    r_max = transverse_r_max(space, cfg.l_max)
    ss = _sequence(dataclasses.replace(cfg, r_max=r_max), space)
    try:
        res = check_transverse(space, cfg.element, cfg.l_max, cfg.max_degree, ss=ss)
    except ValueError as exc:
        if isinstance(exc, HorizonError):
            raise
        raise UsageError(str(exc)) from None
    payload = res.to_json()
    lines = [f"{payload['result']} for {res.element} (degree {res.degree}), D={res.D}, r_max={res.r_max}"]
    for s in res.trail:
        lines.append(f"  l={s.l}  page {s.page}: d({s.element}) = {s.differential}")
    if not isinstance(res, Certificate):
        lines.append(f"  fails at l={res.failed_at}: {res.reason}")
    return Report(payload, "\n".join(lines) + "\n", None,
                  EXIT_OK if isinstance(res, Certificate) else EXIT_REFUTED)


def _pi(cfg: RunConfig):
    try:
        return parse_pi(cfg.pi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_classify(cfg: RunConfig) -> Report:
    verdict = classify(_pi(cfg))
    return Report(verdict.to_json(cfg.k_max), verdict.to_text(cfg.k_max))


def cmd_predict(cfg: RunConfig) -> Report:
    try:
        rows = [{"k": k, "power_degree": predicted_degrees(cfg.n, k, not cfg.torsion_free)}
                for k in range(1, cfg.k_max + 1)]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for r in rows:
        r["detected_degree"] = r["power_degree"] + 1
    case = "torsion-free" if cfg.torsion_free else "2-torsion"
    payload = {"n": cfg.n, "case": case, "rows": rows}
    csv = "k,power_degree,detected_degree\n" + "".join(
        f"{r['k']},{r['power_degree']},{r['detected_degree']}\n" for r in rows)
    text = f"# stage {cfg.n}, pi_n {case}\n" + "".join(
        f"k={r['k']}: witness power in degree {r['power_degree']}, "
        f"higher torsion in degree {r['detected_degree']}\n" for r in rows)
    return Report(payload, text, csv)


def _spot_check_action(A, rng: random.Random, trials: int) -> list[str]:
    """Sq^a Sq^b x computed letter by letter agrees with the Adem normal form applied to x."""
    bad = []
    D = A.max_degree
    degrees = [d for d in range(1, D) if A.dim(d)]
    for _ in range(trials):
        if not degrees:
            break
        d = rng.choice(degrees)
        room = D - d
        if room < 2:
            continue
        b = rng.randint(1, room - 1)
        a = rng.randint(1, room - b)
        x = rng.getrandbits(A.dim(d)) or 1
        lhs = A.sq(a, d + b, A.sq(b, d, x))
        rhs = 0
        for term in adem_reduce(SteenrodWord((a, b))):
            y, e = x, d
            for k in reversed(term.entries):
                y, e = A.sq(k, e, y), e + k
            rhs ^= y
        if lhs != rhs:
            bad.append(f"Sq^{a}Sq^{b} on {A.format(d, x)}")
    return bad


def cmd_validate(cfg: RunConfig) -> Report:
    rng = random.Random(cfg.seed)
    checks = []
    status = EXIT_OK
    if cfg.pi is not None:
        spec = _pi(cfg)
        space = spec.as_eml_space()
    else:
        space = _space(cfg)
        spec = None
    ss = _sequence(cfg, space)
    audit = ss.audit()
    checks.append({"name": "d_squared", "ok": not audit.d_squared, "detail": [str(x) for x in audit.d_squared]})
    checks.append({"name": "leibniz", "ok": not audit.leibniz, "detail": [str(x) for x in audit.leibniz]})
    checks.append({"name": "rule_gaps", "ok": not audit.gaps,
                   "detail": [f"page {g.page} degree {g.degree}: {g.representative}" for g in audit.gaps]})
    mism = stable_page_mismatches(ss)
    checks.append({"name": "stable_page", "ok": not mism,
                   "detail": [f"degree {a}: {got} != {want}" for a, got, want in mism]})
    A = ss.algebra
    H = HopfStructure(A)
    mm = [a for a in range(1, cfg.max_degree + 1) if not milnor_moore_check(H, a).exact]
    checks.append({"name": "milnor_moore", "ok": not mm, "detail": [f"degree {a}" for a in mm]})
    series = poincare_series(space, A.max_degree)
    checks.append({"name": "poincare", "ok": series == A.dimensions(), "detail": []})
    bad = _spot_check_action(A, rng, 40)
    checks.append({"name": "adem_action", "ok": not bad, "detail": bad})
    payload = {"space": str(space), "max_degree": cfg.max_degree, "r_max": cfg.r_max,
               "seed": cfg.seed, "checks": checks}
    if spec is not None and len(space.factors) == 1:
        cv = cross_validate(spec, cfg.max_degree, None)
        payload["cross_validation"] = cv.to_json()
        if not cv.agree:
            status = EXIT_INCONSISTENT
    hard = {"d_squared", "leibniz", "milnor_moore", "poincare", "adem_action"}
    if any(not c["ok"] for c in checks if c["name"] in hard):
        status = EXIT_INCONSISTENT
    elif status == EXIT_OK and any(not c["ok"] for c in checks):
        status = EXIT_REFUTED
    payload["status"] = status
    text = f"# validation of {space} (D={cfg.max_degree}, r_max={cfg.r_max}, seed={cfg.seed})\n"
    text += "".join(f"{'ok  ' if c['ok'] else 'FAIL'}  {c['name']}"
                    + (f": {'; '.join(c['detail'][:5])}" if c["detail"] else "") + "\n" for c in checks)
    if "cross_validation" in payload:
        cvj = payload["cross_validation"]
        text += f"{'ok  ' if cvj['agree'] else 'FAIL'}  cross_validation: {'; '.join(cvj['notes'])}\n"
    csv = "check,ok\n" + "".join(f"{c['name']},{int(c['ok'])}\n" for c in checks)
    return Report(payload, text, csv, status)


COMMANDS = {
    "generators": cmd_generators,
    "poincare": cmd_poincare,
    "gaps": cmd_gaps,
    "bss": cmd_bss,
    "torsion": cmd_torsion,
    "transverse": cmd_transverse,
    "classify": cmd_classify,
    "predict": cmd_predict,
    "validate": cmd_validate,
}


def _progress(cfg: RunConfig, message: str) -> None:
    if cfg.verbose:
        print(f"[homexp] {message}", file=sys.stderr, flush=True)


def schema_path(command: str):
    """Location of the JSON schema shipped for a subcommand's output (or "error")."""
    from importlib.resources import files
    return files("homexp") / "schemas" / f"{command}.schema.json"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    report = COMMANDS[cfg.command](cfg)
    _emit(report.render(cfg.format), cfg.output)
    return report.status


def _wants_json(argv: list[str]) -> bool:
    # json is the default format, so only an explicit csv/text request turns it off
    fmt = "json"
    for i, tok in enumerate(argv):
        if tok.startswith("--format="):
            fmt = tok.split("=", 1)[1]
        elif tok == "--format" and i + 1 < len(argv):
            fmt = argv[i + 1]
    return fmt == "json"


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    warnings.simplefilter("default")
    json_mode = _wants_json(argv)

    def fail(kind: str, message: str, code: int) -> int:
        print(f"homexp: {kind}: {message}", file=sys.stderr)
        if json_mode:
            sys.stdout.write(json.dumps({"error": kind, "message": message, "exit_code": code},
                                        sort_keys=True) + "\n")
        return code

    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, HorizonError, ResourceError) as exc:
        return fail("usage", str(exc), EXIT_USAGE)
    except InconsistencyError as exc:
        return fail("inconsistency", str(exc), EXIT_INCONSISTENT)


if __name__ == "__main__":
    sys.exit(main())
