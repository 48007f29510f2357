"""Command-line driver: check, corpus, suspend, recover, estructure.

Exit status 0 means every check passed, 1 that a mathematical check failed
and 2 that the input could not be used (parse error, bad flag, violated
precondition). ``--json`` prints a machine-readable report instead of text.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import monge, structures, suspension
from .exterior import DimensionError, KForm, pfaffian
from .formats import (FORMAT_VERSION, ParseError, algebra_to_file, data_path, format_algebra,
                      load_algebra, load_chart, parse_form)
from .liealg import JacobiError, LieAlgebra, ParameterError
from .poly import Poly
from .report import Report
from .structures import StructureError, StructureWitness

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# ---- reports ------------------------------------------------------------------

def to_jsonable(x):
    """Plain JSON value; rationals, polynomials and forms become strings in input syntax."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, (Fraction, Poly, KForm)):
        return str(x)
    if isinstance(x, StructureWitness):
        out = {"kind": x.kind, "form": str(x.form), "certificate": str(x.certificate)}
        if x.potential is not None:
            out["potential"] = str(x.potential)
        return out
    if isinstance(x, suspension.Derivation):
        return [[str(a) for a in row] for row in x.matrix]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return str(x)


def record_json(rep: Report) -> dict:
    out = {
        "check": rep.check,
        "passed": rep.passed,
        "message": rep.message,
        "witness": to_jsonable(rep.witness),
        "details": to_jsonable(rep.details),
    }
    if rep.children:
        out["children"] = [record_json(c) for c in rep.children]
    return out


@dataclass
class RunReport:
    command: str
    records: list = field(default_factory=list)  # (Report, seconds)
    error: str = ""
    json_output: bool = False

    def add(self, rep: Report, seconds: float = 0.0) -> Report:
        self.records.append((rep, seconds))
        return rep

    def timed(self, fn, *args, **kw) -> Report:
        t0 = time.perf_counter()
        rep = fn(*args, **kw)
        return self.add(rep, time.perf_counter() - t0)

    @property
    def passed(self) -> bool:
        return not self.error and all(r.passed for r, _ in self.records)

    @property
    def exit_code(self) -> int:
        if self.error:
            return EXIT_INPUT
        return EXIT_OK if self.passed else EXIT_FAIL

    def to_json(self) -> dict:
        recs = []
        for rep, seconds in self.records:
            d = record_json(rep)
            d["seconds"] = round(seconds, 6)
            recs.append(d)
        out = {"format": FORMAT_VERSION, "command": self.command, "passed": self.passed,
               "exit_code": self.exit_code, "records": recs}
        if self.error:
            out["error"] = self.error
        return out

    def to_text(self) -> str:
        lines = []
        for rep, _ in self.records:
            lines.extend(rep.lines())
            for key, value in rep.details.items():
                if key in ("text", "display") or isinstance(value, dict) and key in ("frame", "coframe"):
                    lines.extend(_detail_lines(value))
        if self.error:
            lines.append(f"error: {self.error}")
        failed = sum(1 for r, _ in self.records if not r.passed)
        if self.error:
            lines.append("INPUT ERROR")
        elif failed:
            lines.append(f"FAIL: {failed} of {len(self.records)} records failed")
        else:
            lines.append(f"PASS: {len(self.records)} records")
        return "\n".join(lines)


def _detail_lines(value) -> list:
    if isinstance(value, dict):
        return [f"    {k} = {v}" for k, v in value.items()]
    return ["    " + line for line in str(value).splitlines()]


def info(rep: Report) -> Report:
    """Turn an existence verdict into an always-passing informational record."""
    details = dict(rep.details)
    details["verdict"] = rep.passed
    return Report(rep.check, True, ("yes: " if rep.passed else "no: ") + rep.message,
                  witness=rep.witness, details=details, children=rep.children)


# ---- argument helpers ------------------------------------------------------------

def parse_assignments(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise InputError(f"--set expects name=p/q, got {item!r}")
        try:
            out[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"--set {name}: {value!r} is not a rational number") from None
    return out


def parse_matrix(text: str, n: int) -> list:
    rows = [r.split() for r in text.replace(",", " ").split(";") if r.strip()]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InputError(f"expected a {n}x{n} matrix written as 'a b ..; c d ..'")
    try:
        return [[Fraction(a) for a in r] for r in rows]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"matrix entries must be rationals: {text!r}") from None


def _points(af, sets: dict) -> list:
    names = set(af.param_names())
    unknown = set(sets) - names
    if unknown:
        raise InputError(f"--set names undeclared parameter(s): {', '.join(sorted(unknown))}")
    if sets:
        if set(sets) != names:
            missing = names - set(sets)
            raise InputError(f"no value for parameter(s) {', '.join(sorted(missing))}")
        return [sets]
    if names and not af.samples:
        raise InputError(f"parametric algebra needs --set for {', '.join(sorted(names))}")
    return af.samples or [{}]


def _numeric_algebra(af, sets: dict) -> LieAlgebra:
    pts = _points(af, sets)
    if len(pts) != 1:
        raise InputError("this command needs one parameter point; pass --set")
    return af.to_algebra().substitute(pts[0])


def _label(point: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(point.items()))


# ---- commands ------------------------------------------------------------------

def cmd_check(args, run: RunReport) -> None:
    af = load_algebra(args.file)
    g0 = af.to_algebra()
    jac = run.timed(g0.jacobi_check)
    if not jac.passed:
        return
    entry = af.to_entry()
    has_claims = any(v is not None for v in (entry.derived_dim, entry.omega, entry.exact, entry.contact,
                                             entry.symplectic, entry.h4_dim))
    for point in _points(af, parse_assignments(args.set)):
        g = g0.substitute(point)
        tag = f" [{_label(point)}]" if point else ""
        run.timed(lambda: _rename(info(g.is_unimodular()), "unimodular" + tag))
        run.add(Report("derived-dim" + tag, True, str(g.derived_dim())))
        run.add(Report("betti" + tag, True, " ".join(map(str, g.betti_numbers())),
                       details={"betti": g.betti_numbers()}))
        if g.dim % 2:
            run.timed(lambda: _rename(info(structures.is_contact(g)), "contact" + tag))
        else:
            run.timed(lambda: _rename(info(structures.has_symplectic(g)), "symplectic" + tag))
            run.timed(lambda: _rename(info(structures.has_exact_symplectic(g)), "exact-symplectic" + tag))
        if has_claims:
            run.timed(lambda: _rename(structures.verify_corpus_entry(entry, point), "claims" + tag))


def _rename(rep: Report, name: str) -> Report:
    return Report(name, rep.passed, rep.message, rep.witness, rep.details, rep.children)


def _verify_path(path: str) -> Report:
    return structures.verify_entry_all_samples(load_algebra(path).to_entry())


def cmd_corpus(args, run: RunReport) -> None:
    folder = Path(args.directory) if args.directory else Path(str(data_path("corpus")))
    if not folder.is_dir():
        raise InputError(f"{folder} is not a directory")
    paths = sorted(str(p) for p in folder.glob("*.alg"))
    if not paths:
        raise InputError(f"no .alg files in {folder}")
    for p in paths:  # parse everything up front so input errors exit 2 before any work
        load_algebra(p)
    t0 = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_verify_path, paths))
    else:
        reports = [_verify_path(p) for p in paths]
    share = (time.perf_counter() - t0) / len(paths)
    for rep in sorted(reports, key=lambda r: r.check):
        run.add(rep, share)


def cmd_suspend(args, run: RunReport) -> None:
    af = load_algebra(args.file)
    h = _numeric_algebra(af, parse_assignments(args.set))
    jac = run.add(h.jacobi_check())
    if not jac.passed:
        return
    n = h.dim
    a = None
    if args.derivation:
        if args.search:
            raise InputError("--search and --derivation are exclusive")
        a = suspension.Derivation(h, parse_matrix(args.derivation, n))
    names = [p.name for p in h.params]
    if args.variant == "contactize":
        if args.alpha:
            alpha = parse_form(args.alpha, n, 1, names)
        else:
            ex = structures.has_exact_symplectic(h)
            if not ex.passed:
                run.add(Report("contactize", False, "no potential with symplectic differential exists"))
                return
            alpha = ex.witness.potential
        result = suspension.contactize(h, alpha, a)
    elif args.variant == "symplectize":
        alpha = parse_form(args.alpha, n, 1, names) if args.alpha else _contact_form(h)
        if alpha is None:
            run.add(Report("symplectize", False, "algebra has no contact form"))
            return
        result = suspension.symplectize_contact(h, alpha, a)
    else:
        if args.omega:
            omega = parse_form(args.omega, n, 2, names)
        else:
            alpha = parse_form(args.alpha, n, 1, names) if args.alpha else _contact_form(h)
            if alpha is None:
                run.add(Report("symplectize-2form", False, "no 2-form given and no contact form to differentiate"))
                return
            omega = h.d(alpha)
        result = suspension.symplectize_2form(h, omega)
    details = {"certificate": result.certificate}
    if result.derivation is not None:
        details["derivation"] = result.derivation
    run.add(Report(result.report.check, result.passed, result.report.message,
                   witness=result.form, details=details, children=result.report.children))
    if result.passed:
        g = result.algebra
        run.add(g.jacobi_check())
        if result.variant == "contactize":
            top = result.form.wedge(g.d(result.form).power(n // 2)).top_coefficient()
            run.add(Report("witness-contact", not top.is_zero(), f"alpha+ = {result.form}"))
        else:
            pf = pfaffian(result.form)
            run.add(Report("witness-symplectic", g.d(result.form).is_zero() and not pf.is_zero(),
                           f"Pf = {pf}"))
        run.add(Report("suspended-algebra", True, g.name or "suspension",
                       details={"text": format_algebra(algebra_to_file(g, "bracket"))}))


def _contact_form(h: LieAlgebra):
    if h.dim % 2 == 0:
        raise InputError("symplectization needs an odd-dimensional algebra")
    rep = structures.is_contact(h)
    return rep.witness.form if rep.passed else None


def _estructure(af, sets, frame_text):
    g = _numeric_algebra(af, sets)
    if g.dim != 4:
        raise InputError("an {e}-structure needs a 4-dimensional algebra")
    frame = tuple(tuple(r) for r in parse_matrix(frame_text, 4)) if frame_text else ()
    labels = tuple(af.labels) if af.labels else monge.FRAME_LABELS
    return monge.EStructure(g, frame, labels)


def cmd_estructure(args, run: RunReport) -> None:
    af = load_algebra(args.file)
    es = _estructure(af, parse_assignments(args.set), args.frame)
    run.timed(monge.verify_e_structure, es)


def cmd_recover(args, run: RunReport) -> None:
    af = load_algebra(args.file)
    chart_file = load_chart(args.chart)
    es = _estructure(af, parse_assignments(args.set), args.frame)
    run.timed(monge.verify_e_structure, es)
    labels = es.labels
    coords = monge.coordinate_names(4)
    if set(chart_file.old_names) != set(coords):
        raise InputError(f"chart must express the exponential coordinates {', '.join(coords)}")
    try:
        data = monge.coordinate_forms(es, coords)
    except monge.EStructureError as exc:
        run.add(Report("coordinates", False, str(exc)))
        return
    run.add(Report("frame", True, "left-invariant fields in exponential coordinates",
                   details={"frame": {l: monge.field_str(f, coords) for l, f in zip(labels, data.frame)}}))
    run.add(Report("coframe", True, "dual 1-forms; Maurer-Cartan equations hold",
                   details={"coframe": {f"{l}*": str(c) for l, c in zip(labels, data.coframe)}}))
    run.add(Report("omega-coordinates", data.omega.d().is_zero(), str(data.omega)))
    run.add(Report("theta-coordinates", True, str(data.theta)))
    chart = monge.Chart.from_file(chart_file)
    rep = run.add(chart.verify())
    if not rep.passed:
        return
    omega, theta = monge.apply_chart([data.omega, data.theta], chart)
    target = monge.PolyForm(omega.coords, 2, {})
    pos = {x: i for i, x in enumerate(omega.coords)}
    if {"p1", "p2", "q1", "q2"} <= set(pos):
        target = monge.PolyForm(omega.coords, 2, {(pos["p1"], pos["q1"]): 1, (pos["p2"], pos["q2"]): 1})
    darboux = omega == target
    run.add(Report("omega-chart", darboux, str(omega) + ("" if darboux else " (expected dp1^dq1 + dp2^dq2)")))
    run.add(Report("theta-chart", True, str(theta)))
    if not darboux:
        return
    pde = monge.emit_pde(theta)
    run.add(Report("pde", True, pde.display(),
                   details={"display": pde.display(),
                            "terms": [[{k: v for k, v in m.items()}, str(c)] for m, c in pde.terms()]}))


COMMANDS = {
    "check": cmd_check,
    "corpus": cmd_corpus,
    "suspend": cmd_suspend,
    "recover": cmd_recover,
    "estructure": cmd_estructure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symplie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="print the JSON report")
        p.add_argument("--set", action="append", metavar="NAME=P/Q", help="parameter value")

    p = sub.add_parser("check", help="invariants and structure verdicts of one algebra file")
    p.add_argument("file")
    common(p)

    p = sub.add_parser("corpus", help="verify every classification entry")
    p.add_argument("directory", nargs="?", help="folder of .alg files (default: bundled corpus)")
    p.add_argument("--jobs", type=int, default=1)
    common(p)

    p = sub.add_parser("suspend", help="contactize or symplectize by one dimension")
    p.add_argument("file")
    p.add_argument("--variant", choices=("contactize", "symplectize", "two-form"), default="symplectize")
    p.add_argument("--alpha", help="1-form, e.g. 'e1* + 1/2 e3*'")
    p.add_argument("--omega", help="closed 2-form for --variant two-form")
    p.add_argument("--derivation", help="matrix 'a b c; d e f; ...' with columns the images A e_j")
    p.add_argument("--search", action="store_true", help="search H^1(h,h) for a derivation (default)")
    common(p)

    for name, text in (("recover", "frame, coordinates, chart and PDE for a nilpotent {e}-structure"),
                       ("estructure", "closedness and Nijenhuis conditions of a frame")):
        p = sub.add_parser(name, help=text)
        p.add_argument("file")
        if name == "recover":
            p.add_argument("--chart", required=True, help=".map file with forward and inverse maps")
        p.add_argument("--frame", help="frame matrix, columns P1 P2 Q1 Q2 in the file's basis")
        common(p)
    return parser


def run(argv=None) -> RunReport:
    args = build_parser().parse_args(argv)
    report = RunReport(args.command)
    try:
        COMMANDS[args.command](args, report)
    except (InputError, ParseError, ParameterError, JacobiError, StructureError, DimensionError,
            suspension.DerivationError, monge.EStructureError, monge.ChartError, OSError) as exc:
        report.error = str(exc)
    report.json_output = args.json
    return report


def main(argv=None) -> int:
    report = run(argv)
    if report.json_output:
        print(json.dumps(report.to_json(), indent=2, sort_keys=False))
    else:
        print(report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
