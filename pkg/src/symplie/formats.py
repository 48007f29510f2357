"""Text formats: algebra files (``.alg``) and chart files (``.map``).

Algebra file, one directive per line, ``#`` starts a comment::

    format 1
    name T3-1a
    dim 4
    param l != 0, 1          # excluded values; "param l in 1, -1" lists allowed ones
    sample l=2               # rational parameter point used by the corpus runner
    labels P1 P2 Q1 Q2
    d e3* = e1*^e2* + e3*^e4*        # Maurer-Cartan body ...
    [e2, e3] = e1                    # ... or bracket body, never both
    claim derived 3
    claim omega = e1*^e3* + e2*^e4*
    claim exact yes

Chart file::

    format 1
    p1 = x1 + 1/2 x4
    q1 = x3
    inverse:
    x1 = p1 - 1/2 q2
    x3 = q1
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exterior import KForm, format_linear_combination
from .liealg import LieAlgebra, Param
from .poly import ONE, ZERO, Poly
from .structures import CorpusEntry

FORMAT_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, path: str = ""):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        where = f"{path}:" if path else ""
        if line:
            where += f"{line}:{col}: " if col else f"{line}: "
        super().__init__(f"{where}{message}")


# ---- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<basis>e\d+\*?(?:\s*\^\s*e\d+\*?)*)(?![A-Za-z0-9_])
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/()^,\[\]=!]=?)
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 0, basis: bool = True) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind == "basis" and not basis:
            # in plain polynomial text e1 is an ordinary name
            m = re.compile(r"[A-Za-z_][A-Za-z_0-9]*").match(text, pos)
            kind = "name"
        if kind != "ws":
            out.append(Token(kind, m.group(0), pos + 1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list, line: int, variables: set | None, dim: int | None = None):
        self.toks = tokens
        self.i = 0
        self.line = line
        self.variables = variables
        self.dim = dim

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at(self, *texts) -> bool:
        t = self.peek()
        return t is not None and t.kind == "op" and t.text in texts

    def next(self):
        t = self.peek()
        if t is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        col = tok.col if tok else (self.toks[-1].col + len(self.toks[-1].text) if self.toks else 1)
        return ParseError(msg, self.line, col)

    def expect(self, text):
        t = self.next()
        if t.kind != "op" or t.text != text:
            raise self.error(f"expected {text!r}, found {t.text!r}", t)
        return t

    def done(self):
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")

    # poly := ['+'|'-'] product (('+'|'-') product)*
    def poly(self) -> Poly:
        sign = 1
        if self.at("+", "-"):
            sign = -1 if self.next().text == "-" else 1
        total = self.product() * sign
        while self.at("+", "-"):
            sign = -1 if self.next().text == "-" else 1
            total = total + self.product() * sign
        return total

    def _starts_atom(self) -> bool:
        t = self.peek()
        return t is not None and (t.kind in ("num", "name") or (t.kind == "op" and t.text == "("))

    # product := power (('*'|'/')? power)*   juxtaposition multiplies
    def product(self) -> Poly:
        value = self.power()
        while True:
            if self.at("*"):
                self.next()
                value = value * self.power()
            elif self.at("/"):
                tok = self.next()
                d = self.power()
                if not d.is_constant() or d.is_zero():
                    raise self.error("division only by a nonzero number", tok)
                value = value / d.constant_value()
            elif self._starts_atom():
                value = value * self.power()
            else:
                return value

    def power(self) -> Poly:
        base = self.atom()
        if self.at("**", "^"):
            self.next()
            t = self.next()
            if t.kind != "num" or not t.text.isdigit():
                raise self.error("exponent must be a nonnegative integer", t)
            base = base ** int(t.text)
        return base

    def atom(self) -> Poly:
        t = self.next()
        if t.kind == "num":
            return Poly.const(Fraction(t.text))
        if t.kind == "name":
            if self.variables is not None and t.text not in self.variables:
                raise self.error(f"undeclared name {t.text!r}", t)
            return Poly.var(t.text)
        if t.kind == "op" and t.text == "(":
            value = self.poly()
            self.expect(")")
            return value
        raise self.error(f"unexpected {t.text!r}", t)

    # combination := ['+'|'-'] term (('+'|'-') term)* | '0'
    def combination(self, degree: int) -> list:
        terms = []
        sign = 1
        if self.at("+", "-"):
            sign = -1 if self.next().text == "-" else 1
        while True:
            coef, idx = self.term(degree)
            if idx is not None:
                terms.append((coef * sign, idx))
            if self.at("+", "-"):
                sign = -1 if self.next().text == "-" else 1
                continue
            break
        self.done()
        return terms

    def term(self, degree: int):
        coef = None
        while True:
            t = self.peek()
            if t is not None and t.kind == "basis":
                self.next()
                return (ONE if coef is None else coef), self.basis(t, degree)
            if t is None or (coef is not None and self.at("+", "-")):
                if coef is not None and coef.is_zero():
                    return coef, None
                raise self.error("expected a basis element")
            if coef is not None and self.at("*"):
                self.next()
                continue
            if coef is not None and self.at("/"):
                tok = self.next()
                d = self.power()
                if not d.is_constant() or d.is_zero():
                    raise self.error("division only by a nonzero number", tok)
                coef = coef / d.constant_value()
                continue
            if not self._starts_atom():
                raise self.error(f"unexpected {t.text!r}", t)
            f = self.power()
            coef = f if coef is None else coef * f

    def basis(self, tok, degree: int) -> tuple:
        parts = [p.strip() for p in tok.text.split("^")]
        idx = tuple(int(p.rstrip("*")[1:]) for p in parts)
        if len(idx) != degree:
            raise self.error(f"expected a product of {degree} basis element(s), found {tok.text!r}", tok)
        for i in idx:
            if self.dim is not None and not 1 <= i <= self.dim:
                raise self.error(f"index e{i} out of range 1..{self.dim}", tok)
        return tuple(i - 1 for i in idx)


def parse_polynomial(text: str, variables: Sequence[str] | None = None, line: int = 0) -> Poly:
    p = _Parser(tokenize(text, line, basis=False), line, set(variables) if variables is not None else None)
    value = p.poly()
    p.done()
    return value


def parse_form(text: str, dim: int, degree: int, variables: Sequence[str] = (), line: int = 0) -> KForm:
    """Parse ``c e1*^e2* + ...`` into a KForm."""
    p = _Parser(tokenize(text, line), line, set(variables), dim)
    terms = p.combination(degree)
    out = KForm.zero(dim, degree)
    for c, idx in terms:
        out = out + KForm(dim, degree, {idx: c})
    return out


def parse_vector(text: str, dim: int, variables: Sequence[str] = (), line: int = 0) -> list:
    p = _Parser(tokenize(text, line), line, set(variables), dim)
    vec = [ZERO] * dim
    for c, (i,) in p.combination(1):
        vec[i] = vec[i] + c
    return vec


# ---- algebra files ----------------------------------------------------------------

@dataclass
class AlgebraFile:
    dim: int
    style: str = "bracket"  # or "mc"
    params: list = field(default_factory=list)
    brackets: dict = field(default_factory=dict)  # (i, j) -> [Poly]*dim, i < j
    mc: dict = field(default_factory=dict)  # k -> KForm
    labels: list | None = None
    name: str = ""
    samples: list = field(default_factory=list)
    claims: dict = field(default_factory=dict)

    def param_names(self) -> list:
        return [p.name for p in self.params]

    def to_algebra(self, check: bool = False) -> LieAlgebra:
        kw = dict(params=self.params, labels=self.labels, name=self.name, check=check)
        if self.style == "mc":
            return LieAlgebra.from_mc(self.dim, self.mc, **kw)
        return LieAlgebra(self.dim, self.brackets, **kw)

    def to_entry(self) -> CorpusEntry:
        c = self.claims
        return CorpusEntry(
            ident=self.name or "unnamed",
            algebra=self.to_algebra(check=False),
            derived_dim=c.get("derived"),
            omega=c.get("omega"),
            exact=c.get("exact"),
            contact=c.get("contact"),
            symplectic=c.get("symplectic"),
            h4_dim=c.get("h4"),
            samples=tuple(tuple(sorted(s.items())) for s in self.samples),
        )


_YES = {"yes": True, "true": True, "no": False, "false": False}


def parse_algebra(text: str, path: str = "") -> AlgebraFile:
    try:
        return _parse_algebra(text)
    except ParseError as exc:
        if path and not exc.path:
            raise ParseError(exc.message, exc.line, exc.col, path) from None
        raise


def _split_directive(raw: str):
    line = raw.split("#", 1)[0].rstrip()
    stripped = line.lstrip()
    return line, stripped, len(line) - len(stripped) + 1


def _parse_algebra(text: str) -> AlgebraFile:
    dim = None
    style = None
    params: list = []
    labels = None
    name = ""
    samples: list = []
    claims: dict = {}
    bodies = []  # (lineno, col, kind, text)
    pending_claims = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, s, col0 = _split_directive(raw)
        if not s:
            continue
        word = s.split(None, 1)[0]
        rest = s[len(word):].strip()
        rest_col = col0 + len(s) - len(s[len(word):].lstrip())
        if word == "format":
            if seen_content:
                raise ParseError("'format' must be the first directive", lineno, col0)
            if rest != str(FORMAT_VERSION):
                raise ParseError(f"unsupported format {rest!r} (expected {FORMAT_VERSION})", lineno, rest_col)
            seen_content = True
            continue
        seen_content = True
        if word == "dim":
            if dim is not None:
                raise ParseError("duplicate 'dim'", lineno, col0)
            if not rest.isdigit() or not 1 <= int(rest) <= 8:
                raise ParseError(f"dimension must be an integer in 1..8, got {rest!r}", lineno, rest_col)
            dim = int(rest)
        elif word == "name":
            name = rest
        elif word == "param":
            params.append(_parse_param(rest, lineno, rest_col, [p.name for p in params]))
        elif word == "labels":
            labels = rest.split()
        elif word == "sample":
            samples.append((lineno, rest_col, rest))
        elif word == "claim":
            pending_claims.append((lineno, rest_col, rest))
        elif re.match(r"d\s*e\d", s):
            kind = "mc"
            if style not in (None, kind):
                raise ParseError("cannot mix bracket and Maurer-Cartan lines", lineno, col0)
            style = kind
            bodies.append((lineno, col0, kind, s))
        elif s.startswith("["):
            kind = "bracket"
            if style not in (None, kind):
                raise ParseError("cannot mix bracket and Maurer-Cartan lines", lineno, col0)
            style = kind
            bodies.append((lineno, col0, kind, s))
        else:
            raise ParseError(f"unknown directive {word!r}", lineno, col0)
    if dim is None:
        raise ParseError("missing 'dim'", 1, 1)
    if labels is not None and len(labels) != dim:
        raise ParseError(f"'labels' needs {dim} names", 1, 1)
    names = [p.name for p in params]
    brackets: dict = {}
    mc: dict = {}
    for lineno, col0, kind, s in bodies:
        if kind == "mc":
            k, form = _parse_mc_line(s, lineno, col0, dim, names)
            if k in mc:
                raise ParseError(f"duplicate equation for d e{k + 1}*", lineno, col0)
            mc[k] = form
        else:
            (i, j), vec = _parse_bracket_line(s, lineno, col0, dim, names)
            if (i, j) in brackets:
                raise ParseError(f"duplicate bracket [e{i + 1}, e{j + 1}]", lineno, col0)
            brackets[(i, j)] = vec
    parsed_samples = [_parse_sample(rest, lineno, col, params) for lineno, col, rest in samples]
    for lineno, col, rest in pending_claims:
        key, value = _parse_claim(rest, lineno, col, dim, names)
        claims[key] = value
    return AlgebraFile(dim=dim, style=style or "bracket", params=params, brackets=brackets, mc=mc,
                       labels=labels, name=name, samples=parsed_samples, claims=claims)


def _parse_param(rest: str, lineno: int, col: int, existing: list) -> Param:
    m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*(?:(!=|in)\s*(.*))?$", rest)
    if not m:
        raise ParseError(f"bad parameter declaration {rest!r}", lineno, col)
    pname, op, values = m.groups()
    if re.fullmatch(r"e\d+", pname):
        raise ParseError(f"parameter name {pname!r} clashes with basis names", lineno, col)
    if pname in existing:
        raise ParseError(f"duplicate parameter {pname!r}", lineno, col)
    vals = ()
    if op:
        try:
            vals = tuple(parse_polynomial(v.strip(), [], lineno).constant_value() for v in values.split(","))
        except ValueError as exc:
            raise ParseError(f"bad parameter values: {exc}", lineno, col) from None
    if op == "!=":
        return Param(pname, excluded=vals)
    if op == "in":
        return Param(pname, allowed=vals)
    return Param(pname)


def _parse_sample(rest: str, lineno: int, col: int, params: list) -> dict:
    declared = {p.name: p for p in params}
    out = {}
    for piece in rest.split(","):
        if "=" not in piece:
            raise ParseError(f"sample entries look like name=value, got {piece.strip()!r}", lineno, col)
        k, v = (x.strip() for x in piece.split("=", 1))
        if k not in declared:
            raise ParseError(f"sample for undeclared parameter {k!r}", lineno, col)
        value = parse_polynomial(v, [], lineno).constant_value()
        try:
            declared[k].check(value)
        except ValueError as exc:
            raise ParseError(str(exc), lineno, col) from None
        out[k] = value
    return out


_MC_LHS = re.compile(r"d\s*e(\d+)\*?\s*=")
_BR_LHS = re.compile(r"\[\s*e(\d+)\s*,\s*e(\d+)\s*\]\s*=")


def _parse_mc_line(s: str, lineno: int, col0: int, dim: int, names: list):
    m = _MC_LHS.match(s)
    if not m:
        raise ParseError("expected 'd eK* = ...'", lineno, col0)
    k = int(m.group(1))
    if not 1 <= k <= dim:
        raise ParseError(f"index e{k} out of range 1..{dim}", lineno, col0 + m.start(1))
    body = s[m.end():]
    return k - 1, _parse_rhs_form(body, lineno, col0 + m.end(), dim, 2, names)


def _parse_bracket_line(s: str, lineno: int, col0: int, dim: int, names: list):
    m = _BR_LHS.match(s)
    if not m:
        raise ParseError("expected '[eI, eJ] = ...'", lineno, col0)
    i, j = int(m.group(1)), int(m.group(2))
    for g, v in ((1, i), (2, j)):
        if not 1 <= v <= dim:
            raise ParseError(f"index e{v} out of range 1..{dim}", lineno, col0 + m.start(g) - 1)
    if i == j:
        raise ParseError("bracket of a basis vector with itself", lineno, col0)
    form = _parse_rhs_form(s[m.end():], lineno, col0 + m.end(), dim, 1, names)
    vec = [form.coeff((k,)) for k in range(dim)]
    i, j = i - 1, j - 1
    if i > j:
        i, j = j, i
        vec = [-c for c in vec]
    return (i, j), vec


def _parse_rhs_form(body: str, lineno: int, offset: int, dim: int, degree: int, names: list) -> KForm:
    toks = tokenize(body, lineno)
    for t in toks:
        t.col += offset - 1
    p = _Parser(toks, lineno, set(names), dim)
    if not toks:
        raise ParseError("missing right-hand side", lineno, offset)
    out = KForm.zero(dim, degree)
    for c, idx in p.combination(degree):
        out = out + KForm(dim, degree, {idx: c})
    return out


def _parse_claim(rest: str, lineno: int, col: int, dim: int, names: list):
    word = rest.split(None, 1)[0] if rest else ""
    arg = rest[len(word):].strip()
    if word == "derived" or word == "h4":
        if not arg.isdigit():
            raise ParseError(f"claim {word} needs an integer", lineno, col)
        return word, int(arg)
    if word == "omega":
        if not arg.startswith("="):
            raise ParseError("expected 'claim omega = <2-form>'", lineno, col)
        return "omega", _parse_rhs_form(arg[1:], lineno, col, dim, 2, names)
    if word in ("exact", "contact", "symplectic"):
        if arg not in _YES:
            raise ParseError(f"claim {word} needs yes/no", lineno, col)
        return word, _YES[arg]
    raise ParseError(f"unknown claim {word!r}", lineno, col)


def format_algebra(af: AlgebraFile) -> str:
    """Canonical text; parse(format(x)) reproduces x."""
    out = [f"format {FORMAT_VERSION}"]
    if af.name:
        out.append(f"name {af.name}")
    out.append(f"dim {af.dim}")
    for p in af.params:
        if p.excluded:
            out.append(f"param {p.name} != " + ", ".join(_num(v) for v in p.excluded))
        elif p.allowed is not None:
            out.append(f"param {p.name} in " + ", ".join(_num(v) for v in p.allowed))
        else:
            out.append(f"param {p.name}")
    if af.labels:
        out.append("labels " + " ".join(af.labels))
    for s in af.samples:
        out.append("sample " + ", ".join(f"{k}={_num(v)}" for k, v in sorted(s.items())))
    if af.style == "mc":
        for k in range(af.dim):
            form = af.mc.get(k, KForm.zero(af.dim, 2))
            out.append(f"d e{k + 1}* = {form}")
    else:
        for (i, j) in sorted(af.brackets):
            vec = af.brackets[(i, j)]
            if not any(vec):
                continue
            rhs = format_linear_combination([(c, f"e{k + 1}") for k, c in enumerate(vec)])
            out.append(f"[e{i + 1}, e{j + 1}] = {rhs}")
    for key in ("derived", "omega", "symplectic", "exact", "contact", "h4"):
        if key not in af.claims:
            continue
        v = af.claims[key]
        if key == "omega":
            out.append(f"claim omega = {v}")
        elif isinstance(v, bool):
            out.append(f"claim {key} {'yes' if v else 'no'}")
        else:
            out.append(f"claim {key} {v}")
    return "\n".join(out) + "\n"


def algebra_to_file(g: LieAlgebra, style: str = "mc") -> AlgebraFile:
    n = g.dim
    labels = list(g.labels) if g.labels != tuple(f"e{i + 1}" for i in range(n)) else None
    af = AlgebraFile(dim=n, style=style, params=list(g.params), labels=labels, name=g.name)
    if style == "mc":
        af.mc = {k: f for k, f in enumerate(g.mc_differentials())}
    else:
        af.brackets = g.nonzero_brackets()
    return af


def _num(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# ---- chart files ------------------------------------------------------------------

@dataclass
class ChartFile:
    """Coordinate change: new variables as polynomials in old ones, plus the inverse."""

    forward: dict  # new name -> Poly in old names
    inverse: dict  # old name -> Poly in new names
    new_names: list
    old_names: list


def parse_chart(text: str, path: str = "") -> ChartFile:
    try:
        return _parse_chart(text)
    except ParseError as exc:
        if path and not exc.path:
            raise ParseError(exc.message, exc.line, exc.col, path) from None
        raise


def _parse_chart(text: str) -> ChartFile:
    section = "forward"
    raw = {"forward": [], "inverse": []}
    seen = False
    for lineno, line in enumerate(text.splitlines(), 1):
        _, s, col0 = _split_directive(line)
        if not s:
            continue
        if s.startswith("format"):
            if seen:
                raise ParseError("'format' must be the first directive", lineno, col0)
            if s.split()[1:] != [str(FORMAT_VERSION)]:
                raise ParseError("unsupported chart format", lineno, col0)
            seen = True
            continue
        seen = True
        if s.rstrip() == "inverse:":
            if section == "inverse":
                raise ParseError("duplicate 'inverse:' section", lineno, col0)
            section = "inverse"
            continue
        m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*=", s)
        if not m:
            raise ParseError("expected 'name = polynomial'", lineno, col0)
        raw[section].append((lineno, col0 + m.end(), m.group(1), s[m.end():]))
    if not raw["inverse"]:
        raise ParseError("chart file needs an 'inverse:' section", 1, 1)
    new_names = [r[2] for r in raw["forward"]]
    old_names = [r[2] for r in raw["inverse"]]
    for names, label in ((new_names, "chart"), (old_names, "inverse")):
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate variable in {label} section", 1, 1)
    if len(new_names) != len(old_names):
        raise ParseError("chart and inverse must have the same number of variables", 1, 1)
    forward = {name: _poly_at(body, old_names, lineno, col) for lineno, col, name, body in raw["forward"]}
    inverse = {name: _poly_at(body, new_names, lineno, col) for lineno, col, name, body in raw["inverse"]}
    return ChartFile(forward, inverse, new_names, old_names)


def _poly_at(body: str, names: list, lineno: int, col: int) -> Poly:
    toks = tokenize(body, lineno, basis=False)
    for t in toks:
        t.col += col - 1
    p = _Parser(toks, lineno, set(names))
    if not toks:
        raise ParseError("missing right-hand side", lineno, col)
    value = p.poly()
    p.done()
    return value


def format_chart(chart: ChartFile) -> str:
    out = [f"format {FORMAT_VERSION}"]
    for name in chart.new_names:
        out.append(f"{name} = {chart.forward[name].to_str(chart.old_names)}")
    out.append("inverse:")
    for name in chart.old_names:
        out.append(f"{name} = {chart.inverse[name].to_str(chart.new_names)}")
    return "\n".join(out) + "\n"


# ---- bundled data -------------------------------------------------------------------

def data_path(*parts: str):
    """Path of a file shipped in the package's data directory."""
    from importlib.resources import files
    return files("symplie").joinpath("data", *parts)


def load_algebra(path) -> AlgebraFile:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read(), str(path))


def load_chart(path) -> ChartFile:
    with open(path, encoding="utf-8") as fh:
        return parse_chart(fh.read(), str(path))


def bundled_corpus() -> list:
    """Every bundled classification entry, sorted by identifier."""
    folder = data_path("corpus")
    entries = [load_algebra(str(p)).to_entry() for p in folder.iterdir() if p.name.endswith(".alg")]
    return sorted(entries, key=lambda e: e.ident)
