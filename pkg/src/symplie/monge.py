"""Elliptic Monge-Ampere layer in dimension 4.

A frame (P1, P2, Q1, Q2) on a Lie algebra carries the canonical pair

    omega = P1* ^ Q1* + P2* ^ Q2*,    theta = P1* ^ Q2* - P2* ^ Q1*,

an almost complex structure j with omega(jX, Y) = theta(X, Y), and a
prescribed Nijenhuis tensor. For a nilpotent algebra the frame is written
as polynomial vector fields in exponential coordinates, the forms are
moved to a user-supplied Darboux chart (p, q) and the jet substitution
p_i = du/dq_i turns theta = 0 into a second-order equation for u.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Mapping, Sequence

from . import linalg
from .exterior import DimensionError, KForm, format_linear_combination, pfaffian, sort_sign
from .liealg import LieAlgebra, unit
from .poly import ONE, ZERO, Poly
from .report import Report, combine

FRAME_LABELS = ("P1", "P2", "Q1", "Q2")
P1, P2, Q1, Q2 = range(4)


class EStructureError(ValueError):
    pass


class ChartError(ValueError):
    pass


# ---- canonical data ------------------------------------------------------------

def canonical_omega() -> KForm:
    return KForm(4, 2, {(P1, Q1): 1, (P2, Q2): 1})


def canonical_theta() -> KForm:
    return KForm(4, 2, {(P1, Q2): 1, (P2, Q1): -1})


def canonical_j() -> list:
    """Matrix of j in the frame; column b is j(frame_b)."""
    m = linalg.zeros(4, 4)
    m[P2][P1] = Fraction(1)    # j P1 = P2
    m[P1][P2] = Fraction(-1)   # j P2 = -P1
    m[Q2][Q1] = Fraction(-1)   # j Q1 = -Q2
    m[Q1][Q2] = Fraction(1)    # j Q2 = Q1
    return m


def canonical_nijenhuis() -> dict:
    """Nonzero values of the prescribed tensor on frame pairs (a < b)."""
    def vec(k, s):
        v = [Fraction(0)] * 4
        v[k] = Fraction(s)
        return v
    return {
        (P1, Q1): vec(P2, -1),
        (P1, Q2): vec(P1, 1),
        (P2, Q1): vec(P1, -1),
        (P2, Q2): vec(P2, -1),
    }


# ---- pairing -------------------------------------------------------------------

def _numeric(x) -> Fraction:
    return Poly.coerce(x).constant_value()


def pfaffian_pairing(theta1: KForm, theta2: KForm, omega: KForm) -> Fraction:
    """theta1 ^ theta2 divided by omega ^ omega (ratio of top coefficients)."""
    if omega.dim != 4 or omega.degree != 2:
        raise DimensionError("the pairing is defined for 2-forms in dimension 4")
    ref = omega.wedge(omega).top_coefficient()
    if ref.is_zero():
        raise EStructureError("omega is degenerate")
    return _numeric(theta1.wedge(theta2).top_coefficient()) / _numeric(ref)


def pairing_gram(omega: KForm, basis: Sequence[KForm] | None = None) -> list:
    if basis is None:
        basis = [KForm.basis(4, i, j) for i, j in itertools.combinations(range(4), 2)]
    return [[pfaffian_pairing(a, b, omega) for b in basis] for a in basis]


def pairing_signature(omega: KForm) -> tuple:
    """(positive, negative) index of the pairing on all 2-forms."""
    return linalg.inertia(pairing_gram(omega))


def orthocomplement_signature(omega: KForm) -> tuple:
    """(positive, negative) index of the pairing restricted to omega's orthogonal complement."""
    basis = [KForm.basis(4, i, j) for i, j in itertools.combinations(range(4), 2)]
    row = [pfaffian_pairing(omega, b, omega) for b in basis]
    comp = []
    for v in linalg.nullspace([row], len(basis)):
        form = KForm.zero(4, 2)
        for c, b in zip(v, basis):
            if c:
                form = form + b.scale(c)
        comp.append(form)
    return linalg.inertia(pairing_gram(omega, comp))


# ---- almost complex structure ------------------------------------------------------

def _form_matrix(omega: KForm) -> list:
    return [[_numeric(c) for c in row] for row in omega.matrix()]


def j_from_theta(omega: KForm, theta: KForm) -> list:
    """Matrix J (columns are images) with omega(JX, Y) = theta(X, Y)."""
    if omega.dim != 4 or theta.dim != 4:
        raise DimensionError("j_from_theta works in dimension 4")
    if pfaffian(omega).is_zero():
        raise EStructureError("omega is degenerate")
    if not theta.wedge(omega).is_zero():
        raise EStructureError("theta ^ omega != 0")
    norm = pfaffian_pairing(theta, theta, omega)
    if norm != 1:
        raise EStructureError(f"<theta, theta> = {norm}, expected 1")
    # J^T Omega = Theta, hence J = Omega^{-1} Theta for antisymmetric matrices
    return linalg.matmul(linalg.inverse(_form_matrix(omega)), _form_matrix(theta))


def nijenhuis(g: LieAlgebra, j: Sequence[Sequence]) -> dict:
    """N(e_a, e_b) for a < b as coefficient vectors."""
    g.require_numeric("the Nijenhuis tensor")
    n = g.dim
    return {(a, b): nijenhuis_pair(g, j, unit(n, a), unit(n, b)) for a in range(n) for b in range(a + 1, n)}


def nijenhuis_pair(g: LieAlgebra, j: Sequence[Sequence], x: Sequence, y: Sequence) -> list:
    """N(x, y) = [jx, jy] - j[jx, y] - j[x, jy] - [x, y]."""
    j = linalg.to_fraction_matrix(j)
    x = [_numeric(c) for c in x]
    y = [_numeric(c) for c in y]

    def br(u, v):
        return [_numeric(c) for c in g.bracket(u, v)]

    jx, jy = linalg.matvec(j, x), linalg.matvec(j, y)
    t0, t1, t2, t3 = br(jx, jy), linalg.matvec(j, br(jx, y)), linalg.matvec(j, br(x, jy)), br(x, y)
    return [a - b - c - d for a, b, c, d in zip(t0, t1, t2, t3)]


# ---- {e}-structures ----------------------------------------------------------------

@dataclass(frozen=True)
class EStructure:
    """A 4-dimensional algebra with a frame; column a of ``frame`` is frame vector a."""

    algebra: LieAlgebra
    frame: tuple = ()
    labels: tuple = FRAME_LABELS

    def frame_matrix(self) -> list:
        if not self.frame:
            return linalg.identity(4)
        return linalg.to_fraction_matrix(self.frame)

    def framed_algebra(self) -> LieAlgebra:
        """The algebra rewritten so that the frame is its standard basis."""
        if self.algebra.dim != 4:
            raise DimensionError("an {e}-structure here lives on a 4-dimensional algebra")
        if not self.frame:
            g = self.algebra
        else:
            g = self.algebra.change_basis(self.frame_matrix())
        return LieAlgebra(4, g.nonzero_brackets(), labels=self.labels, name=self.algebra.name, check=False)


CLOSEDNESS_RELATIONS = (
    # ((i, j, k) 1-based c^k_ij terms with signs), component of d omega it mirrors
    (((1, 2, 1), 1), ((2, 3, 3), -1), ((1, 3, 4), 1)),
    (((1, 2, 2), 1), ((2, 4, 3), -1), ((1, 4, 4), 1)),
    (((1, 4, 1), 1), ((1, 3, 2), -1), ((3, 4, 3), 1)),
    (((2, 4, 1), 1), ((2, 3, 2), -1), ((3, 4, 4), 1)),
)
RELATION_COMPONENTS = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
# relation value = sign * (d omega on the component)
RELATION_SIGNS = (-1, -1, 1, 1)


def _relation_str(rel) -> str:
    out = ""
    for (i, j, k), s in rel:
        out += (" - " if s < 0 else (" + " if out else "")) + f"c^{k}_{i}{j}"
    return out


def closedness_relations(g: LieAlgebra) -> list:
    """Values of the four linear relations on structure constants that express d omega = 0."""
    return [sum((s * _numeric(g.structure_constant(i - 1, j - 1, k - 1)) for (i, j, k), s in rel), Fraction(0))
            for rel in CLOSEDNESS_RELATIONS]


def verify_e_structure(es: EStructure) -> Report:
    g = es.framed_algebra()
    checks = [g.jacobi_check()]
    if not checks[0].passed:
        return combine("e-structure", checks)
    omega, theta = canonical_omega(), canonical_theta()

    rel_values = closedness_relations(g)
    domega = g.d(omega)
    rel_reports = []
    for rel, value, comp in zip(CLOSEDNESS_RELATIONS, rel_values, RELATION_COMPONENTS):
        rel_reports.append(Report("relation", value == 0, f"{_relation_str(rel)} = {value}"))
    agree = all(s * _numeric(domega.coeff(comp)) == v
                for comp, s, v in zip(RELATION_COMPONENTS, RELATION_SIGNS, rel_values))
    rel_reports.append(Report("relations-match-d", agree, f"d omega = {domega.to_str(_star(es.labels))}"))
    checks.append(combine("condition-1-closed", rel_reports))

    j = j_from_theta(omega, theta)
    checks.append(Report("j-canonical", j == canonical_j(), "j from i_j omega = theta"))
    n_actual = nijenhuis(g, j)
    n_target = canonical_nijenhuis()
    mismatched = []
    for pair, v in n_actual.items():
        want = n_target.get(pair, [Fraction(0)] * 4)
        if v != want:
            mismatched.append(f"N({es.labels[pair[0]]},{es.labels[pair[1]]}) = {_vec(v, es.labels)}, "
                              f"expected {_vec(want, es.labels)}")
    checks.append(Report("condition-2-nijenhuis", not mismatched,
                         "; ".join(mismatched) if mismatched else "N_j equals the canonical tensor"))
    return combine("e-structure", checks)


def _star(labels) -> list:
    return [f"{x}*" for x in labels]


def _vec(v, labels) -> str:
    return format_linear_combination((Poly.const(c), labels[i]) for i, c in enumerate(v) if c)


# ---- polynomial forms ----------------------------------------------------------

class PolyForm(KForm):
    """Differential form with polynomial coefficients in named coordinates."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[str], degree: int, terms: Mapping | None = None):
        super().__init__(len(coords), degree, terms)
        self.coords = tuple(coords)

    def _copy_extra(self, out) -> None:
        out.coords = self.coords

    @classmethod
    def differential(cls, coords: Sequence[str], i: int) -> "PolyForm":
        return cls(coords, 1, {(i,): ONE})

    @classmethod
    def from_kform(cls, coords: Sequence[str], form: KForm) -> "PolyForm":
        return cls(coords, form.degree, dict(form.items()))

    def _check_same(self, other) -> None:
        super()._check_same(other)
        if isinstance(other, PolyForm) and other.coords != self.coords:
            raise DimensionError("forms live in different coordinate systems")

    def d(self) -> "PolyForm":
        """Exterior derivative in the coordinates."""
        out: dict = {}
        for idx, c in self.items():
            for k, name in enumerate(self.coords):
                dc = c.diff(name)
                if dc.is_zero():
                    continue
                sign, key = sort_sign((k,) + idx)
                if sign:
                    out[key] = out.get(key, ZERO) + (dc if sign > 0 else -dc)
        return self._new(self.degree + 1, out)

    def to_str(self, names=None, wedge: str = "^") -> str:
        if names is None:
            names = [f"d{x}" for x in self.coords]
        return super().to_str(names, wedge)

    def __repr__(self) -> str:
        return f"PolyForm({self.coords}, {self.degree}, {self.to_str()!r})"


def coordinate_names(n: int, prefix: str = "x") -> list:
    return [f"{prefix}{i + 1}" for i in range(n)]


# ---- exponential coordinates ----------------------------------------------------

def bch_coefficients(count: int) -> list:
    """Taylor coefficients of z / (1 - exp(-z)): 1, 1/2, 1/12, 0, -1/720, ..."""
    bern = [Fraction(1)]
    for m in range(1, count):
        bern.append(-sum(comb(m + 1, k) * bern[k] for k in range(m)) / (m + 1))
    if count > 1:
        bern[1] = -bern[1]
    return [b / factorial(k) for k, b in enumerate(bern)]


MAX_CLASS = 8


def left_invariant_frame(g: LieAlgebra, coords: Sequence[str] | None = None, max_class: int = MAX_CLASS) -> list:
    """Left-invariant fields X_i with X_i(0) = e_i in exponential coordinates.

    X_eps(x) = sum_n b_n ad_x^n eps with b_n the coefficients of
    z / (1 - exp(-z)); the sum stops at the nilpotency class. Entry [i][k]
    is the d/dx_k component of X_i.
    """
    g.require_numeric("exponential coordinates")
    if not g.is_nilpotent():
        raise ValueError("left_invariant_frame needs a nilpotent algebra")
    cls = g.nilpotency_class()
    if cls > max_class:
        raise ValueError(f"nilpotency class {cls} exceeds the cap {max_class}")
    n = g.dim
    coords = list(coords or coordinate_names(n))
    x = [Poly.var(c) for c in coords]
    b = bch_coefficients(cls + 1)
    frame = []
    for i in range(n):
        term = unit(n, i)
        field_ = list(term)
        for k in range(1, cls + 1):
            term = g.bracket(x, term)
            if b[k]:
                field_ = [f + t * b[k] for f, t in zip(field_, term)]
        frame.append(field_)
    return frame


def _matmul_poly(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = [[ZERO] * p for _ in range(n)]
    for i in range(n):
        for k in range(m):
            if a[i][k].is_zero():
                continue
            for j in range(p):
                if not b[k][j].is_zero():
                    out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def dual_coframe(frame: Sequence[Sequence[Poly]], coords: Sequence[str] | None = None) -> list:
    """1-forms theta^i with theta^i(X_j) = delta_ij, by a terminating Neumann series."""
    n = len(frame)
    coords = list(coords or coordinate_names(n))
    # F[k][i] = d/dx_k component of X_i; coframe matrix is F^{-1}, row i gives theta^i
    f = [[Poly.coerce(frame[i][k]) for i in range(n)] for k in range(n)]
    nil = [[f[k][i] - (ONE if k == i else ZERO) for i in range(n)] for k in range(n)]
    neg = [[-c for c in row] for row in nil]
    inv = [[ONE if k == i else ZERO for i in range(n)] for k in range(n)]
    power = inv
    for _ in range(n):
        power = _matmul_poly(power, neg)
        if all(c.is_zero() for row in power for c in row):
            break
        inv = [[a + b for a, b in zip(r, s)] for r, s in zip(inv, power)]
    else:
        raise ValueError("frame matrix is not unipotent")
    return [PolyForm(coords, 1, {(k,): inv[i][k] for k in range(n)}) for i in range(n)]


def pair(form: KForm, field_: Sequence[Poly]) -> Poly:
    """Value of a 1-form on a vector field."""
    return sum((c * Poly.coerce(field_[idx[0]]) for idx, c in form.items()), ZERO)


def maurer_cartan_defects(g: LieAlgebra, coframe: Sequence[PolyForm]) -> list:
    """Indices k where d theta^k != -sum_{i<j} c^k_ij theta^i ^ theta^j."""
    n = g.dim
    bad = []
    for k in range(n):
        rhs = PolyForm(coframe[k].coords, 2)
        for (i, j), v in g.nonzero_brackets().items():
            if v[k]:
                rhs = rhs - coframe[i].wedge(coframe[j]).scale(v[k])
        if coframe[k].d() != rhs:
            bad.append(k)
    return bad


@dataclass(frozen=True)
class CoordinateData:
    frame: list
    coframe: list
    omega: PolyForm
    theta: PolyForm


def coordinate_forms(es: EStructure, coords: Sequence[str] | None = None) -> CoordinateData:
    g = es.framed_algebra()
    frame = left_invariant_frame(g, coords)
    coframe = dual_coframe(frame, coords)
    bad = maurer_cartan_defects(g, coframe)
    if bad:
        raise EStructureError(f"coframe fails the Maurer-Cartan equations for index {bad[0] + 1}")
    omega = coframe[P1].wedge(coframe[Q1]) + coframe[P2].wedge(coframe[Q2])
    theta = coframe[P1].wedge(coframe[Q2]) - coframe[P2].wedge(coframe[Q1])
    if not omega.d().is_zero():
        raise EStructureError(f"d omega = {omega.d()} in coordinates")
    return CoordinateData(frame, coframe, omega, theta)


def field_str(field_: Sequence[Poly], coords: Sequence[str]) -> str:
    return format_linear_combination((Poly.coerce(c), f"d/d{x}") for c, x in zip(field_, coords))


# ---- charts ----------------------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    """New coordinates as polynomials in the old ones, with a polynomial inverse."""

    forward: dict
    inverse: dict
    new_names: tuple
    old_names: tuple

    @classmethod
    def from_file(cls, cf) -> "Chart":
        return cls(dict(cf.forward), dict(cf.inverse), tuple(cf.new_names), tuple(cf.old_names))

    @classmethod
    def identity(cls, names: Sequence[str]) -> "Chart":
        m = {x: Poly.var(x) for x in names}
        return cls(m, dict(m), tuple(names), tuple(names))

    def verify(self) -> Report:
        there = [self.forward[y].subs(self.inverse) - Poly.var(y) for y in self.new_names]
        back = [self.inverse[x].subs(self.forward) - Poly.var(x) for x in self.old_names]
        checks = []
        for label, names, resid in (("forward-after-inverse", self.new_names, there),
                                    ("inverse-after-forward", self.old_names, back)):
            bad = [f"{x}: residual {r}" for x, r in zip(names, resid) if not r.is_zero()]
            checks.append(Report(label, not bad, "; ".join(bad) if bad else "identity"))
        return combine("chart", checks)


def apply_chart(forms: Sequence[PolyForm], chart: Chart, check: bool = True) -> list:
    """Rewrite forms given in the old coordinates in the new ones."""
    if check:
        rep = chart.verify()
        if not rep.passed:
            raise ChartError("supplied inverse is not inverse to the chart: " + "; ".join(
                c.message for c in rep.failed_children()))
    new = list(chart.new_names)
    old_pos = {x: k for k, x in enumerate(chart.old_names)}
    diffs = []
    for x in chart.old_names:
        phi = chart.inverse[x]
        diffs.append(PolyForm(new, 1, {(l,): phi.diff(y) for l, y in enumerate(new)}))
    out = []
    for form in forms:
        if set(form.coords) != set(chart.old_names):
            raise ChartError(f"form coordinates {form.coords} do not match the chart's {chart.old_names}")
        result = PolyForm(new, form.degree)
        for idx, c in form.items():
            term = PolyForm(new, 0, {(): c.subs(chart.inverse)})
            for i in idx:
                term = term.wedge(diffs[old_pos[form.coords[i]]])
            result = result + term
        if check and form.degree < len(new) and form.d().is_zero() and not result.d().is_zero():
            raise ChartError("closedness was not preserved by the chart")
        out.append(result)
    return out


# ---- jet substitution -------------------------------------------------------------

JET_ORDER = ["u11", "u12", "u22", "u1", "u2", "q1", "q2"]


@dataclass(frozen=True)
class JetPolynomial:
    """Polynomial in q1, q2, u1, u2, u11, u12, u22, normalized as an equation = 0."""

    poly: Poly
    raw: Poly = field(default=ZERO, compare=False)

    @classmethod
    def normalize(cls, p: Poly) -> "JetPolynomial":
        if p.is_zero():
            return cls(p, p)
        q = p / p.content()
        lead = q.sorted_terms(JET_ORDER)[0][1]
        if lead < 0:
            q = -q
        return cls(q, p)

    def terms(self) -> list:
        return [(dict(m), c) for m, c in self.poly.sorted_terms(JET_ORDER)]

    def display(self) -> str:
        return f"{self.poly.to_str(JET_ORDER, mul='*', power='^')} = 0"

    def __str__(self) -> str:
        return self.display()

    def hessian_shape(self) -> tuple:
        """(A, B, C, D, E) with poly = A (u11 u22 - u12^2) + B u11 + C u12 + D u22 + E, or None."""
        p = self.poly
        second = ("u11", "u12", "u22")
        coeff = {}
        for mono, c in p.items():
            key = tuple((x, e) for x, e in mono if x in second)
            other = Poly({tuple((x, e) for x, e in mono if x not in second): c})
            coeff[key] = coeff.get(key, ZERO) + other
        allowed = {(), (("u11", 1),), (("u12", 1),), (("u22", 1),), (("u11", 1), ("u22", 1)), (("u12", 2),)}
        if set(coeff) - allowed:
            return None
        a = coeff.get((("u11", 1), ("u22", 1)), ZERO)
        if coeff.get((("u12", 2),), ZERO) != -a:
            return None
        return (a, coeff.get((("u11", 1),), ZERO), coeff.get((("u12", 1),), ZERO),
                coeff.get((("u22", 1),), ZERO), coeff.get((), ZERO))


def emit_pde(theta: PolyForm) -> JetPolynomial:
    """Substitute p_i = du/dq_i into theta and return the dq1 ^ dq2 coefficient."""
    names = set(theta.coords)
    need = {"p1", "p2", "q1", "q2"}
    if names != need:
        raise ChartError(f"expected chart coordinates p1, p2, q1, q2, got {', '.join(theta.coords)}")
    stray = theta.variables() - need
    if stray:
        raise ChartError(f"coefficients depend on variables outside the chart: {', '.join(sorted(stray))}")
    if theta.degree != 2:
        raise DimensionError("emit_pde needs a 2-form")
    u = {"p1": Poly.var("u1"), "p2": Poly.var("u2")}
    diff = {
        "p1": KForm(2, 1, {(0,): Poly.var("u11"), (1,): Poly.var("u12")}),
        "p2": KForm(2, 1, {(0,): Poly.var("u12"), (1,): Poly.var("u22")}),
        "q1": KForm.basis(2, 0),
        "q2": KForm.basis(2, 1),
    }
    total = KForm.zero(2, theta.degree)
    for idx, c in theta.items():
        term = KForm.scalar(2, c.subs(u))
        for i in idx:
            term = term.wedge(diff[theta.coords[i]])
        total = total + term
    return JetPolynomial.normalize(total.coeff((0, 1)))
