"""Derivations and one-step suspensions g = h + R v with [v, x] = A x.

The new generator v always takes the last index of the suspended algebra.
Forms on h are pulled back along the projection g -> h by keeping their
components and leaving v* out.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .exterior import DimensionError, KForm, pfaffian
from .liealg import LieAlgebra, unit
from .poly import Poly
from .report import Report, combine
from .structures import StructureError, grid_values


class DerivationError(ValueError):
    pass


def _numeric_vector(v) -> list:
    return [Poly.coerce(c).constant_value() for c in v]


def _structure_tensor(h: LieAlgebra) -> dict:
    """c[(i, j)] = coefficient vector of [e_i, e_j] for all ordered pairs."""
    h.require_numeric("derivations")
    n = h.dim
    return {(i, j): _numeric_vector(h.bracket_basis(i, j)) for i in range(n) for j in range(n)}


class Derivation:
    """Leibniz endomorphism of ``h``. Column j of ``matrix`` is A e_j."""

    __slots__ = ("algebra", "matrix")

    def __init__(self, algebra: LieAlgebra, matrix: Sequence[Sequence], check: bool = True):
        n = algebra.dim
        m = linalg.to_fraction_matrix(matrix)
        if len(m) != n or any(len(r) != n for r in m):
            raise DimensionError(f"derivation of a {n}-dimensional algebra needs a {n}x{n} matrix")
        self.algebra = algebra
        self.matrix = m
        if check:
            bad = self.leibniz_defect()
            if bad is not None:
                i, j, resid = bad
                raise DerivationError(f"Leibniz rule fails on (e{i + 1}, e{j + 1}): residual {resid}")

    def apply(self, x: Sequence) -> list:
        return linalg.matvec(self.matrix, [Fraction(Poly.coerce(c).constant_value()) for c in x])

    def column(self, j: int) -> list:
        return [row[j] for row in self.matrix]

    def leibniz_defect(self):
        """First pair (i, j, residual) with A[e_i,e_j] != [Ae_i,e_j] + [e_i,Ae_j], else None."""
        h = self.algebra
        n = h.dim
        for i in range(n):
            for j in range(i + 1, n):
                lhs = self.apply(h.bracket_basis(i, j))
                r1 = _numeric_vector(h.bracket(self.column(i), unit(n, j)))
                r2 = _numeric_vector(h.bracket(unit(n, i), self.column(j)))
                resid = [a - b - c for a, b, c in zip(lhs, r1, r2)]
                if any(resid):
                    return i, j, resid
        return None

    def act_on_form(self, phi: KForm) -> KForm:
        """(A.phi)(x1..xk) = -sum_i phi(x1, .., A xi, .., xk)."""
        n = self.algebra.dim
        out = KForm.zero(n, phi.degree)
        for s in range(phi.degree):
            for idx, c in phi.items():
                # phi composed with A in slot s: e_{idx[s]}* o A = sum_j A[idx[s]][j] e_j*
                for j in range(n):
                    a = self.matrix[idx[s]][j]
                    if a:
                        new = idx[:s] + (j,) + idx[s + 1:]
                        if len(set(new)) == len(new):
                            out = out - KForm(n, phi.degree, {new: c * a})
        return out

    def __add__(self, other: "Derivation") -> "Derivation":
        m = [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)]
        return Derivation(self.algebra, m, check=False)

    def scale(self, c) -> "Derivation":
        c = Fraction(c)
        return Derivation(self.algebra, [[c * a for a in r] for r in self.matrix], check=False)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def __eq__(self, other) -> bool:
        return isinstance(other, Derivation) and self.matrix == other.matrix

    def __repr__(self) -> str:
        return f"Derivation({self.matrix})"


def inner_derivation(h: LieAlgebra, x: Sequence) -> Derivation:
    return Derivation(h, [[Poly.coerce(c).constant_value() for c in row] for row in h.ad(x)], check=False)


@dataclass(frozen=True)
class DerivationSpace:
    algebra: LieAlgebra
    basis: tuple
    inner: tuple
    outer: tuple  # representatives of a basis of H^1(h, h)

    @property
    def h1_dim(self) -> int:
        return len(self.basis) - len(self.inner)


def _flatten(m) -> list:
    return [a for row in m for a in row]


def leibniz_system(h: LieAlgebra) -> list:
    """Rows of the linear system in the n^2 unknowns A[k][m] (index k*n + m)."""
    n = h.dim
    c = _structure_tensor(h)
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            cij = c[(i, j)]
            for k in range(n):
                row = [Fraction(0)] * (n * n)
                for m in range(n):
                    row[k * n + m] += cij[m]            # A[e_i, e_j]
                    row[m * n + i] -= c[(m, j)][k]      # [A e_i, e_j]
                    row[m * n + j] -= c[(i, m)][k]      # [e_i, A e_j]
                if any(row):
                    rows.append(row)
    return rows


def derivation_space(h: LieAlgebra, lower_triangular: bool = False) -> DerivationSpace:
    """Der(h), the inner derivations and coset representatives for H^1(h, h).

    With ``lower_triangular`` only derivations mapping e_j into span(e_k : k < j)
    are kept; this is the nilpotent-preserving family used by the random
    generators.
    """
    n = h.dim
    rows = leibniz_system(h)
    if lower_triangular:
        for k in range(n):
            for m in range(k + 1):
                r = [Fraction(0)] * (n * n)
                r[k * n + m] = Fraction(1)
                rows.append(r)
    sols = linalg.nullspace(rows, n * n)
    basis = tuple(Derivation(h, [s[k * n:(k + 1) * n] for k in range(n)], check=False) for s in sols)
    inner_flat = linalg.row_space([_flatten(inner_derivation(h, unit(n, i)).matrix) for i in range(n)])
    inner = tuple(Derivation(h, [v[k * n:(k + 1) * n] for k in range(n)], check=False) for v in inner_flat)
    outer = []
    span = list(inner_flat)
    for d in basis:
        v = _flatten(d.matrix)
        if not linalg.in_span(span, v):
            outer.append(d)
            span.append(v)
    return DerivationSpace(h, basis, inner if not lower_triangular else (), tuple(outer))


# ---- suspension ------------------------------------------------------------

def suspend(h: LieAlgebra, a: Derivation | Sequence[Sequence]) -> LieAlgebra:
    """h + R v with [v, x] = A x; v is the last basis vector."""
    if not isinstance(a, Derivation):
        a = Derivation(h, a)
    elif a.algebra.dim != h.dim:
        raise DimensionError("derivation belongs to an algebra of another dimension")
    else:
        bad = a.leibniz_defect()
        if bad is not None:
            raise DerivationError(f"Leibniz rule fails on (e{bad[0] + 1}, e{bad[1] + 1})")
    n = h.dim
    brackets = {k: list(v) + [0] for k, v in h.nonzero_brackets().items()}
    for j in range(n):
        col = a.column(j)
        if any(col):
            brackets[(n, j)] = col + [0]
    labels = tuple(h.labels) + ("v",)
    return LieAlgebra(n + 1, brackets, labels=labels if "v" not in h.labels else None,
                      name=f"{h.name}+v" if h.name else "", check=True)


def lift_form(phi: KForm, dim: int) -> KForm:
    """Pullback of a form on h to h + R v."""
    return KForm(dim, phi.degree, dict(phi.items()))


def _constant_covector(alpha: KForm) -> list:
    if alpha.degree != 1:
        raise DimensionError("expected a 1-form")
    return [c.constant_value() for c in alpha.to_vector()]


def _kernel_of_two_form(omega: KForm, on: list | None = None) -> list:
    """Kernel of omega restricted to span(on) (default: whole space), as vectors."""
    n = omega.dim
    m = [[c.constant_value() for c in r] for r in omega.matrix()]
    basis = on if on is not None else linalg.identity(n)
    gram = [[sum(p[a] * m[a][b] * q[b] for a in range(n) for b in range(n)) for q in basis] for p in basis]
    out = []
    for coeffs in linalg.nullspace(gram, len(basis)):
        out.append([sum(coeffs[t] * basis[t][a] for t in range(len(basis))) for a in range(n)])
    return out


def _dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class SuspensionResult:
    """Outcome of one suspension attempt.

    ``form`` is alpha_+ for contactizations, omega on g otherwise; ``algebra``
    and ``form`` are set whenever a derivation was tried, even if the
    nondegeneracy test failed.
    """

    variant: str
    passed: bool
    algebra: LieAlgebra | None
    form: KForm | None
    certificate: Fraction
    derivation: Derivation | None
    report: Report
    details: dict = field(default_factory=dict)


def _vec_str(v, labels) -> str:
    from .exterior import format_linear_combination
    return format_linear_combination((Poly.coerce(c), labels[i]) for i, c in enumerate(v) if c)


def contactize(h: LieAlgebra, alpha: KForm, a: Derivation | None = None) -> SuspensionResult:
    """Contact structure alpha_+ on h + R v from a potential of a symplectic form on h."""
    h.require_numeric("contactization")
    n = h.dim
    if n % 2:
        raise DimensionError("contactization needs an even-dimensional algebra")
    da = h.d(alpha)
    if pfaffian(da).is_zero():
        raise StructureError("d alpha is degenerate")
    av = _constant_covector(alpha)
    pi = linalg.nullspace([av], n)
    ker = _kernel_of_two_form(da, pi)
    if len(ker) != 1:
        raise StructureError("d alpha restricted to Ker alpha has no one-dimensional kernel")
    w = ker[0]
    if a is None:
        i = next(k for k, c in enumerate(av) if c)
        a = inner_derivation(h, unit(n, i))
        source = f"ad_{h.labels[i]}"
    else:
        source = "supplied"
    g = suspend(h, a)
    cert = _dot(av, a.apply(w))
    alpha_plus = lift_form(alpha, n + 1)
    top = alpha_plus.wedge(g.d(alpha_plus).power(n // 2)).top_coefficient()
    direct = not top.is_zero()
    checks = [
        Report("transversality", cert != 0, f"alpha(A w) = {cert}, w = {_vec_str(w, h.labels)}"),
        Report("contact-form", direct, f"alpha+ ^ (d alpha+)^{n // 2} = {top} vol"),
    ]
    if direct != (cert != 0):
        checks.append(Report("criterion-agreement", False, "A w test and direct contact test disagree"))
    rep = combine("contactize", checks, f"derivation {source}")
    return SuspensionResult("contactize", rep.passed, g, alpha_plus, cert, a, rep,
                            details={"w": w, "pi": pi, "derivation_source": source})


def _reeb_direction(h: LieAlgebra, alpha: KForm) -> list:
    n = h.dim
    if n % 2 == 0:
        raise DimensionError("symplectization needs an odd-dimensional algebra")
    top = alpha.wedge(h.d(alpha).power(n // 2)).top_coefficient()
    if top.is_zero():
        raise StructureError("alpha is not a contact form")
    ker = _kernel_of_two_form(h.d(alpha))
    if len(ker) != 1:
        raise StructureError("Ker d alpha is not one-dimensional")
    return ker[0]


def _symplectize_with(h: LieAlgebra, alpha: KForm, w: list, a: Derivation, source: str) -> SuspensionResult:
    n = h.dim
    av = _constant_covector(alpha)
    cert = _dot(av, a.apply(w))
    g = suspend(h, a)
    omega = g.d(lift_form(alpha, n + 1))
    pf = pfaffian(omega)
    checks = [
        Report("transversality", cert != 0, f"alpha(A w) = {cert}, w = {_vec_str(w, h.labels)}"),
        Report("symplectic-form", not pf.is_zero(), f"Pf(d alpha+) = {pf}"),
    ]
    if pf.is_zero() == (cert != 0):
        checks.append(Report("criterion-agreement", False, "A w test and Pfaffian disagree"))
    rep = combine("symplectize", checks, f"derivation {source}")
    return SuspensionResult("symplectize", rep.passed, g, omega, cert, a, rep, details={"w": w})


def _candidates(reps: Sequence[Derivation], h: LieAlgebra, bound: int = 2):
    """The zero class, each representative, then integer combinations on the grid."""
    n = h.dim
    yield Derivation(h, linalg.zeros(n, n), check=False), "0"
    for t, d in enumerate(reps):
        yield d, f"outer[{t + 1}]"
    if len(reps) > 1:
        for coeffs in itertools.product(grid_values(bound), repeat=len(reps)):
            if sum(1 for c in coeffs if c) < 2:
                continue
            d = reps[0].scale(coeffs[0])
            for c, r in zip(coeffs[1:], reps[1:]):
                d = d + r.scale(c)
            yield d, "combination " + ",".join(str(c) for c in coeffs)


def symplectize_contact(h: LieAlgebra, alpha: KForm, a: Derivation | None = None) -> SuspensionResult:
    """omega = d alpha_+ on h + R v; with ``a`` omitted, H^1(h, h) is searched."""
    h.require_numeric("symplectization")
    w = _reeb_direction(h, alpha)
    if a is not None:
        return _symplectize_with(h, alpha, w, a, "supplied")
    space = derivation_space(h)
    last = None
    tried = 0
    for d, label in _candidates(space.outer, h):
        tried += 1
        last = _symplectize_with(h, alpha, w, d, label)
        if last.passed:
            return last
    rep = Report("symplectize", False,
                 f"no class in H^1 (dim {space.h1_dim}) moves the Reeb direction off Ker alpha",
                 details={"h1_dim": space.h1_dim, "tried": tried})
    return SuspensionResult("symplectize", False, None, None, Fraction(0), None, rep,
                            details={"w": w, "h1_dim": space.h1_dim})


def form_rank(omega: KForm) -> int:
    return linalg.rank([[c.constant_value() for c in r] for r in omega.matrix()])


def symplectize_2form(h: LieAlgebra, omega: KForm) -> SuspensionResult:
    """Symplectic Omega = omega + v* ^ alpha on h + R v with A.omega = d alpha and alpha(w) != 0."""
    h.require_numeric("symplectization")
    n = h.dim
    if n % 2 == 0:
        raise DimensionError("symplectization needs an odd-dimensional algebra")
    if omega.degree != 2 or omega.dim != n:
        raise DimensionError("expected a 2-form on the algebra")
    if not h.d(omega).is_zero():
        raise StructureError("omega is not closed")
    r = form_rank(omega)
    if r != n - 1:
        raise StructureError(f"omega has rank {r}, expected {n - 1}")
    w = _kernel_of_two_form(omega)[0]
    space = derivation_space(h)
    ders = list(space.basis)
    # unknowns: s_1..s_r (derivation coefficients), a_1..a_n (alpha); equations per 2-form component
    pairs = list(itertools.combinations(range(n), 2))
    images = [d.act_on_form(omega) for d in ders]
    dcov = [h.d(KForm.basis(n, k)) for k in range(n)]
    rows = []
    for p in pairs:
        row = [im.coeff(p).constant_value() for im in images] + [-dk.coeff(p).constant_value() for dk in dcov]
        rows.append(row)
    sols = linalg.nullspace(rows, len(ders) + n)
    functional = [_dot(s[len(ders):], w) for s in sols]
    chosen = None
    for s, val in zip(sols, functional):
        if val:
            chosen = s
            break
    details = {"w": w, "solution_dim": len(sols), "der_dim": len(ders)}
    if chosen is None:
        rep = Report("symplectize-2form", False,
                     "every solution of A.omega = d alpha has alpha(w) = 0", details={"solutions": len(sols)})
        return SuspensionResult("symplectize-2form", False, None, None, Fraction(0), None, rep, details=details)
    a = Derivation(h, linalg.zeros(n, n), check=False)
    for c, d in zip(chosen[:len(ders)], ders):
        if c:
            a = a + d.scale(c)
    av = chosen[len(ders):]
    g = suspend(h, a)
    alpha = KForm.from_covector(av)
    big = lift_form(omega, n + 1) + KForm.basis(n + 1, n).wedge(lift_form(alpha, n + 1))
    pf = pfaffian(big)
    closed = g.d(big).is_zero()
    cert = _dot(av, w)
    checks = [
        Report("transversality", cert != 0, f"alpha(w) = {cert}, alpha = {alpha}"),
        Report("closed", closed, f"d Omega = {g.d(big)}"),
        Report("nondegenerate", not pf.is_zero(), f"Pf(Omega) = {pf}"),
    ]
    rep = combine("symplectize-2form", checks)
    details["alpha"] = alpha
    return SuspensionResult("symplectize-2form", rep.passed, g, big, cert, a, rep, details=details)


# ---- random algebras -------------------------------------------------------

def _random_combination(rng: random.Random, ders: Sequence[Derivation], h: LieAlgebra, spread: int) -> Derivation:
    n = h.dim
    a = Derivation(h, linalg.zeros(n, n), check=False)
    for d in ders:
        c = rng.randint(-spread, spread)
        if c:
            a = a + d.scale(c)
    return a


def random_nilpotent(rng: random.Random, dim: int, spread: int = 2) -> LieAlgebra:
    """Nilpotent algebra built by suspending R with random strictly triangular derivations.

    Brackets satisfy [e_i, e_j] in span(e_k : k < min(i, j)) at every step,
    which keeps each ad_x strictly triangular.
    """
    g = LieAlgebra.abelian(1)
    while g.dim < dim:
        space = derivation_space(g, lower_triangular=True)
        g = suspend(g, _random_combination(rng, space.basis, g, spread))
    return LieAlgebra(dim, g.nonzero_brackets(), name="random-nilpotent", check=False)


def random_algebra(rng: random.Random, dim: int, spread: int = 2) -> LieAlgebra:
    """Random Lie algebra from iterated suspensions of R and a random change of basis."""
    g = LieAlgebra.abelian(1)
    while g.dim < dim:
        space = derivation_space(g)
        g = suspend(g, _random_combination(rng, space.basis, g, spread))
    while True:
        p = [[Fraction(rng.randint(-spread, spread)) for _ in range(dim)] for _ in range(dim)]
        if linalg.det(p):
            break
    return g.change_basis(p)
