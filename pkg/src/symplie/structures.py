"""Contact, symplectic and exact symplectic structures on Lie algebras.

Every existence question is reduced to a polynomial in the coordinates of a
generic form (a covector, or a closed 2-form written on a basis of Z^2).
The structure exists iff that polynomial is not identically zero, which is
decided by full expansion. A concrete rational witness is then found on an
integer grid with more points per axis than the polynomial's degree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .exterior import DimensionError, KForm, pfaffian, symbolic_covector
from .liealg import LieAlgebra, ParameterError
from .poly import ONE, ZERO, Poly
from .report import Report, combine


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class StructureWitness:
    kind: str  # "contact" | "symplectic" | "exact-symplectic"
    form: KForm
    certificate: Fraction
    potential: KForm | None = None


# ---- grid search -----------------------------------------------------------

def grid_values(bound: int) -> list:
    """0, 1, -1, 2, -2, ..., bound, -bound."""
    out = [0]
    for k in range(1, bound + 1):
        out += [k, -k]
    return out


def grid_search(poly: Poly, names: Sequence[str], bound: int | None = None) -> dict | None:
    """First integer point of [-D, D]^n (D = degree + 1) where ``poly`` is nonzero.

    Points are visited lexicographically, each axis in the order of
    :func:`grid_values`. Returns None only for the zero polynomial.
    """
    if poly.is_zero():
        return None
    if bound is None:
        bound = max(poly.total_degree(), 0) + 1
    values = grid_values(bound)
    for point in itertools.product(values, repeat=len(names)):
        assignment = dict(zip(names, point))
        if poly.evaluate(assignment) != 0:
            return {k: Fraction(v) for k, v in assignment.items()}
    raise AssertionError("nonzero polynomial vanished on a grid finer than its degree")


def _coords(prefix: str, n: int) -> list:
    return [f"{prefix}{i + 1}" for i in range(n)]


# ---- contact ---------------------------------------------------------------

def genre(g: LieAlgebra, alpha: KForm) -> int:
    """Highest degree of a nonzero form among alpha, d alpha, alpha^d alpha, (d alpha)^2, ..."""
    g.require_numeric("genre")
    if alpha.degree != 1:
        raise DimensionError("genre needs a 1-form")
    if alpha.is_zero():
        raise StructureError("genre of the zero form is undefined")
    da = g.d(alpha)
    best = 1
    power = KForm.scalar(g.dim, ONE)
    for k in range(1, g.dim // 2 + 1):
        power = power.wedge(da)
        if not power.is_zero():
            best = max(best, 2 * k)
        if 2 * k + 1 <= g.dim and not alpha.wedge(power).is_zero():
            best = max(best, 2 * k + 1)
    return best


def contact_polynomial(g: LieAlgebra, prefix: str = "_a") -> Poly:
    """Top coefficient of alpha ^ (d alpha)^m for the generic covector alpha."""
    n = g.dim
    if n % 2 == 0:
        raise DimensionError(f"contact structures need odd dimension, got {n}")
    alpha = symbolic_covector(n, prefix)
    return alpha.wedge(g.d(alpha).power(n // 2)).top_coefficient()


def is_contact(g: LieAlgebra) -> Report:
    g.require_numeric("the contact test")
    n = g.dim
    names = _coords("_a", n)
    poly = contact_polynomial(g)
    if poly.is_zero():
        return Report("contact", False, "alpha ^ (d alpha)^m vanishes identically",
                      details={"certificate_polynomial": "0"})
    point = grid_search(poly, names)
    coeffs = [point[x] for x in names]
    alpha = KForm.from_covector(coeffs)
    value = poly.evaluate(point)
    witness = StructureWitness("contact", alpha, value)
    return Report("contact", True, f"alpha = {alpha}", witness=witness,
                  details={"certificate_polynomial": _rename(poly, names, "a").to_str(), "certificate": str(value)})


def contact_sign(g: LieAlgebra, alpha: KForm, orientation: KForm | None = None) -> int:
    """Sign of (alpha ^ d alpha) relative to an orientation of a 3-dimensional algebra."""
    g.require_numeric("contact_sign")
    if g.dim != 3:
        raise DimensionError("contact_sign is defined for 3-dimensional algebras")
    if orientation is None:
        orientation = KForm.volume(3)
    ref = orientation.top_coefficient()
    if ref.is_zero():
        raise StructureError("orientation form is zero")
    value = alpha.wedge(g.d(alpha)).top_coefficient()
    if value.is_zero():
        raise StructureError("alpha is not a contact form")
    ratio = value.constant_value() / ref.constant_value()
    return 1 if ratio > 0 else -1


# ---- symplectic ------------------------------------------------------------

def closed_two_forms(g: LieAlgebra) -> list:
    """Rational basis of Z^2 = ker(d : C^2 -> C^3)."""
    g.require_numeric("closed 2-forms")
    n = g.dim
    ncols = math.comb(n, 2)
    if n < 3:
        basis = linalg.nullspace([], ncols)
    else:
        basis = linalg.nullspace(g.d_matrix(2), ncols)
    return [KForm.from_vector(n, 2, v) for v in basis]


def _require_even(g: LieAlgebra) -> None:
    if g.dim % 2:
        raise DimensionError(f"symplectic structures need even dimension, got {g.dim}")


def has_symplectic(g: LieAlgebra) -> Report:
    g.require_numeric("the symplectic test")
    _require_even(g)
    basis = closed_two_forms(g)
    names = _coords("_t", len(basis))
    generic = KForm.zero(g.dim, 2)
    for name, z in zip(names, basis):
        generic = generic + z.scale(Poly.var(name))
    poly = pfaffian(generic)
    details = {"closed_2forms": len(basis)}
    if poly.is_zero():
        return Report("symplectic", False, "Pf vanishes identically on Z^2", details=details)
    point = grid_search(poly, names)
    omega = generic.subs(point)
    value = pfaffian(omega).constant_value()
    details["certificate"] = str(value)
    return Report("symplectic", True, f"omega = {omega}",
                  witness=StructureWitness("symplectic", omega, value), details=details)


def exact_symplectic_polynomial(g: LieAlgebra, prefix: str = "_f") -> Poly:
    """Pf(d f) for the generic covector f."""
    _require_even(g)
    return pfaffian(g.d(symbolic_covector(g.dim, prefix)))


def has_exact_symplectic(g: LieAlgebra) -> Report:
    g.require_numeric("the exact symplectic test")
    _require_even(g)
    names = _coords("_f", g.dim)
    poly = exact_symplectic_polynomial(g)
    if poly.is_zero():
        return Report("exact-symplectic", False, "Pf(d f) vanishes identically")
    point = grid_search(poly, names)
    f = KForm.from_covector([point[x] for x in names])
    omega = g.d(f)
    value = pfaffian(omega).constant_value()
    return Report("exact-symplectic", True, f"f = {f}, d f = {omega}",
                  witness=StructureWitness("exact-symplectic", omega, value, potential=f),
                  details={"pfaffian_polynomial": _rename(poly, names, "f").to_str(), "certificate": str(value)})


def is_exact(g: LieAlgebra, omega: KForm) -> bool:
    """True iff omega = d f for some covector f."""
    g.require_numeric("the exactness test")
    if not g.d(omega).is_zero():
        raise StructureError("form is not closed")
    target = [c.constant_value() for c in omega.to_vector()]
    m = g.d_matrix(1)
    return linalg.solve(m, target) is not None


def is_nondegenerate(omega: KForm) -> bool:
    return omega.dim % 2 == 0 and not pfaffian(omega).is_zero()


def _rename(poly: Poly, names: Sequence[str], prefix: str) -> Poly:
    return poly.subs({x: Poly.var(f"{prefix}{i + 1}") for i, x in enumerate(names)})


# ---- corpus ----------------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    """One algebra of the classification tables with the properties claimed for it."""

    ident: str
    algebra: LieAlgebra
    derived_dim: int | None = None
    omega: KForm | None = None
    exact: bool | None = None
    contact: bool | None = None
    symplectic: bool | None = None
    h4_dim: int | None = None
    samples: tuple = ()
    source: str = ""

    def sample_points(self) -> list:
        if self.samples:
            return [dict(s) for s in self.samples]
        return [{}]


def verify_corpus_entry(entry: CorpusEntry, params: Mapping | None = None) -> Report:
    """Check one entry at one rational parameter assignment.

    Order: Jacobi, dim of the derived algebra, the stated omega (closed and
    nondegenerate), symplectic/contact verdicts, exactness flags, H^4.
    """
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    missing = entry.algebra.parameter_names() - set(params)
    if missing:
        raise ParameterError(f"{entry.ident}: no value for parameter(s) {', '.join(sorted(missing))}")
    g = entry.algebra.substitute(params)
    checks = []
    jac = g.jacobi_check()
    checks.append(jac)
    if not jac.passed:
        return combine(entry.ident, checks, _param_str(params))

    if entry.derived_dim is not None:
        dd = g.derived_dim()
        checks.append(Report("derived-dim", dd == entry.derived_dim,
                             f"dim g' = {dd} (claimed {entry.derived_dim})"))

    if entry.omega is not None:
        om = entry.omega.subs(params)
        closed = g.d(om).is_zero()
        checks.append(Report("omega-closed", closed, f"d({om}) = {g.d(om)}"))
        pf = pfaffian(om) if g.dim % 2 == 0 else ZERO
        checks.append(Report("omega-nondegenerate", not pf.is_zero(), f"Pf(omega) = {pf}"))

    if entry.symplectic is not None:
        rep = has_symplectic(g)
        checks.append(_expect(rep, entry.symplectic, "symplectic"))

    if entry.contact is not None:
        rep = is_contact(g)
        checks.append(_expect(rep, entry.contact, "contact"))
        if rep.passed:
            gen = genre(g, rep.witness.form)
            checks.append(Report("contact-genre", gen == g.dim, f"genre of witness = {gen}"))

    if entry.exact is not None:
        rep = has_exact_symplectic(g)
        checks.append(_expect(rep, entry.exact, "exact-symplectic"))
        if rep.passed:
            w = rep.witness
            checks.append(Report("witness-exact", is_exact(g, w.form), "d f lies in d(C^1)"))
            orbit = g.coadjoint_tangent_dim([c.constant_value() for c in w.potential.to_vector()])
            checks.append(Report("coadjoint-orbit-open", orbit == g.dim,
                                 f"dim T_f O = {orbit}", details={"potential": str(w.potential)}))
        if not entry.exact and entry.omega is not None:
            om = entry.omega.subs(params)
            if g.d(om).is_zero():
                ex = is_exact(g, om)
                checks.append(Report("omega-not-exact", not ex, "stated omega is " + ("exact" if ex else "not exact")))

    if entry.h4_dim is not None:
        h4 = g.cohomology_dim(4)
        checks.append(Report("H4", h4 == entry.h4_dim, f"dim H^4 = {h4} (claimed {entry.h4_dim})"))

    return combine(entry.ident, checks, _param_str(params))


def verify_entry_all_samples(entry: CorpusEntry) -> Report:
    """Symbolic Jacobi on the family plus :func:`verify_corpus_entry` at every sample."""
    children = [Report("jacobi-symbolic", *_jac(entry.algebra))]
    for point in entry.sample_points():
        children.append(verify_corpus_entry(entry, point))
    return combine(entry.ident, children, entry.source)


def _jac(g: LieAlgebra) -> tuple:
    rep = g.jacobi_check()
    return rep.passed, ("in all parameters" if rep.passed else rep.message)


def _expect(rep: Report, claimed: bool, name: str) -> Report:
    ok = rep.passed == claimed
    verdict = "exists" if rep.passed else "none"
    return Report(name, ok, f"{verdict} (claimed {'exists' if claimed else 'none'}); {rep.message}",
                  witness=rep.witness, details=rep.details)


def _param_str(params: Mapping) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(params.items()))
