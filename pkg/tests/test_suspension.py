import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from symplie import linalg
from symplie.exterior import DimensionError, KForm, pfaffian
from symplie.formats import bundled_corpus
from symplie.liealg import LieAlgebra, heisenberg3, sl2, filiform4, unit
from symplie.structures import StructureError, has_exact_symplectic, has_symplectic, is_contact
from symplie.suspension import (Derivation, DerivationError, contactize, derivation_space, inner_derivation,
                                random_algebra, random_nilpotent, suspend, symplectize_2form,
                                symplectize_contact)

e = KForm.basis
CORPUS = {entry.ident: entry for entry in bundled_corpus()}


def r2():
    # [x, y] = x
    return LieAlgebra(2, {(0, 1): [1, 0]})


def _der_dim_oracle(g):
    """Dimension of Der(g) from the Leibniz equations assembled in sympy."""
    n = g.dim
    a = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"a{i}_{j}"))
    c = [[[sympy.Rational(str(g.structure_constant(i, j, k).constant_value())) for k in range(n)]
          for j in range(n)] for i in range(n)]

    def br(x, y):
        return sympy.Matrix([sum(x[i] * y[j] * c[i][j][k] for i in range(n) for j in range(n))
                             for k in range(n)])

    eqs = []
    for i in range(n):
        for j in range(i + 1, n):
            ei, ej = sympy.eye(n)[:, i], sympy.eye(n)[:, j]
            eqs.extend(a * br(ei, ej) - br(a * ei, ej) - br(ei, a * ej))
    syms = list(a)
    m = sympy.Matrix([[sympy.diff(q, s) for s in syms] for q in eqs]) if eqs else sympy.zeros(0, n * n)
    return n * n - m.rank()


@pytest.mark.parametrize("make,der,inner", [
    (heisenberg3, 6, 2), (sl2, 3, 3), (lambda: LieAlgebra.abelian(3), 9, 0), (filiform4, 7, 3),
])
def test_derivation_space_dimensions(make, der, inner):
    g = make()
    space = derivation_space(g)
    assert len(space.basis) == der == _der_dim_oracle(g)
    assert len(space.inner) == inner
    assert space.h1_dim == der - inner == len(space.outer)


@given(st.integers(0, 2**32), st.integers(3, 5))
@settings(max_examples=15)
def test_derivation_dimension_on_random_algebras(seed, dim):
    g = random_algebra(random.Random(seed), dim)
    assert len(derivation_space(g).basis) == _der_dim_oracle(g)


def test_derivation_basis_satisfies_leibniz():
    for g in (heisenberg3(), sl2(), filiform4()):
        for d in derivation_space(g).basis:
            assert d.leibniz_defect() is None


def test_suspend_heisenberg_by_diagonal():
    h = heisenberg3()
    g = suspend(h, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert g.dim == 4 and g.jacobi_check().passed
    assert g.bracket(unit(4, 3), unit(4, 0)) == [2, 0, 0, 0]
    # h is an ideal with its own brackets
    for i in range(3):
        for j in range(3):
            assert g.bracket(unit(4, i), unit(4, j))[:3] == h.bracket(unit(3, i), unit(3, j))
            assert g.bracket(unit(4, i), unit(4, j))[3] == 0


def test_zero_derivation_gives_direct_sum():
    h = sl2()
    assert suspend(h, [[0] * 3] * 3) == h.direct_sum(LieAlgebra.abelian(1))


@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_every_matrix_is_a_derivation_of_the_abelian_algebra(entries):
    m = [entries[0:3], entries[3:6], entries[6:9]]
    assert suspend(LieAlgebra.abelian(3), m).jacobi_check().passed


def test_leibniz_violation_is_rejected():
    with pytest.raises(DerivationError):
        suspend(heisenberg3(), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_contactize_two_dimensional():
    res = contactize(r2(), e(2, 0).scale(-1))
    assert res.passed
    g = res.algebra
    assert g.dim == 3 and g.jacobi_check().passed
    top = res.form.wedge(g.d(res.form)).top_coefficient()
    assert not top.is_zero()
    assert is_contact(g).passed


def test_contactize_with_zero_derivation_fails():
    res = contactize(r2(), e(2, 0).scale(-1), Derivation(r2(), [[0, 0], [0, 0]]))
    assert not res.passed and res.certificate == 0


def test_contactize_rejects_degenerate_potential():
    with pytest.raises(StructureError):
        contactize(r2(), e(2, 1))
    with pytest.raises(DimensionError):
        contactize(heisenberg3(), e(3, 0))


def _exact_cases():
    out = []
    for ident in ("T3-1a", "T3-1b", "T3-1c", "T3-2i"):
        for point in CORPUS[ident].sample_points():
            g = CORPUS[ident].algebra.substitute(point)
            out.append((g, has_exact_symplectic(g).witness.potential))
    return out


EXACT = _exact_cases()


@given(st.integers(0, len(EXACT) - 1), st.lists(st.integers(-2, 2), min_size=12, max_size=12))
@settings(max_examples=40)
def test_contactize_gauge_invariance(case, coeffs):
    h, alpha = EXACT[case]
    space = derivation_space(h)
    a = Derivation(h, [[0] * 4 for _ in range(4)], check=False)
    for c, d in zip(coeffs, space.basis):
        a = a + d.scale(c)
    base = contactize(h, alpha, a)
    pi = base.details["pi"]
    x = [sum(c * v[k] for c, v in zip(coeffs[-3:], pi)) for k in range(4)]
    moved = contactize(h, alpha, a + inner_derivation(h, x))
    assert moved.passed == base.passed
    assert moved.certificate == base.certificate
    assert moved.form == base.form


def test_symplectize_heisenberg():
    res = symplectize_contact(heisenberg3(), e(3, 0))
    assert res.passed
    g = res.algebra
    assert g.jacobi_check().passed
    assert g.d(res.form).is_zero() and not pfaffian(res.form).is_zero()
    assert has_symplectic(g).passed


def test_symplectize_sl2_has_no_solution():
    for alpha in (e(3, 0), e(3, 1), e(3, 0) + e(3, 2)):
        res = symplectize_contact(sl2(), alpha)
        assert not res.passed and res.algebra is None


def test_symplectize_rejects_non_contact_form():
    with pytest.raises(StructureError):
        symplectize_contact(heisenberg3(), e(3, 1))


def _contact_cases():
    cases = [(heisenberg3(), e(3, 0)), (sl2(), e(3, 0)), (sl2(), e(3, 1))]
    for entry in CORPUS.values():
        if entry.ident.startswith("T2"):
            for point in entry.sample_points():
                g = entry.algebra.substitute(point)
                rep = is_contact(g)
                if rep.passed:
                    cases.append((g, rep.witness.form))
    return cases


CONTACT = _contact_cases()


def _pull_back(omega, p):
    m = [[c.constant_value() for c in row] for row in omega.matrix()]
    q = linalg.matmul(linalg.transpose(p), linalg.matmul(m, p))
    return KForm(len(q), 2, {(i, j): q[i][j] for i in range(len(q)) for j in range(i + 1, len(q)) if q[i][j]})


@given(st.integers(0, len(CONTACT) - 1), st.lists(st.integers(-2, 2), min_size=9, max_size=9),
       st.integers(-3, 3).filter(bool))
@settings(max_examples=40)
def test_symplectic_form_is_preserved_by_reeb_inner_derivation(case, coeffs, t):
    h, alpha = CONTACT[case]
    n = h.dim
    a = Derivation(h, [[0] * n for _ in range(n)], check=False)
    for c, d in zip(coeffs, derivation_space(h).basis):
        a = a + d.scale(c)
    base = symplectize_contact(h, alpha, a)
    w = [t * c for c in base.details["w"]]
    moved = symplectize_contact(h, alpha, a + inner_derivation(h, w))
    # A + ad_w is ad of v + w in the old suspension, and omega is the same form in that basis
    p = linalg.identity(n + 1)
    for k in range(n):
        p[k][n] = w[k]
    assert base.algebra.change_basis(p) == moved.algebra
    assert _pull_back(base.form, p) == moved.form
    assert moved.passed == base.passed


@pytest.mark.parametrize("h,alpha", CONTACT, ids=lambda v: getattr(v, "name", "") or None)
def test_two_form_route_agrees_with_contact_route(h, alpha):
    omega = h.d(alpha)
    via_contact = symplectize_contact(h, alpha)
    via_form = symplectize_2form(h, omega)
    assert via_form.passed == via_contact.passed
    for res in (via_contact, via_form):
        if res.passed:
            g = res.algebra
            assert g.jacobi_check().passed
            assert g.d(res.form).is_zero() and not pfaffian(res.form).is_zero()


def test_two_form_extension_contracts_to_alpha():
    res = symplectize_2form(heisenberg3(), heisenberg3().d(e(3, 0)))
    assert res.passed
    big = res.form
    alpha = res.details["alpha"]
    # i_v Omega = -alpha with Omega = omega + v* ^ alpha
    assert big.interior(unit(4, 3)) == KForm(4, 1, dict(alpha.items()))


def test_two_form_preconditions():
    h = heisenberg3()
    with pytest.raises(StructureError):
        symplectize_2form(h, KForm.zero(3, 2))
    with pytest.raises(StructureError):
        symplectize_2form(CORPUS["T2-V"].algebra, e(3, 0, 1))
    with pytest.raises(DimensionError):
        symplectize_2form(r2(), e(2, 0, 1))


def test_sl2_two_form_route_has_no_solution():
    g = sl2()
    for omega in (e(3, 0, 1), e(3, 1, 2), e(3, 0, 2) + e(3, 0, 1)):
        assert not symplectize_2form(g, omega).passed


@given(st.integers(0, 2**32), st.integers(2, 7))
@settings(max_examples=30)
def test_random_nilpotent_algebras(seed, dim):
    g = random_nilpotent(random.Random(seed), dim)
    assert g.dim == dim
    assert g.jacobi_check().passed
    assert g.is_nilpotent()


@given(st.integers(0, 2**32), st.integers(2, 6))
@settings(max_examples=30)
def test_random_algebras_satisfy_jacobi(seed, dim):
    g = random_algebra(random.Random(seed), dim)
    assert g.dim == dim and g.jacobi_check().passed
