from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symplie import linalg
from symplie.exterior import (DimensionError, KForm, pfaffian, pfaffian_matrix, sort_sign,
                              symbolic_covector)
from symplie.poly import Poly

from strategies import antisymmetric, forms, vectors

e = KForm.basis


def test_sort_sign():
    assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_sign((1, 0)) == (-1, (0, 1))
    assert sort_sign((1, 1))[0] == 0


def test_constructor_folds_order_and_repeats():
    assert KForm(3, 2, {(1, 0): 1}) == -e(3, 0, 1)
    assert KForm(3, 2, {(1, 1): 5}).is_zero()
    with pytest.raises(DimensionError):
        KForm(3, 2, {(0, 3): 1})
    with pytest.raises(DimensionError):
        KForm(9, 1)


def test_square_of_symplectic_form():
    omega = e(4, 0, 2) + e(4, 1, 3)
    assert omega.wedge(omega) == KForm(4, 4, {(0, 1, 2, 3): -2})
    assert pfaffian(e(4, 0, 1) + e(4, 2, 3)) == 1
    assert pfaffian(omega) == -1


def test_degree_overflow_is_zero():
    assert e(3, 0, 1).wedge(e(3, 2, 1)).is_zero()
    assert e(2, 0).wedge(e(2, 1)).wedge(e(2, 0)).degree == 3


def test_evaluation_uses_determinant_convention():
    assert e(3, 0, 1).evaluate([1, 0, 0], [0, 1, 0]) == 1
    assert e(3, 0, 1).evaluate([0, 1, 0], [1, 0, 0]) == -1
    assert KForm.volume(3).evaluate([1, 0, 0], [0, 1, 0], [0, 0, 1]) == 1


def test_interior_of_function_is_rejected():
    with pytest.raises(DimensionError):
        KForm.scalar(3, 1).interior([1, 0, 0])


def test_display():
    f = KForm(4, 2, {(0, 2): 1, (1, 3): Fraction(1, 2)})
    assert str(f) == "e1*^e3* + 1/2 e2*^e4*"
    l = Poly.var("l")
    assert str(KForm(4, 2, {(1, 3): 1 - l})) == "(-l + 1) e2*^e4*"


def test_pfaffian_errors():
    with pytest.raises(DimensionError):
        pfaffian(e(3, 0, 1))
    with pytest.raises(ValueError):
        pfaffian(e(2, 0, 1), KForm.zero(2, 2))


def test_symbolic_pfaffian_of_generic_form():
    a = [Poly.var(f"m{i}{j}") for i in range(4) for j in range(4)]
    m = [[Poly.const(0)] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            m[i][j] = a[4 * i + j]
            m[j][i] = -a[4 * i + j]
    expected = a[1] * a[11] - a[2] * a[7] + a[3] * a[6]
    assert pfaffian(KForm.from_matrix(m)) == expected
    assert pfaffian_matrix(m) == expected


# ---- laws ----------------------------------------------------------------

@given(forms(5, 1), forms(5, 2), forms(5, 2))
def test_wedge_associative(a, b, c):
    assert a.wedge(b).wedge(c) == a.wedge(b.wedge(c))


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_graded_commutativity(p, q, data):
    a = data.draw(forms(5, p))
    b = data.draw(forms(5, q))
    sign = -1 if (p * q) % 2 else 1
    assert a.wedge(b) == b.wedge(a).scale(sign)


@given(st.integers(1, 3), st.integers(0, 3), st.data())
def test_interior_is_antiderivation(p, q, data):
    a = data.draw(forms(5, p))
    b = data.draw(forms(5, q))
    v = data.draw(vectors(5))
    lhs = a.wedge(b).interior(v)
    rhs = a.interior(v).wedge(b)
    if q:  # functions have no interior product
        rhs = rhs + a.wedge(b.interior(v)).scale(-1 if p % 2 else 1)
    assert lhs == rhs


@given(forms(4, 2), vectors(4), vectors(4))
def test_two_form_evaluation_matches_matrix(omega, x, y):
    m = [[c.constant_value() for c in row] for row in omega.matrix()]
    expected = sum(x[i] * m[i][j] * y[j] for i in range(4) for j in range(4))
    assert omega.evaluate(x, y) == expected


@given(st.sampled_from([2, 4, 6]), st.data())
def test_pfaffian_squared_is_determinant(n, data):
    m = data.draw(antisymmetric(n))
    pf_wedge = pfaffian(KForm.from_matrix(m))
    pf_rows = pfaffian_matrix(m)
    assert pf_wedge == pf_rows
    assert pf_wedge.constant_value() ** 2 == linalg.det(m)


def test_symbolic_covector_variables():
    assert symbolic_covector(3).variables() == {"_a1", "_a2", "_a3"}
