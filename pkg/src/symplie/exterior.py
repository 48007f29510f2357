"""Sparse exterior forms over an n-dimensional dual space.

Index tuples are 0-based and strictly increasing internally; they are shown
1-based (``e1*^e2*``) when printed. Coefficients are :class:`Poly`, so forms
may depend on parameters or on chart coordinates.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .poly import ONE, ZERO, Poly

MAX_DIM = 8


class DimensionError(ValueError):
    pass


def sort_sign(indices: Sequence[int]) -> tuple:
    """Sort ``indices``; return (sign, sorted tuple), sign 0 on a repeat.

    The sign is the parity of the number of transpositions (inversions).
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = 0
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                inversions += 1
    return (-1 if inversions & 1 else 1), tuple(sorted(idx))


class KForm:
    """Constant-shape exterior k-form: dimension, degree and sparse terms."""

    __slots__ = ("dim", "degree", "_terms")

    def __init__(self, dim: int, degree: int, terms: Mapping | None = None):
        if dim < 0 or dim > MAX_DIM:
            raise DimensionError(f"dimension {dim} outside 0..{MAX_DIM}")
        if degree < 0:
            raise DimensionError("negative form degree")
        self.dim = dim
        self.degree = degree
        clean = {}
        if terms and degree <= dim:
            for idx, c in terms.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise DimensionError(f"index tuple {idx} has wrong length for degree {degree}")
                if any(i < 0 or i >= dim for i in idx):
                    raise DimensionError(f"index tuple {idx} out of range for dimension {dim}")
                sign, key = sort_sign(idx)
                if not sign:
                    continue
                c = Poly.coerce(c)
                if sign < 0:
                    c = -c
                total = clean.get(key, ZERO) + c
                if total:
                    clean[key] = total
                else:
                    clean.pop(key, None)
        self._terms = clean

    # ---- constructors -------------------------------------------------

    def _new(self, degree: int, terms: dict) -> "KForm":
        out = object.__new__(type(self))
        out.dim = self.dim
        out.degree = degree
        out._terms = {k: v for k, v in terms.items() if v} if degree <= self.dim else {}
        self._copy_extra(out)
        return out

    def _copy_extra(self, out: "KForm") -> None:
        pass

    @classmethod
    def basis(cls, dim: int, *indices: int, coeff=ONE) -> "KForm":
        """The basic form e_{i1}*^...^e_{ik}* (0-based indices)."""
        return cls(dim, len(indices), {tuple(indices): coeff})

    @classmethod
    def zero(cls, dim: int, degree: int) -> "KForm":
        return cls(dim, degree)

    @classmethod
    def scalar(cls, dim: int, value) -> "KForm":
        return cls(dim, 0, {(): value})

    @classmethod
    def from_covector(cls, coeffs: Sequence) -> "KForm":
        return cls(len(coeffs), 1, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence]) -> "KForm":
        """2-form sum_{i<j} m[i][j] e_i*^e_j* of an antisymmetric matrix."""
        n = len(m)
        return cls(n, 2, {(i, j): m[i][j] for i in range(n) for j in range(i + 1, n)})

    @classmethod
    def volume(cls, dim: int) -> "KForm":
        return cls(dim, dim, {tuple(range(dim)): ONE})

    # ---- access -------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, indices: Sequence[int]) -> Poly:
        sign, key = sort_sign(indices)
        if not sign:
            return ZERO
        c = self._terms.get(key, ZERO)
        return c if sign > 0 else -c

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def top_coefficient(self) -> Poly:
        """Coefficient of e_1*^...^e_n* for a top-degree form."""
        if self.degree != self.dim:
            raise DimensionError("not a top-degree form")
        return self._terms.get(tuple(range(self.dim)), ZERO)

    def variables(self) -> frozenset:
        out = frozenset()
        for c in self._terms.values():
            out |= c.variables()
        return out

    def matrix(self) -> list:
        """Antisymmetric coefficient matrix M with form = sum_{i<j} M_ij e_i*^e_j*."""
        if self.degree != 2:
            raise DimensionError("coefficient matrix needs a 2-form")
        n = self.dim
        m = [[ZERO] * n for _ in range(n)]
        for (i, j), c in self._terms.items():
            m[i][j] = c
            m[j][i] = -c
        return m

    def to_vector(self) -> list:
        """Coefficients on the lexicographic basis of increasing index tuples."""
        return [self._terms.get(idx, ZERO) for idx in combinations(range(self.dim), self.degree)]

    @classmethod
    def from_vector(cls, dim: int, degree: int, values: Sequence) -> "KForm":
        return cls(dim, degree, dict(zip(combinations(range(dim), degree), values)))

    # ---- linear structure -------------------------------------------

    def _check_same(self, other: "KForm") -> None:
        if not isinstance(other, KForm):
            raise TypeError(f"expected a form, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "KForm") -> "KForm":
        self._check_same(other)
        if other.degree != self.degree:
            raise DimensionError(f"cannot add forms of degree {self.degree} and {other.degree}")
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return self._new(self.degree, out)

    def __neg__(self) -> "KForm":
        return self._new(self.degree, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def scale(self, c) -> "KForm":
        c = Poly.coerce(c)
        return self._new(self.degree, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, c) -> "KForm":
        if isinstance(c, KForm):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        return self.dim == other.dim and self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.dim, self.degree, frozenset(self._terms.items())))

    def map_coefficients(self, fn) -> "KForm":
        return self._new(self.degree, {k: fn(c) for k, c in self._terms.items()})

    def subs(self, mapping: Mapping) -> "KForm":
        return self.map_coefficients(lambda c: c.subs(mapping))

    # ---- exterior algebra -------------------------------------------

    def wedge(self, other: "KForm") -> "KForm":
        self._check_same(other)
        deg = self.degree + other.degree
        if deg > self.dim:
            return self._new(deg, {})
        out: dict = {}
        for i1, c1 in self._terms.items():
            for i2, c2 in other._terms.items():
                sign, key = sort_sign(i1 + i2)
                if not sign:
                    continue
                prod = c1 * c2
                out[key] = out.get(key, ZERO) + (prod if sign > 0 else -prod)
        return self._new(deg, out)

    def __xor__(self, other: "KForm") -> "KForm":
        return self.wedge(other)

    def power(self, k: int) -> "KForm":
        result = self._new(0, {(): ONE})
        for _ in range(k):
            result = result.wedge(self)
        return result

    def interior(self, v: Sequence) -> "KForm":
        """Contraction i_v with a vector given by its n coefficients."""
        if len(v) != self.dim:
            raise DimensionError(f"vector of length {len(v)} in dimension {self.dim}")
        if self.degree == 0:
            raise DimensionError("interior product of a degree-0 form")
        v = [Poly.coerce(x) for x in v]
        out: dict = {}
        for idx, c in self._terms.items():
            for pos, i in enumerate(idx):
                if not v[i]:
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                term = c * v[i]
                out[rest] = out.get(rest, ZERO) + (term if pos % 2 == 0 else -term)
        return self._new(self.degree - 1, out)

    def evaluate(self, *vectors: Sequence) -> Poly:
        """Value on ``degree`` vectors (determinant convention)."""
        if len(vectors) != self.degree:
            raise DimensionError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        form = self
        for v in vectors:
            form = form.interior(v)
        return form.coeff(())

    # ---- display -----------------------------------------------------

    def to_str(self, names: Sequence[str] | None = None, wedge: str = "^") -> str:
        if names is None:
            names = [f"e{i + 1}*" for i in range(self.dim)]
        if not self._terms:
            return "0"
        pieces = []
        for idx in sorted(self._terms):
            c = self._terms[idx]
            basis = wedge.join(names[i] for i in idx)
            pieces.append((c, basis))
        return format_linear_combination(pieces)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"KForm(dim={self.dim}, degree={self.degree}, {self.to_str()!r})"


def format_linear_combination(pieces: Iterable) -> str:
    """Render [(Poly coefficient, basis string)] as ``c1 b1 + c2 b2``."""
    out = []
    for c, basis in pieces:
        if c.is_zero():
            continue
        neg = False
        if c.is_constant():
            v = c.constant_value()
            neg = v < 0
            a = -v if neg else v
            coef = "" if a == 1 else (f"{a.numerator}" if a.denominator == 1 else f"{a.numerator}/{a.denominator}")
        elif len(c.terms) == 1:
            (mono, v), = c.items()
            neg = v < 0
            coef = (-c if neg else c).to_str()
        else:
            coef = f"({c.to_str()})"
        if basis:
            body = f"{coef} {basis}" if coef else basis
        else:
            body = coef or "1"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out) if out else "0"


def pfaffian(omega: KForm, volume: KForm | None = None) -> Poly:
    """Pf(omega) defined by omega^m = m! * Pf(omega) * volume, n = 2m."""
    n = omega.dim
    if omega.degree != 2:
        raise DimensionError("Pfaffian needs a 2-form")
    if n % 2:
        raise DimensionError(f"Pfaffian undefined in odd dimension {n}")
    if volume is None:
        volume = KForm.volume(n)
    if volume.dim != n or volume.degree != n:
        raise DimensionError("volume must be a top-degree form of the same dimension")
    vol = volume.top_coefficient()
    if vol.is_zero():
        raise ValueError("zero volume form")
    m = n // 2
    top = omega.power(m).top_coefficient() / math.factorial(m)
    if vol.is_constant():
        return top / vol.constant_value()
    raise ValueError("volume form must have a constant coefficient")


def pfaffian_matrix(m: Sequence[Sequence]) -> Poly:
    """Pfaffian of an antisymmetric matrix by expansion along the first row."""
    n = len(m)
    if n % 2:
        return ZERO
    if n == 0:
        return ONE
    total = ZERO
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        a = Poly.coerce(m[0][j])
        if a.is_zero():
            continue
        keep = [k for k in rest if k != j]
        sub = [[m[r][c] for c in keep] for r in keep]
        term = a * pfaffian_matrix(sub)
        total = total + (term if pos % 2 == 0 else -term)
    return total


def symbolic_covector(dim: int, prefix: str = "_a") -> KForm:
    """The generic 1-form sum a_i e_i* with fresh indeterminates."""
    return KForm.from_covector([Poly.var(f"{prefix}{i + 1}") for i in range(dim)])


def as_fraction(p) -> Fraction:
    return Poly.coerce(p).constant_value()
