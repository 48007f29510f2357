"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name, so the
same polynomial always has the same internal representation regardless of
the order in which it was built.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

Monomial = tuple  # tuple[tuple[str, int], ...]
Number = Union[int, Fraction]

ONE_MONOMIAL: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class Poly:
    """Immutable polynomial over Q in named indeterminates."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Number) -> "Poly":
        c = _as_fraction(c)
        return cls._raw({ONE_MONOMIAL: c} if c else {})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls._raw({((name, 1),): Fraction(1)})

    @classmethod
    def coerce(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return cls.const(x)

    # ---- inspection -------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ONE_MONOMIAL in self._terms)

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial; raises if variables remain."""
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(name for mono in self._terms for name, _ in mono)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e for _, e in mono) for mono in self._terms)

    def degree_in(self, name: str) -> int:
        if not self._terms:
            return -1
        return max((dict(mono).get(name, 0) for mono in self._terms), default=0)

    # ---- arithmetic -------------------------------------------------

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for mono, c in other._terms.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                c = _as_fraction(other)
                if not c:
                    return ZERO
                return Poly._raw({m: v * c for m, v in self._terms.items()})
            return NotImplemented
        if not self._terms or not other._terms:
            return ZERO
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            other = other.constant_value()
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # ---- comparison -------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Poly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # ---- calculus / substitution ------------------------------------

    def diff(self, name: str) -> "Poly":
        out: dict = {}
        for mono, c in self._terms.items():
            exps = dict(mono)
            e = exps.get(name, 0)
            if not e:
                continue
            if e == 1:
                del exps[name]
            else:
                exps[name] = e - 1
            m = tuple(sorted(exps.items()))
            out[m] = out.get(m, 0) + c * e
        return Poly(out)

    def subs(self, mapping: Mapping[str, "Poly | Number"]) -> "Poly":
        """Simultaneous substitution of polynomials (or numbers) for variables."""
        if not mapping or not (self.variables() & set(mapping)):
            return self
        images = {k: Poly.coerce(v) for k, v in mapping.items()}
        powers: dict = {}

        def power(name, e):
            key = (name, e)
            if key not in powers:
                powers[key] = images[name] ** e
            return powers[key]

        total = ZERO
        for mono, c in self._terms.items():
            kept = []
            term = Poly.const(c)
            for name, e in mono:
                if name in images:
                    term = term * power(name, e)
                else:
                    kept.append((name, e))
            if kept:
                term = term * Poly._raw({tuple(kept): Fraction(1)})
            total = total + term
        return total

    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        """Evaluate at a point covering every variable of the polynomial."""
        total = Fraction(0)
        for mono, c in self._terms.items():
            v = c
            for name, e in mono:
                v *= Fraction(point[name]) ** e
            total += v
        return total

    def content(self) -> Fraction:
        """Positive rational g with self/g having coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        nums = [c.numerator for c in self._terms.values()]
        dens = [c.denominator for c in self._terms.values()]
        g = 0
        for n in nums:
            g = math.gcd(g, n)
        lcm = 1
        for d in dens:
            lcm = lcm * d // math.gcd(lcm, d)
        return Fraction(g, lcm)

    def coefficient(self, mono: Iterable) -> Fraction:
        key = tuple(sorted(dict(mono).items()))
        return self._terms.get(key, Fraction(0))

    # ---- display ------------------------------------------------------

    def sorted_terms(self, order: list | None = None):
        """Terms in descending lexicographic order over ``order`` (default: sorted names)."""
        names = order if order is not None else sorted(self.variables())
        rank = {n: i for i, n in enumerate(names)}
        extra = sorted(self.variables() - set(rank))
        for n in extra:
            rank[n] = len(rank)

        def key(item):
            exps = dict(item[0])
            vec = [0] * len(rank)
            for n, e in exps.items():
                vec[rank[n]] = e
            return tuple(vec)

        return sorted(self._terms.items(), key=key, reverse=True)

    def to_str(self, order: list | None = None, mul: str = " ", power: str = "^") -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (mono, c) in enumerate(self.sorted_terms(order)):
            mono_s = mul.join(n if e == 1 else f"{n}{power}{e}" for n, e in mono)
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            if mono_s:
                body = mono_s if a == 1 else f"{_fmt_fraction(a)}{mul}{mono_s}"
            else:
                body = _fmt_fraction(a)
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.to_str()!r})"


def _fmt_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


ZERO = Poly._raw({})
ONE = Poly._raw({ONE_MONOMIAL: Fraction(1)})


def poly_vars(*names: str) -> list:
    return [Poly.var(n) for n in names]
