"""Lie algebras with exact structure constants and their cochain complex.

Conventions: ``[e_i, e_j] = sum_k c^k_ij e_k`` and on the dual basis
``d f^k = -sum_{i<j} c^k_ij f^i ^ f^j``, extended to all degrees as an
antiderivation. Forms are evaluated with the determinant convention, so
``(d phi)(x, y) = -phi([x, y])`` for a 1-form ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from . import linalg
from .exterior import DimensionError, KForm, MAX_DIM, sort_sign
from .poly import ONE, ZERO, Poly
from .report import Report


class JacobiError(ValueError):
    pass


class ParameterError(ValueError):
    """Parameters left symbolic where a rational value is needed, or excluded values."""


@dataclass(frozen=True)
class Param:
    name: str
    excluded: tuple = ()
    allowed: tuple | None = None

    def check(self, value: Fraction) -> None:
        if value in self.excluded:
            raise ParameterError(f"parameter {self.name} = {value} is excluded")
        if self.allowed is not None and value not in self.allowed:
            allowed = ", ".join(str(a) for a in self.allowed)
            raise ParameterError(f"parameter {self.name} = {value} not among allowed values {allowed}")


def _vec(x: Sequence, n: int) -> list:
    if len(x) != n:
        raise DimensionError(f"vector of length {len(x)} in dimension {n}")
    return [Poly.coerce(c) for c in x]


def unit(n: int, i: int) -> list:
    return [ONE if k == i else ZERO for k in range(n)]


class LieAlgebra:
    """Finite-dimensional Lie algebra given by structure constants.

    ``brackets`` maps index pairs ``(i, j)`` (0-based) to the coefficient
    vector of ``[e_i, e_j]``, either as a sequence of length n or as a
    sparse ``{k: coeff}`` mapping. Pairs with ``i > j`` are folded in by
    antisymmetry.
    """

    def __init__(self, dim: int, brackets: Mapping | None = None, *, params: Sequence[Param] = (),
                 labels: Sequence[str] | None = None, name: str = "", check: bool = True):
        if dim < 1 or dim > MAX_DIM:
            raise DimensionError(f"dimension {dim} outside 1..{MAX_DIM}")
        self.dim = dim
        self.params = tuple(params)
        self.labels = tuple(labels) if labels else tuple(f"e{i + 1}" for i in range(dim))
        if len(self.labels) != dim:
            raise ValueError("one label per basis vector required")
        self.name = name
        table = {}
        for (i, j), value in (brackets or {}).items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise DimensionError(f"bracket index ({i + 1},{j + 1}) out of range for dimension {dim}")
            if i == j:
                continue
            if isinstance(value, Mapping):
                vec = [ZERO] * dim
                for k, c in value.items():
                    if not 0 <= k < dim:
                        raise DimensionError(f"bracket value index {k + 1} out of range")
                    vec[k] = vec[k] + Poly.coerce(c)
            else:
                vec = _vec(value, dim)
            if i > j:
                i, j = j, i
                vec = [-c for c in vec]
            old = table.get((i, j))
            if old is not None:
                vec = [a + b for a, b in zip(old, vec)]
            table[(i, j)] = vec
        self._c = {k: tuple(v) for k, v in table.items() if any(v)}
        self._mc = None
        if check:
            rep = self.jacobi_check()
            if not rep.passed:
                raise JacobiError(rep.message)

    # ---- constructors ---------------------------------------------------

    @classmethod
    def from_mc(cls, dim: int, differentials: Mapping[int, KForm], **kw) -> "LieAlgebra":
        """Build from Maurer-Cartan data ``{k: d f^k}``.

        With ``d f^k = -sum_{i<j} c^k_ij f^i ^ f^j`` the structure constant
        is minus the coefficient of ``f^i ^ f^j`` in ``d f^k``.
        """
        brackets: dict = {}
        for k, form in differentials.items():
            if form.dim != dim or form.degree != 2:
                raise DimensionError(f"d e{k + 1}* must be a 2-form in dimension {dim}")
            if not 0 <= k < dim:
                raise DimensionError(f"index {k + 1} out of range for dimension {dim}")
            for (i, j), c in form.items():
                brackets.setdefault((i, j), {})[k] = -c
        return cls(dim, brackets, **kw)

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebra":
        return cls(dim, {}, name=f"abelian{dim}")

    # ---- basic data -------------------------------------------------

    def structure_constant(self, i: int, j: int, k: int) -> Poly:
        if i == j:
            return ZERO
        if i < j:
            v = self._c.get((i, j))
            return v[k] if v else ZERO
        v = self._c.get((j, i))
        return -v[k] if v else ZERO

    def bracket_basis(self, i: int, j: int) -> list:
        if i == j:
            return [ZERO] * self.dim
        if i < j:
            v = self._c.get((i, j))
            return list(v) if v else [ZERO] * self.dim
        v = self._c.get((j, i))
        return [-c for c in v] if v else [ZERO] * self.dim

    def nonzero_brackets(self) -> dict:
        return {k: list(v) for k, v in self._c.items()}

    def bracket(self, x: Sequence, y: Sequence) -> list:
        n = self.dim
        x = _vec(x, n)
        y = _vec(y, n)
        out = [ZERO] * n
        for (i, j), v in self._c.items():
            coef = x[i] * y[j] - x[j] * y[i]
            if coef.is_zero():
                continue
            for k in range(n):
                if v[k]:
                    out[k] = out[k] + coef * v[k]
        return out

    def ad(self, x: Sequence) -> list:
        """Matrix of ad_x: column j is [x, e_j]."""
        n = self.dim
        cols = [self.bracket(x, unit(n, j)) for j in range(n)]
        return [[cols[j][k] for j in range(n)] for k in range(n)]

    def parameter_names(self) -> frozenset:
        out = frozenset()
        for v in self._c.values():
            for c in v:
                out |= c.variables()
        return out

    def is_numeric(self) -> bool:
        return not self.parameter_names()

    def require_numeric(self, what: str = "this computation") -> None:
        names = self.parameter_names()
        if names:
            raise ParameterError(f"{what} needs rational parameter values; unsubstituted: {', '.join(sorted(names))}")

    def substitute(self, values: Mapping[str, object]) -> "LieAlgebra":
        vals = {k: Fraction(v) for k, v in values.items()}
        declared = {p.name: p for p in self.params}
        for k, v in vals.items():
            if k in declared:
                declared[k].check(v)
        brackets = {k: [c.subs(vals) for c in v] for k, v in self._c.items()}
        remaining = [p for p in self.params if p.name not in vals]
        return LieAlgebra(self.dim, brackets, params=remaining, labels=self.labels, name=self.name, check=False)

    def numeric_constants(self) -> dict:
        self.require_numeric()
        return {k: [c.constant_value() for c in v] for k, v in self._c.items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self._c == other._c

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._c.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"[{self.labels[i]},{self.labels[j]}]={_vec_str(v, self.labels)}"
                         for (i, j), v in sorted(self._c.items()))
        return f"LieAlgebra(dim={self.dim}{', ' + self.name if self.name else ''}; {body or 'abelian'})"

    # ---- Chevalley-Eilenberg complex ----------------------------------

    def mc_differentials(self) -> list:
        """[d f^1, ..., d f^n] as 2-forms."""
        if self._mc is None:
            n = self.dim
            terms = [dict() for _ in range(n)]
            for (i, j), v in self._c.items():
                for k in range(n):
                    if v[k]:
                        terms[k][(i, j)] = -v[k]
            self._mc = [KForm(n, 2, t) for t in terms]
        return self._mc

    def d(self, phi: KForm) -> KForm:
        """Chevalley-Eilenberg differential of a form on this algebra."""
        if phi.dim != self.dim:
            raise DimensionError(f"form of dimension {phi.dim} on a {self.dim}-dimensional algebra")
        mc = self.mc_differentials()
        out: dict = {}
        for idx, c in phi.items():
            for s, i in enumerate(idx):
                dfi = mc[i]
                if dfi.is_zero():
                    continue
                sgn = -1 if s % 2 else 1
                for (a, b), cab in dfi.items():
                    sign, key = sort_sign(idx[:s] + (a, b) + idx[s + 1:])
                    if not sign:
                        continue
                    term = c * cab
                    out[key] = out.get(key, ZERO) + (term if sign * sgn > 0 else -term)
        return phi._new(phi.degree + 1, out)

    ce_differential = d

    def d_matrix(self, k: int) -> list:
        """Rational matrix of d : C^k -> C^{k+1} on lexicographic bases (rows = targets)."""
        self.require_numeric("the matrix of d")
        n = self.dim
        src = list(combinations(range(n), k))
        tgt = list(combinations(range(n), k + 1))
        pos = {t: r for r, t in enumerate(tgt)}
        m = [[Fraction(0)] * len(src) for _ in tgt]
        for col, idx in enumerate(src):
            image = self.d(KForm(n, k, {idx: ONE}))
            for key, c in image.items():
                m[pos[key]][col] = c.constant_value()
        return m

    def jacobi_check(self) -> Report:
        """Pass iff d^2 f = 0 for every basis covector, symbolically in parameters."""
        n = self.dim
        for l, dfl in enumerate(self.mc_differentials()):
            dd = self.d(dfl)
            if dd.is_zero():
                continue
            (i, j, k), value = sorted(dd.items())[0]
            residual = self.jacobiator(unit(n, i), unit(n, j), unit(n, k))
            lab = self.labels
            return Report(
                "jacobi", False,
                f"Jacobi identity fails on ({lab[i]}, {lab[j]}, {lab[k]}): "
                f"d^2 {lab[l]}* has coefficient {value} there",
                witness=(i + 1, j + 1, k + 1),
                details={"covector": l + 1, "residual": [str(c) for c in residual]},
            )
        return Report("jacobi", True, "d^2 = 0 on all basis covectors")

    def jacobiator(self, x, y, z) -> list:
        a = self.bracket(x, self.bracket(y, z))
        b = self.bracket(y, self.bracket(z, x))
        c = self.bracket(z, self.bracket(x, y))
        return [p + q + r for p, q, r in zip(a, b, c)]

    def cohomology_dim(self, k: int) -> int:
        self.require_numeric("cohomology")
        n = self.dim
        if k < 0 or k > n:
            return 0
        from math import comb
        ker = comb(n, k) - (linalg.rank(self.d_matrix(k)) if k < n else 0)
        im = linalg.rank(self.d_matrix(k - 1)) if k > 0 else 0
        return ker - im

    def betti_numbers(self) -> list:
        return [self.cohomology_dim(k) for k in range(self.dim + 1)]

    # ---- invariants ---------------------------------------------------

    def ad_traces(self) -> list:
        n = self.dim
        return [sum((self.structure_constant(i, k, k) for k in range(n)), ZERO) for i in range(n)]

    def is_unimodular(self) -> Report:
        traces = self.ad_traces()
        bad = [(i, t) for i, t in enumerate(traces) if not t.is_zero()]
        if not bad:
            return Report("unimodular", True, "trace(ad_x) = 0 for all basis x")
        i, t = bad[0]
        return Report("unimodular", False, f"trace(ad_{self.labels[i]}) = {t}",
                      witness=i + 1, details={"traces": [str(t) for t in traces]})

    def killing_form(self) -> "KillingForm":
        self.require_numeric("the Killing form")
        n = self.dim
        ads = [[[c.constant_value() for c in row] for row in self.ad(unit(n, i))] for i in range(n)]
        k = [[sum((ads[i][a][b] * ads[j][b][a] for a in range(n) for b in range(n)), Fraction(0))
              for j in range(n)] for i in range(n)]
        return KillingForm(k, linalg.inertia(k))

    def coadjoint_tangent_dim(self, f: Sequence) -> int:
        """dim of span{f o ad_X}: rank of the matrix f([e_a, e_b])."""
        self.require_numeric("coadjoint orbit dimensions")
        n = self.dim
        f = [Fraction(Poly.coerce(c).constant_value()) for c in f]
        if len(f) != n:
            raise DimensionError("covector length mismatch")
        m = [[sum((f[k] * self.structure_constant(a, b, k).constant_value() for k in range(n)), Fraction(0))
              for b in range(n)] for a in range(n)]
        return linalg.rank(m)

    def derived_basis(self) -> list:
        self.require_numeric("the derived algebra")
        return linalg.row_space([[c.constant_value() for c in v] for v in self._c.values()])

    def derived_dim(self) -> int:
        return len(self.derived_basis())

    def is_perfect(self) -> bool:
        return self.derived_dim() == self.dim

    def lower_central_series(self) -> list:
        """Dimensions of g = g^1 > g^2 = [g,g] > ... down to the stable term."""
        self.require_numeric("the lower central series")
        n = self.dim
        current = linalg.identity(n)
        dims = [n]
        while True:
            vecs = []
            for i in range(n):
                for row in current:
                    v = self.bracket(unit(n, i), row)
                    vecs.append([c.constant_value() for c in v])
            nxt = linalg.row_space(vecs) if vecs else []
            if len(nxt) == len(current):
                return dims
            dims.append(len(nxt))
            current = nxt
            if not nxt:
                return dims

    def is_nilpotent(self) -> bool:
        return self.lower_central_series()[-1] == 0

    def nilpotency_class(self) -> int:
        """Smallest c with g^{c+1} = 0 (0 for the zero algebra, 1 for abelian)."""
        series = self.lower_central_series()
        if series[-1] != 0:
            raise ValueError("algebra is not nilpotent")
        return len(series) - 1

    # ---- transformations ------------------------------------------------

    def change_basis(self, p: Sequence[Sequence]) -> "LieAlgebra":
        """Algebra in the basis e'_a = sum_b p[b][a] e_b (columns of p)."""
        self.require_numeric("a change of basis")
        n = self.dim
        p = linalg.to_fraction_matrix(p)
        pinv = linalg.inverse(p)
        cols = [[p[b][a] for b in range(n)] for a in range(n)]
        brackets = {}
        for a in range(n):
            for b in range(a + 1, n):
                v = [c.constant_value() for c in self.bracket(cols[a], cols[b])]
                brackets[(a, b)] = linalg.matvec(pinv, v)
        return LieAlgebra(n, brackets, name=self.name, check=False)

    def direct_sum(self, other: "LieAlgebra") -> "LieAlgebra":
        n, m = self.dim, other.dim
        brackets = {}
        for (i, j), v in self._c.items():
            brackets[(i, j)] = list(v) + [ZERO] * m
        for (i, j), v in other._c.items():
            brackets[(n + i, n + j)] = [ZERO] * n + list(v)
        return LieAlgebra(n + m, brackets, params=self.params + other.params, check=False)


@dataclass(frozen=True)
class KillingForm:
    matrix: list
    signature: tuple


def _vec_str(v, labels) -> str:
    from .exterior import format_linear_combination
    return format_linear_combination([(c, labels[k]) for k, c in enumerate(v)])


# ---- a few standard algebras --------------------------------------------

def heisenberg3() -> LieAlgebra:
    """[e2, e3] = e1."""
    return LieAlgebra(3, {(1, 2): {0: 1}}, name="heisenberg3")


def sl2() -> LieAlgebra:
    """sl(2, R) on X0 = diag(1,-1), X1 = [[0,1],[-1,0]], X2 = [[0,1],[1,0]]."""
    return LieAlgebra(3, {(0, 1): {2: 2}, (0, 2): {1: 2}, (1, 2): {0: 2}},
                      labels=("X0", "X1", "X2"), name="sl2")


def so3() -> LieAlgebra:
    """Vector-product algebra [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2."""
    return LieAlgebra(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}, name="so3")


def filiform4() -> LieAlgebra:
    """[e2, e3] = e1, [e3, e4] = e2: the 4-dimensional nilpotent algebra of class 3."""
    return LieAlgebra(4, {(1, 2): {0: 1}, (2, 3): {1: 1}}, name="n4")
