"""Exact linear algebra over Q on plain nested lists of Fractions."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = list  # list[list[Fraction]]


def to_fraction_matrix(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def _integer_rows(rows: Matrix) -> list:
    out = []
    for row in rows:
        lcm = 1
        for x in row:
            d = Fraction(x).denominator
            lcm = lcm * d // math.gcd(lcm, d)
        out.append([int(Fraction(x) * lcm) for x in row])
    return out


def rank(rows: Matrix) -> int:
    """Rank via fraction-free (Bareiss) elimination on integer-scaled rows."""
    a = _integer_rows(rows)
    if not a or not a[0]:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == m:
            break
    return r


def det(rows: Matrix) -> Fraction:
    """Determinant via Bareiss elimination; exact for rational entries."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    a = []
    for row in rows:
        lcm = 1
        for x in row:
            d = Fraction(x).denominator
            lcm = lcm * d // math.gcd(lcm, d)
        scale /= lcm
        a.append([int(Fraction(x) * lcm) for x in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] * scale


def rref(rows: Matrix) -> tuple:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = [list(map(Fraction, row)) for row in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        if p != 1:
            a[r] = [x / p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a[:r], pivots


def nullspace(rows: Matrix, ncols: int | None = None) -> list:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def row_space(rows: Matrix) -> Matrix:
    red, _ = rref(rows)
    return red


def solve(rows: Matrix, rhs: Sequence) -> list | None:
    """One solution of A x = b, or None when the system is inconsistent."""
    if not rows:
        return [] if all(Fraction(b) == 0 for b in rhs) else None
    n = len(rows[0])
    aug = [list(row) + [Fraction(b)] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return x


def in_span(vectors: Matrix, v: Sequence) -> bool:
    if not vectors:
        return all(Fraction(x) == 0 for x in v)
    return rank(list(vectors) + [list(v)]) == rank(vectors)


def inverse(rows: Matrix) -> Matrix:
    n = len(rows)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def inertia(sym: Matrix) -> tuple:
    """(positive, negative) inertia of a symmetric rational matrix.

    Diagonalizes by congruence. When every remaining diagonal entry is zero
    a nonzero off-diagonal entry is moved onto the diagonal first.
    """
    a = [list(map(Fraction, row)) for row in sym]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        k = active[0]
        if a[k][k] == 0:
            diag = next((j for j in active if a[j][j] != 0), None)
            if diag is not None:
                active.remove(diag)
                active.insert(0, diag)
                continue
            partner = next((j for j in active[1:] if a[k][j] != 0), None)
            if partner is None:
                active.pop(0)
                continue
            # all active diagonal entries vanish, so the new pivot is 2*a[k][partner]
            for j in range(n):
                a[k][j] += a[partner][j]
            for i in range(n):
                a[i][k] += a[i][partner]
            continue
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rest = active[1:]
        for i in rest:
            f = a[i][k] / p
            if f:
                for j in range(n):
                    a[i][j] -= f * a[k][j]
        for i in rest:
            a[k][i] = Fraction(0)
            a[i][k] = Fraction(0)
        active = rest
    return pos, neg
