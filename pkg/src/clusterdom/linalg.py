"""Exact rational linear algebra on tuples.

Matrices are tuples of row tuples holding ``int`` or ``Fraction`` entries.
Nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]
Vector = tuple
Matrix = tuple


def frac(x: Number | str) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def as_matrix(rows: Iterable[Iterable[Number]]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def normalize_number(x: Number) -> Number:
    """Return an ``int`` when ``x`` is integral, so tuples compare cleanly."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def vec(xs: Iterable[Number]) -> Vector:
    return tuple(normalize_number(x) for x in xs)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> Matrix:
    return tuple(tuple(0 for _ in range(n)) for _ in range(m))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(normalize_number(sum(x * y for x, y in zip(row, col))) for col in bt) for row in a)


def matvec(a: Matrix, x: Sequence[Number]) -> Vector:
    return tuple(normalize_number(sum(r * v for r, v in zip(row, x))) for row in a)


def dot(x: Sequence[Number], y: Sequence[Number]) -> Number:
    return normalize_number(sum(a * b for a, b in zip(x, y)))


def add(x: Sequence[Number], y: Sequence[Number]) -> Vector:
    return tuple(normalize_number(a + b) for a, b in zip(x, y))


def sub(x: Sequence[Number], y: Sequence[Number]) -> Vector:
    return tuple(normalize_number(a - b) for a, b in zip(x, y))


def scale(c: Number, x: Sequence[Number]) -> Vector:
    return tuple(normalize_number(c * a) for a in x)


def neg_matrix(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in a)


def column(a: Matrix, j: int) -> Vector:
    return tuple(row[j] for row in a)


def columns(a: Matrix) -> list[Vector]:
    return [column(a, j) for j in range(len(a[0]))] if a else []


def from_columns(cols: Sequence[Sequence[Number]]) -> Matrix:
    return transpose(tuple(tuple(c) for c in cols))


def rref(a: Sequence[Sequence[Number]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[frac(x) for x in row] for row in a]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(a: Sequence[Sequence[Number]]) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a: Sequence[Sequence[Number]], ncols: int | None = None) -> list[Vector]:
    """Basis of ``{x : a x = 0}`` as primitive integer vectors."""
    if ncols is None:
        ncols = len(a[0])
    if not a:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    m, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(m, pivots):
            x[pc] = -row[f]
        basis.append(primitive(x))
    return basis


def solve(a: Matrix, b: Sequence[Number]) -> Vector | None:
    """One solution of ``a x = b`` or ``None``."""
    ncols = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(m, pivots):
        x[pc] = row[ncols]
    return vec(x)


def det(a: Sequence[Sequence[Number]]) -> Fraction:
    m = [[frac(x) for x in row] for row in a]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(normalize_number(x) for x in row[n:]) for row in m)


def is_positive_definite(s: Sequence[Sequence[Number]]) -> bool:
    """Sylvester's criterion on leading principal minors."""
    return all(det([row[:k] for row in s[:k]]) > 0 for k in range(1, len(s) + 1))


def primitive(x: Sequence[Number]) -> Vector:
    """Clear denominators and divide by the gcd; the zero vector is returned as is."""
    fx = [frac(v) for v in x]
    den = 1
    for v in fx:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in fx]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def sign(x: Number) -> int:
    return (x > 0) - (x < 0)
