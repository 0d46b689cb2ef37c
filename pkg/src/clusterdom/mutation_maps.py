"""Piecewise-linear mutation maps and their action on polyhedra.

``eta(B, seq, x)`` is the map obtained by appending ``x`` as an extra column
of ``B`` and mutating along ``seq``. At each step it acts on ``x`` by the
linear map ``E_{eps,k}`` of the current matrix, ``eps`` being the sign of
``x_k``. For a tall matrix the same recipe uses column ``k`` of the whole
matrix, which is all the square extension contributes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch
from .exchange import (
    ExchangeMatrix,
    ExtendedExchangeMatrix,
    _seq,
    ef_column_matrix,
    mutate_array,
)
from .linalg import Matrix, Number, Vector, frac, identity, matmul, matvec, sign, vec
from .polyhedra import (
    HPolyhedron,
    Polyhedron,
    PointedPolyhedron,
    RegionUnion,
    cone_from_inequalities,
    h_to_v,
)

AnyMatrix = Union[ExchangeMatrix, ExtendedExchangeMatrix]

DEFAULT_PIECE_CAP = 4096


@dataclass(frozen=True)
class SignTrace:
    """Sign of the pivot coordinate before each step; 0 when it vanished."""

    signs: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.signs)

    def branches(self) -> tuple[int, ...]:
        """The branch actually applied, with ties resolved to +1."""
        return tuple(1 if s >= 0 else -1 for s in self.signs)


def _rows(b: AnyMatrix) -> Matrix:
    return b.rows


def _step(rows: Matrix, k: int, y: list, eps: int) -> None:
    yk = y[k]
    for i in range(len(y)):
        if i != k:
            c = eps * rows[i][k]
            if c > 0:
                y[i] += c * yk
    y[k] = -yk


def _eta_rows(rows: Matrix, seq0: Sequence[int], x: Sequence[Number]) -> tuple[Vector, SignTrace, Matrix]:
    if len(x) != len(rows):
        raise DimensionMismatch(f"vector of length {len(x)} for a matrix with {len(rows)} rows")
    y = [frac(v) for v in x]
    signs = []
    for k in seq0:
        s = sign(y[k])
        signs.append(s)
        _step(rows, k, y, 1 if s >= 0 else -1)
        rows = mutate_array(rows, k)
    return vec(y), SignTrace(tuple(signs)), rows


def eta(b: ExchangeMatrix, seq: Iterable[int], x: Sequence[Number]) -> tuple[Vector, SignTrace]:
    if len(x) != b.n:
        raise DimensionMismatch(f"vector of length {len(x)} for n = {b.n}")
    y, trace, _ = _eta_rows(b.rows, _seq(seq, b.n), x)
    return y, trace


def eta_extended(bt: ExtendedExchangeMatrix, seq: Iterable[int], x: Sequence[Number]) -> Vector:
    if len(x) != bt.m:
        raise DimensionMismatch(f"vector of length {len(x)} for m = {bt.m}")
    y, _, _ = _eta_rows(bt.rows, _seq(seq, bt.n), x)
    return y


def eta_any(b: AnyMatrix, seq: Iterable[int], x: Sequence[Number]) -> Vector:
    """``eta`` or ``eta_extended`` depending on the matrix type."""
    n = len(b.rows[0])
    y, _, _ = _eta_rows(b.rows, _seq(seq, n), x)
    return y


def linearization(b: AnyMatrix, seq: Iterable[int], x: Sequence[Number]) -> Matrix:
    """Product of the ``E`` matrices selected by the sign trace of ``x``."""
    rows = _rows(b)
    n = len(rows[0])
    seq0 = _seq(seq, n)
    _, trace, _ = _eta_rows(rows, seq0, x)
    m = identity(len(rows))
    for k, eps in zip(seq0, trace.branches()):
        m = matmul(ef_column_matrix([r[k] for r in rows], k, eps), m)
        rows = mutate_array(rows, k)
    return m


# --------------------------------------------------------------------------
# Images of polyhedra
# --------------------------------------------------------------------------

def _as_polyhedron(p: PointedPolyhedron | Polyhedron) -> Polyhedron:
    return p.as_polyhedron() if isinstance(p, PointedPolyhedron) else p


def _halfspace(dim: int, k: int, eps: int) -> HPolyhedron:
    normal = tuple(eps if i == k else 0 for i in range(dim))
    return HPolyhedron(dim, ((normal, 0),))


def map_polyhedron_exact(
    b: AnyMatrix,
    seq: Iterable[int],
    p: PointedPolyhedron | Polyhedron,
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> RegionUnion:
    """Exact image under ``eta``: split by each pivot hyperplane, map each closed part.

    If the number of pieces would exceed ``piece_cap`` the computation stops and
    the returned union is flagged ``truncated`` (it is then incomplete).
    """
    rows = _rows(b)
    dim = len(rows)
    seq0 = _seq(seq, len(rows[0]))
    start = _as_polyhedron(p)
    if start.dim != dim:
        raise DimensionMismatch("polyhedron and matrix dimensions differ")
    pieces = [start]
    for k in seq0:
        col = [r[k] for r in rows]
        out = []
        for piece in pieces:
            for eps in (1, -1):
                part = h_to_v(piece.h.intersect(_halfspace(dim, k, eps)))
                if part is not None:
                    out.append(part.map_linear(ef_column_matrix(col, k, eps)))
        pieces = list(RegionUnion.of(out).pieces)
        rows = mutate_array(rows, k)
        if len(pieces) > piece_cap:
            return RegionUnion(tuple(pieces), truncated=True)
    return RegionUnion.of(pieces)


def _cone_cut(gens: Sequence[Vector], dim: int, k: int, eps: int) -> list[Vector]:
    """Generators of ``cone(gens)`` intersected with ``eps * v_k >= 0``."""
    from .polyhedra import cone_to_inequalities

    ineqs, eqs = cone_to_inequalities(gens, (), dim)
    half = tuple(eps if i == k else 0 for i in range(dim))
    rays, lines = cone_from_inequalities(list(ineqs) + [half], eqs, dim)
    return list(rays) + list(lines) + [tuple(-x for x in l) for l in lines]


def map_polyhedron_hull(b: AnyMatrix, seq: Iterable[int], p: PointedPolyhedron) -> PointedPolyhedron:
    """Smallest translated cone at ``eta(apex)`` that this step-by-step rule can certify.

    With apex ``a`` and cone ``C`` at a step with pivot ``k``:
    if ``a_k > 0`` every point lies on the segment picture ``eta(a) + s E_+ v + (1-s) E_- v``
    with ``v_k < 0`` on the crossing part, so the new cone is spanned by
    ``E_+ C`` and ``E_- (C n {v_k <= 0})``; symmetrically for ``a_k < 0``;
    for ``a_k = 0`` the two halves of ``C`` are mapped by their own branch.
    No crossing means no extra generators, so the result is exact then.
    """
    rows = _rows(b)
    dim = len(rows)
    seq0 = _seq(seq, len(rows[0]))
    if p.dim != dim:
        raise DimensionMismatch("polyhedron and matrix dimensions differ")
    apex = [frac(v) for v in p.apex]
    gens: list[Vector] = list(p.generators)
    for k in seq0:
        col = [r[k] for r in rows]
        e_plus = ef_column_matrix(col, k, 1)
        e_minus = ef_column_matrix(col, k, -1)
        s = sign(apex[k])
        if s > 0:
            new = [matvec(e_plus, g) for g in gens]
            if any(g[k] < 0 for g in gens):
                new += [matvec(e_minus, g) for g in _cone_cut(gens, dim, k, -1)]
        elif s < 0:
            new = [matvec(e_minus, g) for g in gens]
            if any(g[k] > 0 for g in gens):
                new += [matvec(e_plus, g) for g in _cone_cut(gens, dim, k, 1)]
        else:
            new = [matvec(e_plus, g) for g in _cone_cut(gens, dim, k, 1)]
            new += [matvec(e_minus, g) for g in _cone_cut(gens, dim, k, -1)]
        apex = list(matvec(e_plus if s >= 0 else e_minus, apex))
        gens = list(PointedPolyhedron(tuple(apex), tuple(new)).reduced().generators) if new else []
        rows = mutate_array(rows, k)
    return PointedPolyhedron(vec(apex), tuple(gens))
