"""Affine-type structure: delta, the imaginary ray and wall, neighboring matrices,
type-C companions and expanded sequences.

Throughout, a neighboring matrix has an affine pair ``(p, n)`` of indices with
``b_pn > 0`` and ``b_pn * b_np = -4``. At such a matrix ``delta`` vanishes off
the pair and the imaginary wall is the half-hyperplane
``{x : (D delta) . x = 0, x_n >= 0}`` whose relative boundary is the set of
vectors vanishing on the pair.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ConsistencyError, PreconditionError, StructureViolation
from .exchange import (
    DEFAULT_CLASSIFY_CAP,
    ExchangeMatrix,
    MutationSequence,
    block_decompose,
    classify,
    dynkin_name,
    is_acyclic,
    mutate_array,
    mutate_sequence,
    symmetrized_cartan,
)
from .linalg import Vector, dot, frac, nullspace, primitive, rank, vec
from .mutation_maps import eta

# Coupling submatrices on (special, p, n), keyed by stable identifiers.
TABLE1: dict[str, tuple[tuple[int, ...], ...]] = {
    "A2_1": ((0, 1, -1), (-1, 0, 2), (1, -2, 0)),
    "C2_1": ((0, 2, -2), (-1, 0, 2), (1, -2, 0)),
    "D3_2": ((0, 1, -1), (-2, 0, 2), (2, -2, 0)),
    "G2_1": ((0, 3, -3), (-1, 0, 2), (1, -2, 0)),
    "D4_3": ((0, 1, -1), (-3, 0, 2), (3, -2, 0)),
    "A4_2a": ((0, 1, -2), (-2, 0, 4), (1, -1, 0)),
    "A4_2b": ((0, 2, -1), (-1, 0, 1), (2, -4, 0)),
}
TABLE1_IDS: tuple[str, ...] = tuple(TABLE1)

# Expanded words on local labels 1 = special, 2 = p, 3 = n, in application order.
_FIVE_STEP = (1, 3, 1, 2, 1)
_SEVEN_STEP = (1, 3, 1, 3, 2, 3, 1)
EXPANDED_WORDS: dict[str, tuple[int, ...]] = {
    "A2_1": _FIVE_STEP,
    "C2_1": _FIVE_STEP,
    "D3_2": _FIVE_STEP,
    "A4_2a": _FIVE_STEP,
    "A4_2b": _FIVE_STEP,
    "G2_1": _SEVEN_STEP,
    "D4_3": _SEVEN_STEP,
}
_SINGLE_BLOCK = {"A4_2a", "A4_2b", "G2_1", "D4_3"}
_RANK_THREE = {"G2_1", "D4_3"}
_CYCLE = ((0, 1, -1), (-1, 0, 1), (1, -1, 0))


def _sub(rows, idx) -> tuple:
    return tuple(tuple(rows[i][j] for j in idx) for i in idx)


def affine_pairs(b: ExchangeMatrix) -> list[tuple[int, int]]:
    """1-based pairs ``(p, n)`` with ``b_pn > 0`` and ``b_pn b_np = -4``."""
    r = b.rows
    return [
        (i + 1, j + 1)
        for i in range(b.n)
        for j in range(b.n)
        if r[i][j] > 0 and r[i][j] * r[j][i] == -4
    ]


def is_neighboring(b: ExchangeMatrix, check_type: bool = True) -> bool:
    if check_type:
        tag = classify(b).tag
        if tag != "affine":
            raise PreconditionError(f"matrix is of type {tag}, not affine")
    return bool(affine_pairs(b))


# --------------------------------------------------------------------------
# Neighboring structure
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NeighboringStructure:
    """Decomposition of a neighboring matrix; all indices 1-based and original."""

    affine_pair: tuple[int, int]
    special: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    table_types: dict
    relabeling: tuple[int, ...]

    @property
    def non_affine(self) -> tuple[int, ...]:
        n = len(self.relabeling)
        return tuple(i for i in range(1, n + 1) if i not in self.affine_pair)

    def to_json(self) -> dict:
        return {
            "affine_pair": list(self.affine_pair),
            "special": list(self.special),
            "blocks": [list(b) for b in self.blocks],
            "table_types": {str(k): v for k, v in sorted(self.table_types.items())},
            "relabeling": list(self.relabeling),
        }


def _is_quasi_leaf(rows, block: Sequence[int], col: int) -> bool:
    nz = [i for i in block if rows[i][col] != 0]
    if len(nz) <= 1:
        return True
    if len(nz) > 2:
        return False
    sub = _sub(rows, (col, nz[0], nz[1]))
    neg = tuple(tuple(-x for x in r) for r in _CYCLE)
    return sub in (_CYCLE, neg) or _sub(rows, (col, nz[1], nz[0])) in (_CYCLE, neg)


def _structure_for_pair(b: ExchangeMatrix, p: int, q: int) -> NeighboringStructure:
    rows = b.rows
    n = b.n
    others = [i for i in range(n) if i not in (p, q)]
    special = [i for i in others if rows[i][p] or rows[i][q] or rows[p][i] or rows[q][i]]
    if len(special) > 3:
        raise StructureViolation("special-count", f"{len(special)} special indices, at most 3 allowed")
    sub_others = ExchangeMatrix(_sub(rows, others), None) if others else None
    blocks: list[tuple[int, ...]] = []
    if sub_others is not None:
        for comp in block_decompose(sub_others):
            blocks.append(tuple(others[i - 1] for i in comp))
    if len(blocks) > 3:
        raise StructureViolation("block-count", f"{len(blocks)} blocks, at most 3 allowed")
    types: dict[int, str] = {}
    order: list[tuple[int, tuple[int, ...]]] = []
    for blk in blocks:
        sp = [i for i in blk if i in special]
        if len(sp) != 1:
            raise StructureViolation(
                "one-special-per-block",
                f"block {[i + 1 for i in blk]} has {len(sp)} special indices",
            )
        k = sp[0]
        sub_b = ExchangeMatrix(_sub(rows, blk))
        verdict = classify(sub_b, cap=DEFAULT_CLASSIFY_CAP)
        if verdict.tag != "finite" or verdict.names != (f"A{len(blk)}",):
            raise StructureViolation("block-type-A", f"block {[i + 1 for i in blk]} is not of finite type A")
        if not _is_quasi_leaf(rows, blk, k):
            raise StructureViolation("quasi-leaf", f"column {k + 1} is not a quasi-leaf of its block")
        coupling = _sub(rows, (k, p, q))
        match = [name for name, mat in TABLE1.items() if mat == coupling]
        if not match:
            raise StructureViolation("table", f"coupling at special index {k + 1} is not a table entry: {coupling}")
        types[k + 1] = match[0]
        order.append((len(blk), tuple(sorted(i for i in blk if i != k)) + (k,)))
    # inter-block entries vanish by construction of the components; only the
    # affine rows/columns can couple, and only through special indices.
    if any(t in _SINGLE_BLOCK for t in types.values()) and len(blocks) != 1:
        raise StructureViolation("exceptional-single-block", "exceptional coupling requires a single block")
    if any(t in _RANK_THREE for t in types.values()) and n != 3:
        raise StructureViolation("exceptional-rank", "G2/D4 couplings force rank 3")
    order.sort(key=lambda t: (t[0], t[1]))
    relabel = tuple(i + 1 for _, blk in order for i in blk) + (p + 1, q + 1)
    return NeighboringStructure(
        affine_pair=(p + 1, q + 1),
        special=tuple(sorted(k + 1 for k in special)),
        blocks=tuple(tuple(sorted(i + 1 for i in blk)) for blk in blocks),
        table_types=types,
        relabeling=relabel,
    )


def neighboring_structure(b: ExchangeMatrix) -> NeighboringStructure:
    pairs = affine_pairs(b)
    if not pairs:
        raise PreconditionError("no affine 2x2 submatrix: the matrix is not neighboring")
    first_error: Optional[StructureViolation] = None
    for p, q in pairs:
        try:
            return _structure_for_pair(b, p - 1, q - 1)
        except StructureViolation as exc:
            first_error = first_error or exc
    raise first_error


# --------------------------------------------------------------------------
# Companions and expanded sequences
# --------------------------------------------------------------------------

def comp_c(b: ExchangeMatrix, structure: Optional[NeighboringStructure] = None) -> ExchangeMatrix:
    """Non-affine principal part with special columns doubled (original index order)."""
    s = structure or neighboring_structure(b)
    idx = [i - 1 for i in s.non_affine]
    sp = {i - 1 for i in s.special}
    rows = tuple(
        tuple(b.rows[i][j] * (2 if j in sp else 1) for j in idx) for i in idx
    )
    return ExchangeMatrix(rows)


def comp_c_bar(b: ExchangeMatrix, structure: Optional[NeighboringStructure] = None) -> tuple:
    """All rows, non-affine columns, special columns doubled: an ``n x (n-2)`` matrix."""
    s = structure or neighboring_structure(b)
    idx = [i - 1 for i in s.non_affine]
    sp = {i - 1 for i in s.special}
    return tuple(tuple(b.rows[i][j] * (2 if j in sp else 1) for j in idx) for i in range(b.n))


def special_word(structure: NeighboringStructure, k: int) -> tuple[int, ...]:
    """Expanded word for special index ``k`` in application order (1-based indices)."""
    p, q = structure.affine_pair
    local = {1: k, 2: p, 3: q}
    return tuple(local[x] for x in EXPANDED_WORDS[structure.table_types[k]])


def expand_sequence(b: ExchangeMatrix, seq: Iterable[int]) -> MutationSequence:
    """Replace each special index by its word; check the structure survives each block."""
    s = neighboring_structure(b)
    out: list[int] = []
    cur = b
    for k in seq:
        if k in s.affine_pair:
            raise PreconditionError(f"index {k} is affine")
        word = special_word(s, k) if k in s.special else (k,)
        cur = mutate_sequence(cur, word)
        out.extend(word)
        s2 = neighboring_structure(cur)
        if s2.affine_pair != s.affine_pair or s2.special != s.special or s2.table_types != s.table_types:
            raise ConsistencyError(f"structure changed after expanding index {k}")
    return MutationSequence(tuple(out))


# --------------------------------------------------------------------------
# delta, the imaginary ray and wall
# --------------------------------------------------------------------------

def _positive_kernel(s) -> tuple[int, ...]:
    ker = nullspace(s)
    if len(ker) != 1:
        raise PreconditionError("symmetrized Cartan companion does not have a one-dimensional kernel")
    v = ker[0]
    if all(x <= 0 for x in v):
        v = tuple(-x for x in v)
    if not all(x > 0 for x in v):
        raise PreconditionError("kernel vector is not positive")
    return v


def delta_acyclic(b: ExchangeMatrix) -> tuple[int, ...]:
    """Positive primitive kernel vector of ``D A`` for an acyclic affine matrix."""
    if not is_acyclic(b):
        raise PreconditionError("matrix is not acyclic")
    if len(block_decompose(b)) != 1:
        raise PreconditionError("matrix is decomposable")
    return _positive_kernel(symmetrized_cartan(b))


def _neighboring_delta(b: ExchangeMatrix, pair: tuple[int, int]) -> tuple[int, ...]:
    p, q = pair[0] - 1, pair[1] - 1
    d = b.symmetrizer
    a = ((2 * d[p], -abs(b.rows[p][q]) * d[p]), (-abs(b.rows[q][p]) * d[q], 2 * d[q]))
    dp, dq = _positive_kernel(a)
    out = [0] * b.n
    out[p], out[q] = dp, dq
    return tuple(out)


def imaginary_ray(b: ExchangeMatrix, delta: Sequence[int]) -> tuple[int, ...]:
    """``-1/2 B delta``."""
    v = [Fraction(-sum(x * y for x, y in zip(row, delta)), 2) for row in b.rows]
    if any(x.denominator != 1 for x in v):
        raise ConsistencyError("-1/2 B delta is not integral")
    return tuple(int(x) for x in v)


@dataclass(frozen=True)
class DeltaData:
    """``delta``, the imaginary ray and the wall description at a neighboring matrix.

    ``path`` leads from the input matrix to ``neighbor`` (application order);
    the wall is described there by ``wall_normal`` (which is ``D' delta'``) and
    the affine pair: ``{x : wall_normal . x = 0, x_pair[1] >= 0}``.
    """

    delta: tuple[int, ...]
    ray: tuple[int, ...]
    path: tuple[int, ...]
    neighbor: ExchangeMatrix
    neighbor_delta: tuple[int, ...]
    neighbor_ray: tuple[int, ...]
    affine_pair: tuple[int, int]
    wall_normal: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "delta": list(self.delta),
            "ray": list(self.ray),
            "path": list(self.path),
            "neighbor": self.neighbor.to_lists(),
            "affine_pair": list(self.affine_pair),
            "wall_normal": list(self.wall_normal),
        }


def find_neighboring(b: ExchangeMatrix, cap: int = DEFAULT_CLASSIFY_CAP) -> tuple[tuple[int, ...], ExchangeMatrix]:
    """Breadth-first search for a neighboring matrix in the class; returns ``(path, matrix)``."""
    parent = {b.rows: ()}
    queue = deque([b.rows])
    while queue:
        rows = queue.popleft()
        cur = ExchangeMatrix(rows, b.symmetrizer)
        if affine_pairs(cur):
            return parent[rows], cur
        for k in range(b.n):
            nxt = mutate_array(rows, k)
            if nxt not in parent:
                if len(parent) >= cap:
                    from .errors import SearchExhausted

                    raise SearchExhausted(f"no neighboring matrix within {cap} matrices")
                parent[nxt] = parent[rows] + (k + 1,)
                queue.append(nxt)
    raise PreconditionError("mutation class has no neighboring matrix")


def delta_general(b: ExchangeMatrix, cap: int = DEFAULT_CLASSIFY_CAP) -> DeltaData:
    tag = classify(b, cap).tag
    if tag != "affine":
        raise PreconditionError(f"matrix is of type {tag}, not affine")
    path, nb = find_neighboring(b, cap)
    structure = neighboring_structure(nb)
    pair = structure.affine_pair
    d_nb = _neighboring_delta(nb, pair)
    ray_nb = imaginary_ray(nb, d_nb)
    dsym = nb.symmetrizer
    normal_nb = tuple(di * x for di, x in zip(dsym, d_nb))
    if not path:
        return DeltaData(d_nb, ray_nb, (), nb, d_nb, ray_nb, pair, normal_nb)
    back = tuple(reversed(path))
    spanning = [ray_nb]
    for i in structure.non_affine:
        e = tuple(1 if j == i - 1 else 0 for j in range(b.n))
        spanning += [e, tuple(-x for x in e), tuple(a + c for a, c in zip(ray_nb, e)),
                     tuple(a - c for a, c in zip(ray_nb, e))]
    images = [eta(nb, back, v)[0] for v in spanning]
    if rank(images) != b.n - 1:
        raise ConsistencyError("transported wall vectors do not span a hyperplane")
    nu = nullspace(images, b.n)[0]
    d = b.symmetrizer
    delta = primitive([Fraction(x, di) for x, di in zip(nu, d)])
    if all(x <= 0 for x in delta):
        delta = tuple(-x for x in delta)
    if any(x < 0 for x in delta):
        raise ConsistencyError(f"delta {delta} has mixed signs")
    ray = imaginary_ray(b, delta)
    if ray != images[0]:
        raise ConsistencyError(f"-1/2 B delta = {ray} but the transported ray is {images[0]}")
    return DeltaData(delta, ray, path, nb, d_nb, ray_nb, pair, normal_nb)


def wall_coordinates(b: ExchangeMatrix, x: Sequence, data: Optional[DeltaData] = None) -> Optional[tuple[Fraction, Vector]]:
    """``(t, x0)`` with ``x' = x0 + t * ray'`` at the neighboring matrix, or ``None`` off the wall.

    ``x'`` is ``x`` transported to the neighboring matrix; ``x0`` vanishes on
    the affine pair and ``t >= 0``. ``t > 0`` means the relative interior.
    """
    data = data or delta_general(b)
    xp = eta(b, data.path, x)[0] if data.path else vec(x)
    if dot(data.wall_normal, xp) != 0:
        return None
    q = data.affine_pair[1] - 1
    t = frac(xp[q]) / data.neighbor_ray[q]
    if t < 0:
        return None
    x0 = vec(frac(a) - t * r for a, r in zip(xp, data.neighbor_ray))
    p = data.affine_pair[0] - 1
    if x0[p] != 0 or x0[q] != 0:
        raise ConsistencyError("wall decomposition failed")
    return t, x0


def on_wall(b: ExchangeMatrix, x: Sequence, data: Optional[DeltaData] = None) -> bool:
    return wall_coordinates(b, x, data) is not None


def in_wall_interior(b: ExchangeMatrix, x: Sequence, data: Optional[DeltaData] = None) -> bool:
    w = wall_coordinates(b, x, data)
    return w is not None and w[0] > 0
