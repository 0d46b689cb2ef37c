"""Exchange matrices, mutation, type classification and folding.

Indices in the public API are 1-based. Mutation sequences are stored in
application order: the first entry is applied first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotAdmissible,
    NotSkewSymmetrizable,
)
from .linalg import (
    Matrix,
    as_matrix,
    det,
    identity,
    is_positive_definite,
    nullspace,
    primitive,
    sign,
)

DEFAULT_CLASSIFY_CAP = 20000


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# --------------------------------------------------------------------------
# Symmetrizers and validation
# --------------------------------------------------------------------------

def symmetrizer(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Minimal positive integral ``d`` with ``d_i m_ij = -d_j m_ji``.

    Each connected component is normalized to gcd 1 independently.
    """
    rows = as_matrix(m)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("exchange matrix must be square")
    for i in range(n):
        if any(not isinstance(x, int) for x in rows[i]):
            raise NotSkewSymmetrizable("entries must be integers")
        if rows[i][i] != 0:
            raise NotSkewSymmetrizable(f"nonzero diagonal entry at {i + 1}")
        for j in range(i + 1, n):
            if sign(rows[i][j]) != -sign(rows[j][i]):
                raise NotSkewSymmetrizable(f"sign pattern fails at ({i + 1},{j + 1})")
    d: list[Optional[Fraction]] = [None] * n
    for root in range(n):
        if d[root] is not None:
            continue
        d[root] = Fraction(1)
        comp = [root]
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if rows[i][j] == 0:
                    continue
                # d_i b_ij = -d_j b_ji
                want = d[i] * Fraction(rows[i][j], -rows[j][i])
                if d[j] is None:
                    d[j] = want
                    comp.append(j)
                    queue.append(j)
                elif d[j] != want:
                    raise NotSkewSymmetrizable(f"no consistent symmetrizer around ({i + 1},{j + 1})")
        den = 1
        for i in comp:
            den = _lcm(den, d[i].denominator)
        ints = {i: int(d[i] * den) for i in comp}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        for i in comp:
            d[i] = Fraction(ints[i] // g)
    return tuple(int(x) for x in d)


def _check_index(k: int, n: int) -> int:
    if not isinstance(k, int) or not 1 <= k <= n:
        raise IndexOutOfRange(f"index {k} outside 1..{n}")
    return k - 1


# --------------------------------------------------------------------------
# Value types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExchangeMatrix:
    """Skew-symmetrizable square integer matrix with its cached symmetrizer."""

    rows: Matrix
    symmetrizer: tuple[int, ...] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        rows = as_matrix(self.rows)
        object.__setattr__(self, "rows", rows)
        if self.symmetrizer is None:
            object.__setattr__(self, "symmetrizer", symmetrizer(rows))

    @staticmethod
    def of(rows: Iterable[Iterable[int]]) -> "ExchangeMatrix":
        return ExchangeMatrix(as_matrix(rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> int:
        """1-based entry ``b_ij``."""
        return self.rows[i - 1][j - 1]

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __neg__(self) -> "ExchangeMatrix":
        return ExchangeMatrix(tuple(tuple(-x for x in r) for r in self.rows), self.symmetrizer)

    def transpose(self) -> "ExchangeMatrix":
        return ExchangeMatrix(tuple(zip(*self.rows)))

    def principal(self, idx: Sequence[int]) -> "ExchangeMatrix":
        """Principal submatrix on 1-based indices ``idx``."""
        z = [i - 1 for i in idx]
        return ExchangeMatrix(tuple(tuple(self.rows[i][j] for j in z) for i in z))


@dataclass(frozen=True)
class ExtendedExchangeMatrix:
    """Tall ``m x n`` matrix whose top ``n x n`` block is an exchange matrix."""

    rows: Matrix
    top: ExchangeMatrix = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        rows = as_matrix(self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise DimensionMismatch("empty matrix")
        n = len(rows[0])
        if len(rows) < n or any(len(r) != n for r in rows):
            raise DimensionMismatch("extended matrix must be m x n with m >= n")
        if any(not isinstance(x, int) for r in rows for x in r):
            raise DimensionMismatch("entries must be integers")
        if self.top is None:
            object.__setattr__(self, "top", ExchangeMatrix(rows[:n]))

    @staticmethod
    def of(rows: Iterable[Iterable[int]]) -> "ExtendedExchangeMatrix":
        return ExtendedExchangeMatrix(as_matrix(rows))

    @staticmethod
    def principal(b: ExchangeMatrix) -> "ExtendedExchangeMatrix":
        """``[B; I]``."""
        return ExtendedExchangeMatrix(b.rows + identity(b.n), b)

    @staticmethod
    def coefficient_free(b: ExchangeMatrix) -> "ExtendedExchangeMatrix":
        return ExtendedExchangeMatrix(b.rows, b)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def bottom(self) -> Matrix:
        return self.rows[self.n :]

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class SquareExtension:
    """``[[B, -R'^T], [R, 0]]`` skew-symmetrized by ``D + D'``."""

    rows: Matrix
    aux_symmetrizer: tuple[int, ...]

    @property
    def matrix(self) -> ExchangeMatrix:
        return ExchangeMatrix(self.rows, self.aux_symmetrizer)


@dataclass(frozen=True)
class MutationSequence:
    """Indices in application order."""

    indices: tuple[int, ...] = ()

    @staticmethod
    def of(seq: Iterable[int]) -> "MutationSequence":
        return MutationSequence(tuple(int(k) for k in seq))

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __add__(self, other: "MutationSequence | Sequence[int]") -> "MutationSequence":
        return MutationSequence(self.indices + tuple(other))

    def reversed(self) -> "MutationSequence":
        return MutationSequence(self.indices[::-1])

    def right_to_left(self) -> str:
        """The conventional right-to-left rendering, e.g. (1,2) -> ``"21"``."""
        sep = "" if all(k < 10 for k in self.indices) else ","
        return sep.join(str(k) for k in reversed(self.indices))


def _seq(seq: Iterable[int] | MutationSequence, n: int) -> tuple[int, ...]:
    return tuple(_check_index(k, n) for k in seq)


# --------------------------------------------------------------------------
# Mutation
# --------------------------------------------------------------------------

def mutate_array(a: Sequence[Sequence[int]], k_row: int, k_col: int | None = None) -> Matrix:
    """Matrix mutation of a rectangular array at 0-based pivot ``(k_row, k_col)``.

    ``a'_ij = -a_ij`` in the pivot row or column, otherwise
    ``a_ij + sgn(a_ik) [a_ik a_kj]_+``.
    """
    kc = k_row if k_col is None else k_col
    rows = [list(r) for r in a]
    out = []
    for i, r in enumerate(rows):
        if i == k_row:
            out.append(tuple(-x for x in r))
            continue
        aik = r[kc]
        new = []
        for j, x in enumerate(r):
            if j == kc:
                new.append(-x)
            else:
                p = aik * rows[k_row][j]
                new.append(x + (sign(aik) * p if p > 0 else 0))
        out.append(tuple(new))
    return tuple(out)


def mutate(b: ExchangeMatrix, k: int) -> ExchangeMatrix:
    kk = _check_index(k, b.n)
    return ExchangeMatrix(mutate_array(b.rows, kk), b.symmetrizer)


def mutate_sequence(b: ExchangeMatrix, seq: Iterable[int]) -> ExchangeMatrix:
    rows = b.rows
    for k in _seq(seq, b.n):
        rows = mutate_array(rows, k)
    return ExchangeMatrix(rows, b.symmetrizer)


def mutate_extended(bt: ExtendedExchangeMatrix, k: int) -> ExtendedExchangeMatrix:
    kk = _check_index(k, bt.n)
    rows = mutate_array(bt.rows, kk)
    return ExtendedExchangeMatrix(rows, ExchangeMatrix(rows[: bt.n], bt.top.symmetrizer))


def mutate_extended_sequence(bt: ExtendedExchangeMatrix, seq: Iterable[int]) -> ExtendedExchangeMatrix:
    rows = bt.rows
    for k in _seq(seq, bt.n):
        rows = mutate_array(rows, k)
    return ExtendedExchangeMatrix(rows, ExchangeMatrix(rows[: bt.n], bt.top.symmetrizer))


def square_extension(bt: ExtendedExchangeMatrix) -> SquareExtension:
    n, m = bt.n, bt.m
    d = bt.top.symmetrizer
    r = bt.bottom
    d_aux = []
    r_prime = []
    for row in r:
        # smallest d' with d' * R_rj / d_j integral for every j
        dp = 1
        for x, dj in zip(row, d):
            dp = _lcm(dp, dj // gcd(dj, x))
        d_aux.append(dp)
        r_prime.append(tuple(dp * x // dj for x, dj in zip(row, d)))
    rows = []
    for i in range(n):
        rows.append(tuple(bt.rows[i]) + tuple(-r_prime[s][i] for s in range(m - n)))
    for s in range(m - n):
        rows.append(tuple(r[s]) + (0,) * (m - n))
    return SquareExtension(tuple(rows), tuple(d) + tuple(d_aux))


def ef_matrices(b: ExchangeMatrix | Sequence[Sequence[int]], k: int, eps: int) -> tuple[Matrix, Matrix]:
    """``E = J_k + [eps B]_+`` (column ``k``) and ``F = J_k + [-eps B]_+`` (row ``k``)."""
    rows = b.rows if isinstance(b, ExchangeMatrix) else as_matrix(b)
    n = len(rows)
    kk = _check_index(k, n)
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    e = [list(r) for r in identity(n)]
    f = [list(r) for r in identity(n)]
    e[kk][kk] = -1
    f[kk][kk] = -1
    for i in range(n):
        if i != kk:
            e[i][kk] = max(eps * rows[i][kk], 0)
            f[kk][i] = max(-eps * rows[kk][i], 0)
    return as_matrix(e), as_matrix(f)


def ef_column_matrix(column: Sequence[int], k0: int, eps: int) -> Matrix:
    """``E`` for an ``m x m`` square extension from column ``k`` alone (0-based ``k0``)."""
    m = len(column)
    e = [list(r) for r in identity(m)]
    e[k0][k0] = -1
    for i in range(m):
        if i != k0:
            e[i][k0] = max(eps * column[i], 0)
    return as_matrix(e)


# --------------------------------------------------------------------------
# Structure: companions, acyclicity, bipartiteness, blocks
# --------------------------------------------------------------------------

def cartan_companion(b: ExchangeMatrix) -> Matrix:
    n = b.n
    return tuple(
        tuple(2 if i == j else -abs(b.rows[i][j]) for j in range(n)) for i in range(n)
    )


def symmetrized_cartan(b: ExchangeMatrix) -> Matrix:
    """``D A`` for the Cartan companion ``A``; symmetric by construction."""
    a = cartan_companion(b)
    d = b.symmetrizer
    return tuple(tuple(d[i] * x for x in row) for i, row in enumerate(a))


def is_acyclic(b: ExchangeMatrix) -> bool:
    """No oriented cycle in the digraph with an arrow ``i -> j`` when ``b_ij > 0``."""
    n = b.n
    indeg = [sum(1 for i in range(n) if b.rows[i][j] > 0) for j in range(n)]
    ready = [j for j in range(n) if indeg[j] == 0]
    seen = 0
    while ready:
        i = ready.pop()
        seen += 1
        for j in range(n):
            if b.rows[i][j] > 0:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
    return seen == n


def block_decompose(b: ExchangeMatrix) -> list[tuple[int, ...]]:
    """Connected components of the nonzero pattern, 1-based, sorted by least member."""
    n = b.n
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if b.rows[i][j] != 0 and not seen[j]:
                    seen[j] = True
                    stack.append(j)
        out.append(tuple(sorted(i + 1 for i in comp)))
    return out


def is_bipartite(b: ExchangeMatrix) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """``(P, N)`` with ``b_ij > 0`` only for ``i in P, j in N``; isolated indices go to ``P``."""
    n = b.n
    p = {i for i in range(n) if any(x > 0 for x in b.rows[i])}
    q = {j for j in range(n) if any(b.rows[i][j] > 0 for i in range(n))}
    if p & q:
        return None
    p |= set(range(n)) - p - q
    return tuple(sorted(i + 1 for i in p)), tuple(sorted(j + 1 for j in q))


@dataclass(frozen=True)
class SalienceResult:
    """Salience verdict. ``witness`` is positive on every nonzero column when salient;
    otherwise ``alpha`` is a nonzero nonnegative vector with ``M alpha = 0`` whose
    positive part splits into two supports with opposite images ``line`` and ``-line``."""

    salient: bool
    witness: Optional[tuple] = None
    alpha: Optional[tuple] = None
    line: Optional[tuple] = None


def is_salient(m: Sequence[Sequence[int]]) -> SalienceResult:
    from .polyhedra import cone_from_inequalities

    rows = as_matrix(m)
    dim = len(rows)
    ncols = len(rows[0]) if rows else 0
    cols = [tuple(rows[i][j] for i in range(dim)) for j in range(ncols)]
    nz = [j for j, c in enumerate(cols) if any(c)]
    if not nz:
        return SalienceResult(True, witness=(0,) * dim)
    # nonnegative kernel {alpha >= 0, M alpha = 0} restricted to the nonzero columns
    sub = [[rows[i][j] for j in nz] for i in range(dim)]
    unit = [[1 if a == b else 0 for b in range(len(nz))] for a in range(len(nz))]
    kern_rays, kern_lines = cone_from_inequalities(unit, sub, len(nz))
    assert not kern_lines
    if kern_rays:
        ray = kern_rays[0]
        alpha = [0] * ncols
        for pos, j in enumerate(nz):
            alpha[j] = ray[pos]
        support = [j for j in range(ncols) if alpha[j] > 0]
        first = support[0]
        line = tuple(alpha[first] * x for x in cols[first])
        return SalienceResult(False, alpha=tuple(alpha), line=line)
    # pointed cone: sum of the dual extreme rays is strictly positive on it
    dual_rays, dual_lines = cone_from_inequalities([cols[j] for j in nz], (), dim)
    x = [0] * dim
    for r in dual_rays:
        x = [a + b for a, b in zip(x, r)]
    witness = primitive(x)
    if any(sum(a * b for a, b in zip(witness, cols[j])) <= 0 for j in nz):
        # the dual cone is full-dimensional here; fall back to its interior via lines
        raise AssertionError("salience witness failed")
    return SalienceResult(True, witness=witness)


# --------------------------------------------------------------------------
# Classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeClass:
    """Outcome of ``classify``.

    ``tag`` is one of ``finite``, ``affine``, ``wild``, ``unresolved``.
    ``acyclic`` and ``path`` describe the witness for finite and affine tags;
    ``names`` lists Dynkin names of the finite blocks of the witness.
    For ``wild`` the ``certificate`` names the argument and ``pair`` or
    ``matrix`` hold the data; ``unresolved`` records the ``cap``.
    """

    tag: str
    acyclic: Optional[ExchangeMatrix] = None
    path: tuple[int, ...] = ()
    names: tuple[str, ...] = ()
    certificate: str = ""
    pair: Optional[tuple[int, int]] = None
    matrix: Optional[ExchangeMatrix] = None
    blocks: tuple[tuple[tuple[int, ...], str], ...] = ()
    cap: Optional[int] = None
    explored: int = 0

    def to_json(self) -> dict:
        out: dict = {"type": self.tag, "explored": self.explored}
        if self.acyclic is not None:
            out["acyclic"] = self.acyclic.to_lists()
            out["path"] = list(self.path)
            out["blocks"] = [{"indices": list(ix), "type": t} for ix, t in self.blocks]
            if self.names:
                out["names"] = list(self.names)
        if self.tag == "wild":
            out["certificate"] = self.certificate
            if self.pair is not None:
                out["pair"] = list(self.pair)
            if self.matrix is not None:
                out["matrix"] = self.matrix.to_lists()
                out["path"] = list(self.path)
        if self.cap is not None:
            out["cap"] = self.cap
        return out


def _cartan_block_type(b: ExchangeMatrix) -> str:
    """``finite``, ``affine`` or ``indefinite`` for an indecomposable matrix."""
    s = symmetrized_cartan(b)
    if is_positive_definite(s):
        return "finite"
    if det(s) == 0:
        n = len(s)
        ok = all(
            is_positive_definite([[s[i][j] for j in range(n) if j != v] for i in range(n) if i != v])
            for v in range(n)
        )
        if ok:
            return "affine"
    return "indefinite"


def dynkin_name(b: ExchangeMatrix) -> str:
    """Name of an indecomposable finite-type matrix via its Cartan companion.

    Rank 2 with a double bond is reported as ``C2``. For ``B_n``/``C_n`` the
    long root is the end node with the larger symmetrizer entry.
    """
    n = b.n
    d = b.symmetrizer
    a = cartan_companion(b)
    if n == 1:
        return "A1"
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if a[i][j]:
                edges[(i, j)] = a[i][j] * a[j][i]
    deg = [sum(1 for e in edges if v in e) for v in range(n)]
    mult = sorted(edges.values())
    if mult == [3]:
        return "G2"
    doubles = [e for e, w in edges.items() if w == 2]
    if doubles:
        (u, v), = doubles
        if n == 2:
            return "C2"
        if deg[u] == 1 or deg[v] == 1:
            leaf, other = (u, v) if deg[u] == 1 else (v, u)
            return f"C{n}" if d[leaf] > d[other] else f"B{n}"
        return "F4"
    branch = [v for v in range(n) if deg[v] == 3]
    if not branch:
        return f"A{n}"
    c = branch[0]
    arms = []
    for start in range(n):
        if (min(c, start), max(c, start)) not in edges:
            continue
        length, prev, cur = 1, c, start
        while True:
            nxt = [w for w in range(n) if w != prev and (min(cur, w), max(cur, w)) in edges]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    return {(1, 2, 2): "E6", (1, 2, 3): "E7", (1, 2, 4): "E8"}.get(tuple(arms), "?")


def _acyclic_verdict(b: ExchangeMatrix) -> tuple[str, tuple, tuple]:
    blocks = block_decompose(b)
    kinds = []
    names = []
    for blk in blocks:
        sub = b.principal(blk)
        kind = _cartan_block_type(sub)
        kinds.append((blk, kind))
        if kind == "finite":
            names.append(dynkin_name(sub))
    return "", tuple(kinds), tuple(names)


def _growth_triple(rows: Matrix) -> Optional[tuple[int, int, int]]:
    """A principal 3x3 submatrix that is non-acyclic with all products ``-4``."""
    n = len(rows)
    for t in combinations(range(n), 3):
        if all(rows[i][j] * rows[j][i] == -4 for i, j in combinations(t, 2)):
            sub = ExchangeMatrix(tuple(tuple(rows[i][j] for j in t) for i in t))
            if not is_acyclic(sub):
                return tuple(i + 1 for i in t)
    return None


def classify(b: ExchangeMatrix, cap: int = DEFAULT_CLASSIFY_CAP) -> TypeClass:
    """Breadth-first search of the mutation class for a type verdict."""
    start = b.rows
    parent: dict[Matrix, tuple[Optional[Matrix], int]] = {start: (None, 0)}
    queue = deque([start])
    n = b.n

    def path_to(rows: Matrix) -> tuple[int, ...]:
        out = []
        while parent[rows][0] is not None:
            prev, k = parent[rows]
            out.append(k)
            rows = prev
        return tuple(reversed(out))

    explored = 0
    while queue:
        rows = queue.popleft()
        explored += 1
        cur = ExchangeMatrix(rows, b.symmetrizer)
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] * rows[j][i] < -4:
                    return TypeClass(
                        "wild", certificate="product below -4", pair=(i + 1, j + 1),
                        matrix=cur, path=path_to(rows), explored=explored,
                    )
        triple = _growth_triple(rows)
        if triple is not None:
            return TypeClass(
                "wild", certificate="exponential growth", pair=None, matrix=cur,
                path=path_to(rows), blocks=((triple, "growth"),), explored=explored,
            )
        if is_acyclic(cur):
            _, kinds, names = _acyclic_verdict(cur)
            tags = {k for _, k in kinds}
            if "indefinite" in tags:
                return TypeClass(
                    "wild", certificate="acyclic member with indefinite Cartan companion",
                    matrix=cur, path=path_to(rows), blocks=kinds, explored=explored,
                )
            tag = "affine" if "affine" in tags else "finite"
            return TypeClass(tag, acyclic=cur, path=path_to(rows), names=names, blocks=kinds, explored=explored)
        if explored >= cap:
            return TypeClass("unresolved", cap=cap, explored=explored)
        for k in range(n):
            nxt = mutate_array(rows, k)
            if nxt not in parent:
                parent[nxt] = (rows, k + 1)
                queue.append(nxt)
    return TypeClass(
        "wild", certificate="finite mutation class without an acyclic member",
        matrix=b, explored=explored,
    )


def mutation_class(b: ExchangeMatrix, cap: int = DEFAULT_CLASSIFY_CAP) -> dict[Matrix, tuple[int, ...]]:
    """All matrices of the class (raw entries) with a BFS path to each.

    Raises ``SearchExhausted`` when more than ``cap`` matrices are found.
    """
    from .errors import SearchExhausted

    paths: dict[Matrix, tuple[int, ...]] = {b.rows: ()}
    queue = deque([b.rows])
    while queue:
        rows = queue.popleft()
        for k in range(b.n):
            nxt = mutate_array(rows, k)
            if nxt not in paths:
                paths[nxt] = paths[rows] + (k + 1,)
                if len(paths) > cap:
                    raise SearchExhausted(f"mutation class exceeds {cap} matrices")
                queue.append(nxt)
    return paths


# --------------------------------------------------------------------------
# Folding
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FoldingAutomorphism:
    """Permutation ``sigma`` of ``1..n`` given by its images."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise DimensionMismatch("not a permutation of 1..n")
        object.__setattr__(self, "images", imgs)

    @staticmethod
    def from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> "FoldingAutomorphism":
        img = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a - 1] = b
        return FoldingAutomorphism(tuple(img))

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        """Orbits ordered by smallest member."""
        seen = set()
        out = []
        for i in range(1, self.n + 1):
            if i in seen:
                continue
            orb, j = [], i
            while j not in seen:
                seen.add(j)
                orb.append(j)
                j = self.images[j - 1]
            out.append(tuple(sorted(orb)))
        return tuple(sorted(out))


def admissibility_violation(b: ExchangeMatrix, sigma: FoldingAutomorphism) -> Optional[tuple[int, int]]:
    """First pair witnessing that ``sigma`` is not admissible for ``b``, or ``None``."""
    if sigma.n != b.n:
        raise DimensionMismatch("automorphism and matrix sizes differ")
    rows = b.rows
    img = sigma.images
    for i in range(b.n):
        for j in range(b.n):
            if rows[img[i] - 1][img[j] - 1] != rows[i][j]:
                return (i + 1, j + 1)
    orbs = sigma.orbits
    for oi in orbs:
        for a in oi:
            for c in oi:
                if rows[a - 1][c - 1] != 0:
                    return (a, c)
    for oi in orbs:
        for oj in orbs:
            signs = {sign(rows[a - 1][c - 1]) for a in oi for c in oj} - {0}
            if len(signs) > 1:
                a, c = next((a, c) for a in oi for c in oj if rows[a - 1][c - 1] != 0)
                return (a, c)
    return None


def fold(b: ExchangeMatrix, sigma: FoldingAutomorphism) -> ExchangeMatrix:
    bad = admissibility_violation(b, sigma)
    if bad is not None:
        raise NotAdmissible(f"automorphism not admissible at pair {bad}", bad)
    orbs = sigma.orbits
    rows = tuple(
        tuple(sum(b.rows[i - 1][oj[0] - 1] for i in oi) for oj in orbs) for oi in orbs
    )
    return ExchangeMatrix(rows)


def mutate_orbit(b: ExchangeMatrix, orbit: Sequence[int]) -> ExchangeMatrix:
    return mutate_sequence(b, orbit)


@dataclass(frozen=True)
class StabilityResult:
    verified: bool
    depth: int
    path: tuple[int, ...] = ()
    pair: Optional[tuple[int, int]] = None


def check_stable(b: ExchangeMatrix, sigma: FoldingAutomorphism, depth: int) -> StabilityResult:
    """Admissibility of ``sigma`` along every orbit sequence of at most ``depth`` orbit mutations.

    ``path`` in a counterexample lists orbit numbers (1-based, in orbit order).
    """
    orbs = sigma.orbits
    bad = admissibility_violation(b, sigma)
    if bad is not None:
        return StabilityResult(False, 0, (), bad)
    seen = {b.rows}
    frontier = [(b, ())]
    for level in range(1, depth + 1):
        nxt = []
        for cur, path in frontier:
            for oi, orb in enumerate(orbs, start=1):
                m = mutate_orbit(cur, orb)
                bad = admissibility_violation(m, sigma)
                if bad is not None:
                    return StabilityResult(False, level, path + (oi,), bad)
                if m.rows not in seen:
                    seen.add(m.rows)
                    nxt.append((m, path + (oi,)))
        frontier = nxt
        if not frontier:
            break
    return StabilityResult(True, depth)


def kernel_vector(m: Sequence[Sequence[int]]) -> Optional[tuple[int, ...]]:
    """A primitive kernel vector when the kernel is one-dimensional."""
    ker = nullspace(m)
    return ker[0] if len(ker) == 1 else None
