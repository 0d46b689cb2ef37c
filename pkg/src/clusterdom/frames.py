"""C- and G-matrices, green and red sequences, g-vector cones."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .exchange import ExchangeMatrix, MutationSequence, _seq, mutate_array
from .linalg import Matrix, Number, identity, inverse, solve, transpose
from .polyhedra import PointedPolyhedron

DEFAULT_GREEN_CAP = 100_000


@dataclass(frozen=True)
class Frame:
    """Seed reached by ``sequence`` from the initial seed of ``B_0``."""

    sequence: tuple[int, ...]
    c: Matrix
    g: Matrix
    b: ExchangeMatrix

    def c_column(self, k: int) -> tuple:
        return tuple(row[k - 1] for row in self.c)

    def g_columns(self) -> list[tuple]:
        return [tuple(row[j] for row in self.g) for j in range(len(self.g))]


def _stack(b: Matrix) -> Matrix:
    return b + identity(len(b))


def _walk(b: Matrix, seq0: Sequence[int]) -> Iterator[tuple[Matrix, Matrix]]:
    """Yield ``(B_t, C_t)`` for each prefix, starting with the empty one."""
    n = len(b)
    m = _stack(b)
    yield m[:n], m[n:]
    for k in seq0:
        m = mutate_array(m, k)
        yield m[:n], m[n:]


def frame_along(b: ExchangeMatrix, seq: Iterable[int]) -> list[Frame]:
    seq0 = _seq(seq, b.n)
    dual = tuple(tuple(-x for x in row) for row in transpose(b.rows))
    frames = []
    for p, ((bt, c), (_, cd)) in enumerate(zip(_walk(b.rows, seq0), _walk(dual, seq0))):
        g = transpose(inverse(cd))
        frames.append(Frame(tuple(k + 1 for k in seq0[:p]), c, g, ExchangeMatrix(bt, b.symmetrizer)))
    return frames


def final_frame(b: ExchangeMatrix, seq: Iterable[int]) -> Frame:
    return frame_along(b, seq)[-1]


def _positive(col: Sequence[Number]) -> bool:
    return all(x >= 0 for x in col) and any(col)


def _negative(col: Sequence[Number]) -> bool:
    return all(x <= 0 for x in col) and any(col)


def is_green(b: ExchangeMatrix, seq: Iterable[int]) -> bool:
    """Every step mutates at an index whose current c-vector is positive."""
    seq0 = _seq(seq, b.n)
    for k, (_, c) in zip(seq0, _walk(b.rows, seq0)):
        if not _positive([row[k] for row in c]):
            return False
    return True


def is_red(b: ExchangeMatrix, seq: Iterable[int]) -> bool:
    return is_green(-b, seq)


def is_maximal_green(b: ExchangeMatrix, seq: Iterable[int]) -> bool:
    seq = list(seq)
    if not is_green(b, seq):
        return False
    c = final_frame(b, seq).c
    return all(_negative([row[j] for row in c]) for j in range(b.n))


def is_maximal_red(b: ExchangeMatrix, seq: Iterable[int]) -> bool:
    return is_maximal_green(-b, seq)


def find_maximal_green(b: ExchangeMatrix, cap: int = DEFAULT_GREEN_CAP) -> Optional[MutationSequence]:
    """Depth-first search over green steps in increasing index order.

    The depth bound is raised one step at a time, so infinite green paths
    (which exist in affine type) cannot trap the search. A C-matrix already
    reached with at least as much remaining depth is not expanded again.
    ``cap`` bounds the total number of expanded nodes.
    """
    n = b.n
    budget = [cap]

    def dfs(m: Matrix, path: list[int], left: int, seen: dict) -> Optional[list[int]]:
        c = m[n:]
        if all(_negative([row[j] for row in c]) for j in range(n)):
            return list(path)
        if left == 0:
            return None
        key = c
        if seen.get(key, -1) >= left:
            return None
        seen[key] = left
        budget[0] -= 1
        if budget[0] < 0:
            raise _Budget()
        for k in range(n):
            if _positive([row[k] for row in c]):
                path.append(k + 1)
                out = dfs(mutate_array(m, k), path, left - 1, seen)
                path.pop()
                if out is not None:
                    return out
        return None

    start = _stack(b.rows)
    depth = 0
    try:
        while True:
            out = dfs(start, [], depth, {})
            if out is not None:
                return MutationSequence(tuple(out))
            depth += 1
    except _Budget:
        return None


def find_maximal_red(b: ExchangeMatrix, cap: int = DEFAULT_GREEN_CAP) -> Optional[MutationSequence]:
    return find_maximal_green(-b, cap)


class _Budget(Exception):
    pass


def gvector_cone(b: ExchangeMatrix, seq: Iterable[int]) -> PointedPolyhedron:
    g = final_frame(b, seq).g
    cols = [tuple(row[j] for row in g) for j in range(b.n)]
    return PointedPolyhedron((0,) * b.n, tuple(cols))


def _gkey(g: Matrix) -> tuple:
    return tuple(sorted(tuple(row[j] for row in g) for j in range(len(g))))


@dataclass
class _Node:
    sequence: tuple[int, ...]
    stack: Matrix
    dual: Matrix

    def frame(self, b: ExchangeMatrix) -> Frame:
        n = b.n
        g = transpose(inverse(self.dual[n:]))
        return Frame(self.sequence, self.stack[n:], g, ExchangeMatrix(self.stack[:n], b.symmetrizer))

    def step(self, k: int) -> "_Node":
        return _Node(self.sequence + (k + 1,), mutate_array(self.stack, k), mutate_array(self.dual, k))


def _root(b: ExchangeMatrix) -> _Node:
    dual = tuple(tuple(-x for x in row) for row in transpose(b.rows))
    return _Node((), _stack(b.rows), _stack(dual))


def enumerate_seeds(b: ExchangeMatrix, cap: int = 20000) -> list[Frame]:
    """Seeds up to permutation, keyed by their set of g-vectors, in BFS order.

    Raises ``SearchExhausted`` when more than ``cap`` seeds are found, which
    is what happens outside finite type.
    """
    from .errors import SearchExhausted

    root = _root(b)
    first = root.frame(b)
    seen = {_gkey(first.g)}
    out = [first]
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for k in range(b.n):
            nxt = node.step(k)
            f = nxt.frame(b)
            key = _gkey(f.g)
            if key in seen:
                continue
            seen.add(key)
            out.append(f)
            if len(out) > cap:
                raise SearchExhausted(f"more than {cap} seeds")
            queue.append(nxt)
    return out


def find_cone_containing(
    b: ExchangeMatrix, x: Sequence[Number], cap: int = 5000, greedy_cap: int = 200
) -> Optional[Frame]:
    """Search for a seed whose g-vector cone contains ``x``.

    First pass: only cross walls separating the current cone from ``x`` (the
    coordinate of ``x`` in the current g-basis is negative). Outside finite
    type that pass can run along cones accumulating at a limit ray on the
    wrong side, so after ``greedy_cap`` nodes a plain breadth-first search
    over all mutations takes over, up to ``cap`` nodes.
    """
    for greedy, budget in ((True, greedy_cap), (False, cap)):
        root = _root(b)
        seen = {_gkey(root.frame(b).g)}
        queue = deque([root])
        visited = 0
        while queue and visited < budget:
            node = queue.popleft()
            visited += 1
            f = node.frame(b)
            coords = solve(f.g, x)
            if all(c >= 0 for c in coords):
                return f
            for k in range(b.n):
                if greedy and coords[k] >= 0:
                    continue
                nxt = node.step(k)
                key = _gkey(nxt.frame(b).g)
                if key not in seen:
                    seen.add(key)
                    queue.append(nxt)
    return None
