"""Dominance regions: pieces, point certificates, affine segments and integral points.

The piece of ``lam`` for a sequence ``k`` is the pull-back, along the inverse
mutation map, of the translated cone spanned by the columns of ``mu_k(B~)``
at ``eta_k(lam)``. The dominance region is the intersection of all pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence, Union

from .affine import (
    DeltaData,
    comp_c,
    delta_general,
    expand_sequence,
    neighboring_structure,
    wall_coordinates,
)
from .errors import ConsistencyError, PreconditionError, SearchExhausted
from .exchange import (
    ExchangeMatrix,
    ExtendedExchangeMatrix,
    FoldingAutomorphism,
    _seq,
    classify,
    fold,
    is_bipartite,
    is_salient,
    mutate_array,
)
from .frames import enumerate_seeds, final_frame, find_cone_containing, find_maximal_red, is_maximal_red
from .linalg import Matrix, Number, Vector, add, frac, identity, matvec, rank, scale, sub, transpose, vec
from .mutation_maps import DEFAULT_PIECE_CAP, eta_any, map_polyhedron_exact, map_polyhedron_hull
from .polyhedra import (
    HPolyhedron,
    Polyhedron,
    PointedPolyhedron,
    RegionUnion,
    contained_in,
    h_to_v,
    intersect,
    is_singleton,
    lattice_points_on_segment,
)

AnyMatrix = Union[ExchangeMatrix, ExtendedExchangeMatrix]


def _as_extended(b: AnyMatrix) -> ExtendedExchangeMatrix:
    if isinstance(b, ExtendedExchangeMatrix):
        return b
    return ExtendedExchangeMatrix(b.rows, b)


def _mutated(b: ExtendedExchangeMatrix, seq: Sequence[int]) -> ExtendedExchangeMatrix:
    rows = b.rows
    for k in _seq(seq, b.n):
        rows = mutate_array(rows, k)
    return ExtendedExchangeMatrix(rows, ExchangeMatrix(rows[: b.n], b.top.symmetrizer))


def _columns(rows: Matrix) -> list[Vector]:
    return [tuple(r[j] for r in rows) for j in range(len(rows[0]))]


# --------------------------------------------------------------------------
# Pieces
# --------------------------------------------------------------------------

def dominance_piece(
    bt: AnyMatrix,
    lam: Sequence[Number],
    seq: Iterable[int],
    mode: str = "hull",
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> RegionUnion | PointedPolyhedron:
    """``exact`` gives a ``RegionUnion``; ``hull`` a translated cone at ``lam`` containing it."""
    bt = _as_extended(bt)
    seq = tuple(seq)
    if len(lam) != bt.m:
        from .errors import DimensionMismatch

        raise DimensionMismatch(f"lambda has length {len(lam)}, expected {bt.m}")
    end = _mutated(bt, seq)
    lam_end = eta_any(bt, seq, lam)
    cone = PointedPolyhedron(lam_end, tuple(_columns(end.rows)))
    back = tuple(reversed(seq))
    if mode == "exact":
        return map_polyhedron_exact(end, back, cone, piece_cap)
    if mode == "hull":
        return map_polyhedron_hull(end, back, cone)
    raise ValueError(f"unknown mode {mode!r}")


# --------------------------------------------------------------------------
# Results
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PointCertificate:
    """Data of a point certificate.

    ``seed_path`` reaches a seed whose g-vector cone contains the projection of
    ``lam``; ``red_sequence`` is maximal red there. At the end seed the two
    cones ``end_lambda + cone(end_matrix)`` and ``end_lambda - cone(end_matrix)``
    meet only in ``end_lambda``.
    """

    lam: Vector
    seed_path: tuple[int, ...]
    red_sequence: tuple[int, ...]
    end_matrix: Matrix
    end_lambda: Vector
    exact_checked: bool

    def to_json(self) -> dict:
        return {
            "seed_path": list(self.seed_path),
            "red_sequence": list(self.red_sequence),
            "end_matrix": [list(r) for r in self.end_matrix],
            "end_lambda": [_jnum(x) for x in self.end_lambda],
            "exact_checked": self.exact_checked,
        }


def _jnum(x):
    x = frac(x)
    return int(x) if x.denominator == 1 else str(x)


@dataclass(frozen=True)
class Segment:
    p: Vector
    q: Vector
    direction: Vector
    a_star: Fraction
    integral: tuple[Vector, ...]


@dataclass(frozen=True)
class DominanceResult:
    """``kind`` is ``point``, ``segment`` or ``residual``."""

    kind: str
    lam: Vector
    certificate: Optional[object] = None
    segment: Optional[Segment] = None
    region: Optional[object] = None
    depth: Optional[int] = None
    family: tuple = ()
    history: tuple = ()
    note: str = ""

    @property
    def verified(self) -> bool:
        return self.kind in ("point", "segment")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "lambda": [_jnum(x) for x in self.lam]}
        if self.segment is not None:
            out["endpoints"] = [[_jnum(x) for x in self.segment.p], [_jnum(x) for x in self.segment.q]]
            out["direction"] = [_jnum(x) for x in self.segment.direction]
            out["integral"] = [[_jnum(x) for x in v] for v in self.segment.integral]
        elif self.kind == "point":
            out["endpoints"] = [[_jnum(x) for x in self.lam]] * 2
            out["integral"] = [[_jnum(x) for x in self.lam]] if all(frac(x).denominator == 1 for x in self.lam) else []
        if self.depth is not None:
            out["depth"] = self.depth
        if self.certificate is not None and hasattr(self.certificate, "to_json"):
            out["certificate"] = self.certificate.to_json()
        if self.region is not None and hasattr(self.region, "to_json"):
            out["region"] = self.region.to_json()
        if self.note:
            out["note"] = self.note
        return out


# --------------------------------------------------------------------------
# Point certificates
# --------------------------------------------------------------------------

def certify_point(
    bt: AnyMatrix, lam: Sequence[Number], cap: int = 5000, exact_check: bool = True
) -> Optional[PointCertificate]:
    """Certificate that the dominance region of ``lam`` is ``{lam}``, or ``None``.

    ``None`` means the projection of ``lam`` lies on the imaginary wall or the
    columns are dependent. Running out of search budget raises ``SearchExhausted``.
    """
    bt = _as_extended(bt)
    b = bt.top
    n = bt.n
    lam = vec(lam)
    proj = lam[:n]
    if classify(b).tag == "affine" and wall_coordinates(b, proj) is not None:
        return None
    if rank(bt.rows) < n:
        return None
    frame = find_cone_containing(b, proj, cap)
    if frame is None:
        raise SearchExhausted("no g-vector cone containing the projection was found")
    s = frame.sequence
    mid = _mutated(bt, s)
    lam_mid = eta_any(bt, s, lam)
    red = find_maximal_red(mid.top)
    if red is None:
        raise SearchExhausted("no maximal red sequence found")
    r = tuple(red)
    if not is_maximal_red(mid.top, r):
        raise ConsistencyError("red sequence search returned a non-maximal sequence")
    end = _mutated(mid, r)
    lam_end = eta_any(mid, r, lam_mid)
    cols = _columns(end.rows)
    plus = PointedPolyhedron(lam_end, tuple(cols))
    minus = PointedPolyhedron(lam_end, tuple(tuple(-x for x in c) for c in cols))
    meet = intersect(plus, minus)
    if meet is None or not is_singleton(meet) or meet.vertices[0] != lam_end:
        raise ConsistencyError("certificate cones do not meet in a single point")
    exact_checked = False
    if exact_check:
        back = tuple(reversed(r))
        piece = dominance_piece(end, lam_end, back, "exact")
        if piece.truncated or not all(contained_in(p, minus) for p in piece.pieces):
            raise ConsistencyError("exact piece escapes the opposite cone")
        exact_checked = True
    return PointCertificate(lam, s, r, end.rows, lam_end, exact_checked)


# --------------------------------------------------------------------------
# Affine segments
# --------------------------------------------------------------------------

def affine_segment_predict(bt: AnyMatrix, lam: Sequence[Number], data: Optional[DeltaData] = None) -> Segment:
    bt = _as_extended(bt)
    b = bt.top
    if classify(b).tag != "affine":
        raise PreconditionError("matrix is not of affine type")
    data = data or delta_general(b)
    lam = vec(lam)
    w = wall_coordinates(b, lam[: bt.n], data)
    if w is None:
        raise PreconditionError("lambda is off the imaginary wall")
    t, _ = w
    if t == 0:
        raise PreconditionError("lambda lies on the relative boundary of the imaginary wall")
    a_star = Fraction(t) / 2
    direction = matvec(bt.rows, data.delta)
    q = add(lam, scale(a_star, direction))
    pts = tuple(lattice_points_on_segment(lam, q, direction)) if all(frac(x).denominator == 1 for x in lam) else ()
    return Segment(lam, q, direction, a_star, pts)


def _alphabet(nb: ExchangeMatrix) -> list[tuple[str, tuple[int, ...]]]:
    s = neighboring_structure(nb)
    letters: list[tuple[str, tuple[int, ...]]] = []
    if s.non_affine:
        comp = comp_c(nb, s)
        bip = is_bipartite(comp)
        if bip is not None:
            pp = [s.non_affine[i - 1] for i in bip[0]]
            nn = [s.non_affine[i - 1] for i in bip[1]]
            letters.append(("PN", tuple(expand_sequence(nb, pp + nn))))
            letters.append(("NP", tuple(expand_sequence(nb, nn + pp))))
        else:
            for k in s.non_affine:
                letters.append((f"c{k}", tuple(expand_sequence(nb, [k]))))
    p, q = s.affine_pair
    letters.append(("pn", (p, q)))
    letters.append(("np", (q, p)))
    # single mutations catch cuts the structured words miss
    words = {w for _, w in letters}
    letters += [(str(i), (i,)) for i in range(1, nb.n + 1) if (i,) not in words]
    return letters


_INVERSE = {"PN": "NP", "NP": "PN", "pn": "np", "np": "pn"}


def salient_path(b: ExchangeMatrix, cap: int = 20000) -> Optional[tuple[int, ...]]:
    """Shortest mutation path to a matrix whose columns span a pointed cone."""
    from collections import deque

    seen = {b.rows: ()}
    queue = deque([b.rows])
    while queue:
        rows = queue.popleft()
        if is_salient(rows).salient:
            return seen[rows]
        for k in range(b.n):
            nxt = mutate_array(rows, k)
            if nxt not in seen:
                if len(seen) >= cap:
                    return None
                seen[nxt] = seen[rows] + (k + 1,)
                queue.append(nxt)
    return None


def _family(letters, salient: Optional[tuple[int, ...]], depth: int):
    """Sequences grouped by number of letters; the salient path only comes last."""
    names = [nm for nm, _ in letters]
    words = dict(letters)
    yield 0, ()
    for d in range(1, depth + 1):
        for combo in product(names + (["sal"] if salient else []), repeat=d):
            if "sal" in combo[:-1]:
                continue
            if any(_INVERSE.get(a) == b or (a == b and a.isdigit()) for a, b in zip(combo, combo[1:])):
                continue
            seq: tuple[int, ...] = ()
            for nm in combo:
                seq += salient if nm == "sal" else words[nm]
            yield d, seq


def _wall_h(bt: ExtendedExchangeMatrix, data: DeltaData) -> HPolyhedron:
    m, n = bt.m, bt.n
    normal = tuple(data.wall_normal) + (0,) * (m - n)
    q = data.affine_pair[1] - 1
    side = tuple(1 if i == q else 0 for i in range(m))
    return HPolyhedron(m, ((side, 0),), ((normal, 0),))


def verify_segment(
    bt: AnyMatrix,
    lam: Sequence[Number],
    depth: int = 8,
    max_sequences: int = 4000,
    family: Optional[Sequence[Sequence[int]]] = None,
) -> DominanceResult:
    """Check the predicted segment against hull pieces over a growing sequence family.

    Works at the neighboring matrix found by ``delta_general``; the lambda and
    the prediction are transported there by the mutation map. ``history`` lists
    the leftover region after each completed depth. An explicit ``family`` is a
    list of sequences at that neighboring matrix, all counted as depth 1.
    """
    bt = _as_extended(bt)
    b = bt.top
    data = delta_general(b)
    seg = affine_segment_predict(bt, lam, data)
    path = data.path
    nbt = _mutated(bt, path)
    lam1 = eta_any(bt, path, seg.p)
    q1 = eta_any(bt, path, seg.q)
    expect = add(lam1, scale(seg.a_star, matvec(nbt.rows, data.neighbor_delta)))
    if expect != q1:
        raise ConsistencyError("prediction does not transport to the neighboring matrix")
    letters = _alphabet(nbt.top)
    sal = salient_path(nbt.top)
    wall = _wall_h(nbt, data)
    acc = wall
    used: list[tuple[int, ...]] = []
    history: list[Polyhedron] = []
    count = 0
    current = 0
    region = None

    def region_now():
        return h_to_v(acc)

    if family is not None:
        groups = [(0, ())] + [(1, tuple(f)) for f in family]
    else:
        groups = _family(letters, sal, depth)
    for d, seq in groups:
        if d != current:
            region = region_now()
            history.append(region)
            if _is_predicted(region, lam1, q1):
                return _segment_result(seg, current, used, history)
            current = d
        count += 1
        if count > max_sequences:
            break
        piece = dominance_piece(nbt, lam1, seq, "hull")
        if not piece.contains(q1):
            raise ConsistencyError(f"predicted endpoint escapes the hull piece of {seq}")
        acc = acc.intersect(piece.h)
        used.append(seq)
    else:
        region = region_now()
        history.append(region)
        if _is_predicted(region, lam1, q1):
            return _segment_result(seg, current, used, history)
    leftover = region_now()
    back = tuple(reversed(path))
    if leftover is not None and back:
        out_region = map_polyhedron_exact(nbt, back, leftover)
    else:
        out_region = RegionUnion.of([leftover]) if leftover is not None else RegionUnion()
    return DominanceResult(
        "residual", vec(lam), segment=seg, region=out_region, depth=current,
        family=tuple(used), history=tuple(history),
        note="sequence budget exhausted" if count > max_sequences else "",
    )


def _is_predicted(region: Optional[Polyhedron], p: Vector, q: Vector) -> bool:
    if region is None or not region.is_bounded:
        return False
    return set(region.vertices) == {vec(p), vec(q)}


def _segment_result(seg: Segment, depth: int, family, history) -> DominanceResult:
    return DominanceResult(
        "segment", seg.p, segment=seg, depth=depth, family=tuple(family), history=tuple(history)
    )


# --------------------------------------------------------------------------
# Integral dominance
# --------------------------------------------------------------------------

def integral_dominance(bt: AnyMatrix, lam: Sequence[int]) -> list[Vector]:
    """Integer points of the dominance region reachable with integer parameters."""
    bt = _as_extended(bt)
    lam = vec(lam)
    if any(not isinstance(x, int) for x in lam):
        raise PreconditionError("lambda must be integral")
    b = bt.top
    tag = classify(b).tag
    if tag == "affine":
        data = delta_general(b)
        w = wall_coordinates(b, lam[: bt.n], data)
        if w is not None and w[0] > 0:
            return list(affine_segment_predict(bt, lam, data).integral)
    if tag == "finite":
        return [lam]
    if tag == "affine" and certify_point(bt, lam) is not None:
        return [lam]
    raise PreconditionError(
        "no segment or point certificate for this lambda; run verify to inspect the residual region"
    )


def dominance(bt: AnyMatrix, lam: Sequence[Number], depth: int = 8) -> DominanceResult:
    """Dispatch: segment verification on the wall, point certificate elsewhere."""
    bt = _as_extended(bt)
    lam = vec(lam)
    b = bt.top
    tag = classify(b).tag
    if tag == "affine":
        data = delta_general(b)
        w = wall_coordinates(b, lam[: bt.n], data)
        if w is not None and w[0] > 0:
            return verify_segment(bt, lam, depth)
    if tag == "finite":
        cert = certify_point(bt, lam) if rank(bt.rows) == bt.n else None
        return DominanceResult("point", lam, certificate=cert, note="" if cert else "finite type")
    if tag == "affine":
        cert = certify_point(bt, lam)
        if cert is not None:
            return DominanceResult("point", lam, certificate=cert)
    return DominanceResult(
        "residual", lam, region=dominance_piece(bt, lam, (), "hull"), depth=0,
        note="no theorem applies; only the empty-sequence piece is reported",
    )


# --------------------------------------------------------------------------
# Finite type
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteCheck:
    lam: Vector
    verified: bool
    mode: str
    region: Optional[Polyhedron]


@dataclass(frozen=True)
class FiniteVerification:
    verified: bool
    word: tuple[int, ...]
    period: int
    checks: tuple[FiniteCheck, ...] = field(default_factory=tuple)


def bipartite_word(b: ExchangeMatrix) -> tuple[int, ...]:
    bip = is_bipartite(b)
    if bip is None:
        raise PreconditionError("matrix is not bipartite")
    return tuple(bip[0]) + tuple(bip[1])


def bipartite_period(b: ExchangeMatrix, limit: int = 1000) -> int:
    """Least power of the bipartite word returning to the initial labeled seed."""
    w = bipartite_word(b)
    ident = identity(b.n)
    for ell in range(1, limit + 1):
        f = final_frame(b, w * ell)
        if f.b.rows == b.rows and f.g == ident:
            return ell
    raise SearchExhausted(f"bipartite word has no period up to {limit}")


def _exact_intersection(b: ExchangeMatrix, lam: Vector, seqs) -> list[Polyhedron]:
    current: Optional[list[Polyhedron]] = None
    for seq in seqs:
        union = dominance_piece(b, lam, seq, "exact")
        if current is None:
            current = list(union.pieces)
            continue
        nxt = []
        for a in current:
            for c in union.pieces:
                meet = intersect(a, c)
                if meet is not None:
                    nxt.append(meet)
        current = list(RegionUnion.of(nxt).pieces)
    return current or []


def verify_finite_bipartite(
    b: ExchangeMatrix, lam: Optional[Sequence[Number]] = None, per_cone: bool = True
) -> FiniteVerification:
    """Intersect the pieces for all powers of the bipartite word and check ``{lam}``."""
    if classify(b).tag != "finite":
        raise PreconditionError("matrix is not of finite type")
    w = bipartite_word(b)
    period = bipartite_period(b)
    seqs = [w * ell for ell in range(period)]
    if lam is not None:
        lams = [vec(lam)]
    elif per_cone:
        lams = []
        for f in enumerate_seeds(b):
            cols = f.g_columns()
            lams.append(vec(sum(c[i] for c in cols) for i in range(b.n)))
    else:
        lams = [tuple(1 for _ in range(b.n))]
    checks = []
    for x in lams:
        acc = None
        for seq in seqs:
            h = dominance_piece(b, x, seq, "hull").h
            acc = h if acc is None else acc.intersect(h)
        region = h_to_v(acc)
        if is_singleton(region) and region.vertices[0] == x:
            checks.append(FiniteCheck(x, True, "hull", region))
            continue
        pieces = _exact_intersection(b, x, seqs)
        ok = len(pieces) == 1 and is_singleton(pieces[0]) and pieces[0].vertices[0] == x
        checks.append(FiniteCheck(x, ok, "exact", pieces[0] if len(pieces) == 1 else None))
    return FiniteVerification(all(c.verified for c in checks), w, period, tuple(checks))


# --------------------------------------------------------------------------
# Folding
# --------------------------------------------------------------------------

def fixed_space_equalities(sigma: FoldingAutomorphism) -> tuple:
    n = sigma.n
    eqs = []
    for orb in sigma.orbits:
        for a, c in zip(orb, orb[1:]):
            eqs.append((tuple(1 if i == a - 1 else (-1 if i == c - 1 else 0) for i in range(n)), 0))
    return tuple(eqs)


def orbit_embed(sigma: FoldingAutomorphism, c: Sequence[Number]) -> Vector:
    """Point of the fixed space whose orbit sums are ``c``."""
    x = [Fraction(0)] * sigma.n
    for orb, val in zip(sigma.orbits, c):
        for i in orb:
            x[i - 1] = frac(val) / len(orb)
    return vec(x)


def orbit_sum_matrix(sigma: FoldingAutomorphism) -> Matrix:
    return tuple(
        tuple(1 if j + 1 in orb else 0 for j in range(sigma.n)) for orb in sigma.orbits
    )


def orbit_embed_matrix(sigma: FoldingAutomorphism) -> Matrix:
    return tuple(
        tuple(Fraction(1, len(orb)) if i + 1 in orb else Fraction(0) for orb in sigma.orbits)
        for i in range(sigma.n)
    )


@dataclass(frozen=True)
class FoldSliceCheck:
    """Both inclusions of the slice identity for one sequence, checked exactly."""

    orbit_sequence: tuple[int, ...]
    sliced: RegionUnion
    folded: RegionUnion
    slice_in_folded: bool
    folded_in_slice: bool

    @property
    def verified(self) -> bool:
        return self.slice_in_folded and self.folded_in_slice


def _end_cone(b: AnyMatrix, lam: Vector, seq: tuple[int, ...]) -> tuple[AnyMatrix, PointedPolyhedron]:
    bt = _as_extended(b)
    end = _mutated(bt, seq)
    return end, PointedPolyhedron(eta_any(bt, seq, lam), tuple(_columns(end.rows)))


def _maps_into(b: AnyMatrix, seq: tuple[int, ...], piece: Polyhedron, target: PointedPolyhedron) -> bool:
    image = map_polyhedron_exact(b, seq, piece)
    return not image.truncated and all(contained_in(q, target) for q in image.pieces)


def fold_slice_check(
    b: ExchangeMatrix, sigma: FoldingAutomorphism, c: Sequence[Number], orbit_seq: Sequence[int]
) -> FoldSliceCheck:
    """Compare the fixed-space slice of a piece of ``b`` with the piece of the folded matrix.

    Coordinates on the fixed space are orbit sums, the coordinates in which
    the folded matrix acts. Each convex part of one side is pushed forward by
    the mutation map of the other side and tested against its end cone, so
    both inclusions are exact.
    """
    orbit_seq = tuple(orbit_seq)
    orbs = sigma.orbits
    folded = fold(b, sigma)
    full_seq = tuple(i for o in orbit_seq for i in orbs[o - 1])
    c = vec(c)
    x = orbit_embed(sigma, c)
    big = dominance_piece(b, x, full_seq, "exact")
    small = dominance_piece(folded, c, orbit_seq, "exact")
    fixed = HPolyhedron(sigma.n, (), fixed_space_equalities(sigma))
    s = orbit_sum_matrix(sigma)
    sliced = []
    for p in big.pieces:
        cut = h_to_v(p.h.intersect(fixed))
        if cut is not None:
            sliced.append(cut.map_linear(s))
    sliced_union = RegionUnion.of(sliced)
    _, small_cone = _end_cone(folded, c, orbit_seq)
    _, big_cone = _end_cone(b, x, full_seq)
    emb = orbit_embed_matrix(sigma)
    forward = all(_maps_into(folded, orbit_seq, q, small_cone) for q in sliced_union.pieces)
    backward = all(_maps_into(b, full_seq, q.map_linear(emb), big_cone) for q in small.pieces)
    return FoldSliceCheck(orbit_seq, sliced_union, small, forward and not big.truncated,
                          backward and not small.truncated)
