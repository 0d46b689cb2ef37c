"""Exact rational polyhedra.

Conversions between generator and inequality descriptions use the double
description method in integer arithmetic: every ray is kept primitive, so
entries stay small at the dimensions this package works in (n <= 8).
Polyhedra that are not cones are handled by homogenizing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionMismatch
from .linalg import Number, Vector, dot, frac, nullspace, primitive, rref, sub, vec

SOFT_DIMENSION_LIMIT = 8


# --------------------------------------------------------------------------
# Cone kernel
# --------------------------------------------------------------------------

def _idot(a: Sequence[int], x: Sequence[int]) -> int:
    return sum(p * q for p, q in zip(a, x))


def _canonical_lines(lines: Iterable[Sequence[int]], dim: int) -> tuple[Vector, ...]:
    lines = [tuple(l) for l in lines if any(l)]
    if not lines:
        return ()
    m, pivots = rref(lines)
    return tuple(sorted(primitive(row) for row in m[: len(pivots)]))


def _reduce_mod_lines(x: Sequence[Number], lines: Sequence[Vector]) -> Vector:
    """Orthogonal projection of x onto the complement of span(lines)."""
    if not lines:
        return tuple(x)
    # solve Gram * c = L x
    gram = [[Fraction(dot(a, b)) for b in lines] for a in lines]
    rhs = [Fraction(dot(a, x)) for a in lines]
    aug = [row + [r] for row, r in zip(gram, rhs)]
    m, _ = rref(aug)
    coeffs = [row[-1] for row in m]
    out = [frac(v) for v in x]
    for c, l in zip(coeffs, lines):
        out = [o - c * li for o, li in zip(out, l)]
    return tuple(out)


def _canonical_rays(rays: Iterable[Sequence[Number]], lines: Sequence[Vector]) -> tuple[Vector, ...]:
    out = set()
    for r in rays:
        p = primitive(_reduce_mod_lines(r, lines))
        if any(p):
            out.add(p)
    return tuple(sorted(out))


def cone_from_inequalities(
    ineqs: Sequence[Sequence[Number]], eqs: Sequence[Sequence[Number]], dim: int
) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Extreme rays and a lineality basis of ``{x : a.x >= 0, e.x = 0}``.

    Returns canonical ``(rays, lines)``: lines are a reduced row-echelon basis,
    rays are primitive, reduced modulo the lineality space and sorted.
    """
    a_rows = [primitive(a) for a in ineqs]
    a_rows = [a for a in a_rows if any(a)]
    e_rows = [primitive(e) for e in eqs if any(e)]
    if e_rows:
        lines = [list(v) for v in nullspace(e_rows, dim)]
    else:
        lines = [[1 if i == j else 0 for i in range(dim)] for j in range(dim)]
    rays: list[list[int]] = []
    zsets: list[int] = []
    for idx, a in enumerate(a_rows):
        bit = 1 << idx
        l0 = next((l for l in lines if _idot(a, l) != 0), None)
        if l0 is not None:
            lines.remove(l0)
            s = _idot(a, l0)
            if s < 0:
                l0 = [-v for v in l0]
                s = -s
            lines = [list(primitive([s * v - _idot(a, l) * w for v, w in zip(l, l0)])) for l in lines]
            new_rays = []
            for r in rays:
                new_rays.append(list(primitive([s * v - _idot(a, r) * w for v, w in zip(r, l0)])))
            rays = new_rays
            zsets = [z | bit for z in zsets]
            # l0 is tight on every earlier row because lines were orthogonal to them
            rays.append(l0)
            zsets.append((1 << idx) - 1)
            continue
        vals = [_idot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        new_rays = [rays[i] for i in pos] + [rays[i] for i in zero]
        new_z = [zsets[i] for i in pos] + [zsets[i] | bit for i in zero]
        for p in pos:
            for q in neg:
                common = zsets[p] & zsets[q]
                adjacent = True
                for r in range(len(rays)):
                    if r != p and r != q and (zsets[r] & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], vals[q]
                comb = primitive([vp * x - vq * y for x, y in zip(rays[q], rays[p])])
                new_rays.append(list(comb))
                new_z.append(common | bit)
        rays, zsets = new_rays, new_z
    lines_c = _canonical_lines(lines, dim)
    return _canonical_rays(rays, lines_c), lines_c


def cone_to_inequalities(
    rays: Sequence[Sequence[Number]], lines: Sequence[Sequence[Number]], dim: int
) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Facet normals and equality normals of ``cone(rays) + span(lines)``."""
    dual_rays, dual_lines = cone_from_inequalities(
        [primitive(r) for r in rays], [primitive(l) for l in lines], dim
    )
    return dual_rays, dual_lines


# --------------------------------------------------------------------------
# Value types
# --------------------------------------------------------------------------

def _norm_gen(g: Sequence[Number]) -> Vector:
    return primitive(g)


@dataclass(frozen=True)
class HPolyhedron:
    """``{x : normal.x >= offset}`` for each inequality and ``normal.x = offset`` for each equality."""

    dim: int
    inequalities: tuple[tuple[Vector, Number], ...] = ()
    equalities: tuple[tuple[Vector, Number], ...] = ()

    def __post_init__(self):
        def norm(pairs, is_eq):
            out = set()
            for normal, off in pairs:
                if len(normal) != self.dim:
                    raise DimensionMismatch("constraint of wrong length")
                fn = [frac(v) for v in normal] + [-frac(off)]
                p = primitive(fn)
                if not any(p[:-1]):
                    if (is_eq and p[-1] != 0) or (not is_eq and p[-1] < 0):
                        out.add((p[:-1], -p[-1]))  # infeasible constraint, kept
                    continue
                if is_eq:
                    first = next(v for v in p if v)
                    if first < 0:
                        p = tuple(-v for v in p)
                out.add((p[:-1], -p[-1]))
            return tuple(sorted(out))

        object.__setattr__(self, "inequalities", norm(self.inequalities, False))
        object.__setattr__(self, "equalities", norm(self.equalities, True))

    def contains(self, x: Sequence[Number]) -> bool:
        return all(dot(a, x) >= b for a, b in self.inequalities) and all(
            dot(a, x) == b for a, b in self.equalities
        )

    def recession_contains(self, d: Sequence[Number]) -> bool:
        return all(dot(a, d) >= 0 for a, _ in self.inequalities) and all(
            dot(a, d) == 0 for a, _ in self.equalities
        )

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if other.dim != self.dim:
            raise DimensionMismatch("ambient dimensions differ")
        return HPolyhedron(
            self.dim, self.inequalities + other.inequalities, self.equalities + other.equalities
        )

    def to_json(self) -> dict:
        return {
            "ineqs": [{"normal": list(a), "offset": _num_json(b)} for a, b in self.inequalities],
            "eqs": [{"normal": list(a), "offset": _num_json(b)} for a, b in self.equalities],
        }


@dataclass(frozen=True)
class Polyhedron:
    """General polyhedron ``conv(vertices) + cone(rays) + span(lines)``, nonempty."""

    dim: int
    vertices: tuple[Vector, ...]
    rays: tuple[Vector, ...] = ()
    lines: tuple[Vector, ...] = ()

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("a Polyhedron needs at least one vertex; use None for empty")
        for v in self.vertices + self.rays + self.lines:
            if len(v) != self.dim:
                raise DimensionMismatch("generator of wrong length")
        object.__setattr__(self, "vertices", tuple(sorted(set(vec(v) for v in self.vertices))))
        object.__setattr__(self, "rays", tuple(sorted(set(_norm_gen(r) for r in self.rays if any(r)))))
        object.__setattr__(self, "lines", tuple(sorted(set(_norm_gen(l) for l in self.lines if any(l)))))

    @cached_property
    def h(self) -> HPolyhedron:
        return _v_to_h(self.dim, self.vertices, self.rays, self.lines)

    def contains(self, x: Sequence[Number]) -> bool:
        return self.h.contains(x)

    def canonical(self) -> "Polyhedron":
        out = h_to_v(self.h)
        assert out is not None
        return out

    def map_linear(self, m: Sequence[Sequence[Number]]) -> "Polyhedron":
        from .linalg import matvec

        return Polyhedron(
            len(m),
            tuple(matvec(m, v) for v in self.vertices),
            tuple(matvec(m, r) for r in self.rays),
            tuple(matvec(m, l) for l in self.lines),
        )

    @property
    def is_pointed(self) -> bool:
        return len(self.vertices) == 1

    @property
    def is_bounded(self) -> bool:
        return not self.rays and not self.lines

    def to_json(self) -> dict:
        return {
            "vertices": [[_num_json(x) for x in v] for v in self.vertices],
            "rays": [list(r) for r in self.rays],
            "lines": [list(l) for l in self.lines],
        }


@dataclass(frozen=True)
class PointedPolyhedron:
    """``apex + cone(generators)``: a translated finitely generated cone."""

    apex: Vector
    generators: tuple[Vector, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "apex", vec(self.apex))
        gens = set()
        for g in self.generators:
            if len(g) != len(self.apex):
                raise DimensionMismatch("generator and apex lengths differ")
            p = _norm_gen(g)
            if any(p):
                gens.add(p)
        object.__setattr__(self, "generators", tuple(sorted(gens)))

    @property
    def dim(self) -> int:
        return len(self.apex)

    @cached_property
    def cone_h(self) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
        return cone_to_inequalities(self.generators, (), self.dim)

    @cached_property
    def h(self) -> HPolyhedron:
        ineqs, eqs = self.cone_h
        return HPolyhedron(
            self.dim,
            tuple((a, dot(a, self.apex)) for a in ineqs),
            tuple((e, dot(e, self.apex)) for e in eqs),
        )

    def contains(self, x: Sequence[Number]) -> bool:
        return self.h.contains(x)

    def cone_contains(self, d: Sequence[Number]) -> bool:
        return self.h.recession_contains(d)

    def as_polyhedron(self) -> Polyhedron:
        return Polyhedron(self.dim, (self.apex,), self.generators)

    def reduced(self) -> "PointedPolyhedron":
        """Same set with only extreme rays and a symmetric lineality basis."""
        ineqs, eqs = self.cone_h
        rays, lines = cone_from_inequalities(ineqs, eqs, self.dim)
        gens = list(rays) + list(lines) + [tuple(-v for v in l) for l in lines]
        return PointedPolyhedron(self.apex, tuple(gens))

    def to_json(self) -> dict:
        return {"apex": [_num_json(x) for x in self.apex], "generators": [list(g) for g in self.generators]}


def _num_json(x: Number):
    x = frac(x)
    return int(x) if x.denominator == 1 else str(x)


# --------------------------------------------------------------------------
# Conversions
# --------------------------------------------------------------------------

def _v_to_h(dim: int, vertices, rays, lines) -> HPolyhedron:
    if dim > SOFT_DIMENSION_LIMIT:
        warnings.warn(f"dimension {dim} exceeds the soft limit {SOFT_DIMENSION_LIMIT}", stacklevel=3)
    hom_rays = [tuple(frac(x) for x in v) + (Fraction(1),) for v in vertices]
    hom_rays += [tuple(r) + (0,) for r in rays]
    hom_lines = [tuple(l) + (0,) for l in lines]
    ineqs, eqs = cone_to_inequalities(hom_rays, hom_lines, dim + 1)
    out_i = []
    for a in ineqs:
        normal, t = a[:-1], a[-1]
        if not any(normal):
            continue  # the homogenizing facet t >= 0
        out_i.append((normal, Fraction(-t)))
    out_e = [(e[:-1], Fraction(-e[-1])) for e in eqs]
    return HPolyhedron(dim, tuple(out_i), tuple(out_e))


def h_to_v(h: HPolyhedron) -> Polyhedron | None:
    """Vertices, extreme rays and lineality of an H-polyhedron, or ``None`` when empty."""
    dim = h.dim
    if dim > SOFT_DIMENSION_LIMIT:
        warnings.warn(f"dimension {dim} exceeds the soft limit {SOFT_DIMENSION_LIMIT}", stacklevel=2)
    ineqs = [tuple(frac(x) for x in a) + (-frac(b),) for a, b in h.inequalities]
    ineqs.append(tuple([0] * dim) + (1,))
    eqs = [tuple(frac(x) for x in a) + (-frac(b),) for a, b in h.equalities]
    rays, lines = cone_from_inequalities(ineqs, eqs, dim + 1)
    verts, recs = [], []
    for r in rays:
        if r[-1] > 0:
            verts.append(tuple(Fraction(x, r[-1]) for x in r[:-1]))
        else:
            recs.append(r[:-1])
    if not verts:
        return None
    return Polyhedron(dim, tuple(verts), tuple(recs), tuple(l[:-1] for l in lines))


def dual_description(p: PointedPolyhedron | Polyhedron) -> HPolyhedron:
    return p.h


def from_dual_description(h: HPolyhedron) -> Polyhedron | None:
    return h_to_v(h)


def _as_h(p) -> HPolyhedron:
    return p if isinstance(p, HPolyhedron) else p.h


def intersect(*parts: PointedPolyhedron | Polyhedron | HPolyhedron) -> Polyhedron | None:
    """Exact intersection; ``None`` marks the empty set.

    The result's ``lines`` field is the explicit marker of a non-pointed region.
    """
    hs = [_as_h(p) for p in parts]
    dims = {h.dim for h in hs}
    if len(dims) != 1:
        raise DimensionMismatch("ambient dimensions differ")
    acc = hs[0]
    for h in hs[1:]:
        acc = acc.intersect(h)
    return h_to_v(acc)


def contains_line(generators: Sequence[Sequence[Number]], dim: int | None = None) -> bool:
    """True when ``cone(generators)`` contains a line."""
    gens = [g for g in generators if any(g)]
    if not gens:
        return False
    dim = dim if dim is not None else len(gens[0])
    ineqs, eqs = cone_to_inequalities(gens, (), dim)
    _, lines = cone_from_inequalities(ineqs, eqs, dim)
    return bool(lines)


def is_singleton(p: Polyhedron | PointedPolyhedron | None) -> bool:
    if p is None:
        return False
    if isinstance(p, PointedPolyhedron):
        p = p.as_polyhedron().canonical()
    return len(p.vertices) == 1 and p.is_bounded


def as_segment(p: Polyhedron | PointedPolyhedron | None) -> tuple[Vector, Vector] | None:
    """Endpoints of a bounded one-dimensional region; ``None`` otherwise."""
    if p is None:
        return None
    if isinstance(p, PointedPolyhedron):
        p = p.as_polyhedron().canonical()
    if not p.is_bounded or len(p.vertices) != 2:
        return None
    return p.vertices[0], p.vertices[1]


def contained_in(inner: Polyhedron | PointedPolyhedron, outer: Polyhedron | PointedPolyhedron | HPolyhedron) -> bool:
    """Exact containment test using generators of ``inner`` against inequalities of ``outer``."""
    h = _as_h(outer)
    if isinstance(inner, PointedPolyhedron):
        return h.contains(inner.apex) and all(h.recession_contains(g) for g in inner.generators)
    return (
        all(h.contains(v) for v in inner.vertices)
        and all(h.recession_contains(r) for r in inner.rays)
        and all(h.recession_contains(l) and h.recession_contains(tuple(-x for x in l)) for l in inner.lines)
    )


def same_set(a, b) -> bool:
    return contained_in(a, b) and contained_in(b, a)


def lattice_points_on_segment(
    p: Sequence[Number], q: Sequence[Number], step: Sequence[Number]
) -> list[Vector]:
    """Points ``p + a*step`` with ``a`` a nonnegative integer, lying on the segment ``[p, q]``."""
    d = sub(q, p)
    if not any(step):
        raise DimensionMismatch("step must be nonzero")
    i = next(j for j, s in enumerate(step) if s != 0)
    amax = frac(d[i]) / frac(step[i])
    if amax < 0 or any(frac(d[j]) != amax * frac(step[j]) for j in range(len(d))):
        raise DimensionMismatch("q - p is not a nonnegative multiple of step")
    count = int(amax // 1)
    return [vec(frac(pj) + a * frac(sj) for pj, sj in zip(p, step)) for a in range(count + 1)]


@dataclass(frozen=True)
class RegionUnion:
    """Finite union of polyhedra with pieces contained in other pieces removed."""

    pieces: tuple[Polyhedron, ...] = field(default_factory=tuple)
    truncated: bool = False

    @staticmethod
    def of(pieces: Iterable[Polyhedron], truncated: bool = False) -> "RegionUnion":
        kept: list[Polyhedron] = []
        for p in sorted(set(pieces), key=lambda x: (-len(x.rays) - 2 * len(x.lines), x.vertices, x.rays)):
            if any(contained_in(p, k) for k in kept):
                continue
            kept = [k for k in kept if not contained_in(k, p)]
            kept.append(p)
        return RegionUnion(tuple(kept), truncated)

    def contains(self, x: Sequence[Number]) -> bool:
        return any(p.contains(x) for p in self.pieces)

    def to_json(self) -> dict:
        return {"pieces": [p.to_json() for p in self.pieces], "truncated": self.truncated}
