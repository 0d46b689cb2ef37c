"""Acceptance suite: one test per criterion, exact rational equality throughout.

Each test records a PASS/FAIL line (with its runtime against the budget);
the lines are printed in the terminal summary by ``conftest.py``. Run with
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import functools
import random
import sys
import time
from fractions import Fraction

from clusterdom.affine import (
    TABLE1,
    affine_pairs,
    comp_c,
    delta_general,
    imaginary_ray,
    neighboring_structure,
)
from clusterdom.dominance import (
    _exact_intersection,
    affine_segment_predict,
    certify_point,
    dominance_piece,
    fold_slice_check,
    integral_dominance,
    orbit_embed,
    verify_finite_bipartite,
    verify_segment,
)
from clusterdom.exchange import (
    ExchangeMatrix,
    ExtendedExchangeMatrix,
    FoldingAutomorphism,
    block_decompose,
    classify,
    dynkin_name,
    ef_matrices,
    fold,
    is_acyclic,
    mutate,
    mutate_array,
    mutate_extended_sequence,
    mutate_sequence,
    mutation_class,
)
from clusterdom.frames import enumerate_seeds, final_frame, is_maximal_red
from clusterdom.linalg import identity, matmul, transpose
from clusterdom.mutation_maps import eta, eta_extended
from clusterdom.polyhedra import PointedPolyhedron, contained_in, intersect, is_singleton

import conftest
from conftest import A2, A2_AFFINE_TABLE, A3_BIPARTITE, KRONECKER, RANK4_NEIGHBORING, random_matrix
from oracles import c_matrix, g_matrix, m, mutate_textbook

M = ExchangeMatrix.of
P = ExtendedExchangeMatrix.principal


def criterion(number: int, title: str, budget: float):
    """Record PASS/FAIL and runtime; a run over budget fails."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            start = time.perf_counter()
            try:
                fn()
                elapsed = time.perf_counter() - start
                assert elapsed < budget, f"took {elapsed:.1f} s, budget {budget:.0f} s"
            except BaseException as exc:
                elapsed = time.perf_counter() - start
                reason = (str(exc).splitlines() or [type(exc).__name__])[0][:120]
                conftest.ACCEPTANCE[number] = (False, title, elapsed, budget, reason)
                raise
            conftest.ACCEPTANCE[number] = (True, title, elapsed, budget, "")

        return wrapper

    return deco


# 1 -------------------------------------------------------------------------------

def _sign_coherent(vectors):
    return all(all(x >= 0 for x in v) or all(x <= 0 for x in v) for v in vectors)


@criterion(1, "algebraic identities on 1000 random matrices", 30)
def test_criterion_1_algebraic_identities():
    rng = random.Random(1)
    for _ in range(1000):
        b = random_matrix(rng, max_n=5)
        seq = tuple(rng.randint(1, b.n) for _ in range(rng.randint(0, 10)))
        d = [[b.symmetrizer[i] if i == j else 0 for j in range(b.n)] for i in range(b.n)]
        for k in range(1, b.n + 1):
            once = mutate(b, k)
            assert once.rows == mutate_textbook(b.rows, k - 1)
            assert mutate(once, k) == b
            for eps in (1, -1):
                e, f = ef_matrices(b, k, eps)
                assert matmul(matmul(e, b.rows), f) == once.rows
                assert matmul(transpose(e), d) == matmul(d, f)
        c = c_matrix(b.rows, seq)
        g = g_matrix(b.rows, seq)
        dual = tuple(tuple(-x for x in r) for r in transpose(b.rows))
        assert matmul(g, transpose(c_matrix(dual, seq))) == identity(b.n)
        end = mutate_sequence(b, seq)
        assert matmul(g, end.rows) == matmul(b.rows, c)
        assert _sign_coherent(transpose(c)) and _sign_coherent(g)
        frame = final_frame(b, seq)
        assert frame.c == c and frame.g == g


# 2 -------------------------------------------------------------------------------

A2_SPECIAL_CHAIN = [
    ((0, 1, -1), (-1, 0, 2), (1, -2, 0)),
    ((0, -1, 1), (1, 0, 1), (-1, -1, 0)),
    ((0, -1, -1), (1, 0, -1), (1, 1, 0)),
    ((0, 1, 1), (-1, 0, -1), (-1, 1, 0)),
    ((0, -1, 1), (1, 0, 1), (-1, -1, 0)),
    ((0, 1, -1), (-1, 0, 2), (1, -2, 0)),
]
C2_SPECIAL_CHAIN = [
    ((0, 2, -2), (-1, 0, 2), (1, -2, 0)),
    ((0, -2, 2), (1, 0, 0), (-1, 0, 0)),
    ((0, -2, -2), (1, 0, 0), (1, 0, 0)),
    ((0, 2, 2), (-1, 0, 0), (-1, 0, 0)),
    ((0, -2, 2), (1, 0, 0), (-1, 0, 0)),
    ((0, 2, -2), (-1, 0, 2), (1, -2, 0)),
]
G2_CHAIN = [
    ((0, 3, -3), (-1, 0, 2), (1, -2, 0)),
    ((0, -3, 3), (1, 0, -1), (-1, 1, 0)),
    ((0, 0, -3), (0, 0, 1), (1, -1, 0)),
    ((0, 0, 3), (0, 0, 1), (-1, -1, 0)),
    ((0, 0, -3), (0, 0, -1), (1, 1, 0)),
    ((0, 0, -3), (0, 0, 1), (1, -1, 0)),
    ((0, -3, 3), (1, 0, -1), (-1, 1, 0)),
    ((0, 3, -3), (-1, 0, 2), (1, -2, 0)),
]
# local labels: 1 = special k, 2 = p (the index n-1), 3 = n
FIVE_STEP = (1, 3, 1, 2, 1)
SEVEN_STEP = (1, 3, 1, 3, 2, 3, 1)


def _replay(start, word):
    out = [start]
    cur = M(start)
    for k in word:
        cur = mutate(cur, k)
        out.append(cur.rows)
    return out


def _a2_block_chain(ij, ik, in_, kj, nj):
    return [
        [[ij, ik, -in_, in_], [kj, 0, 1, -1], [-nj, -1, 0, 2], [nj, 1, -2, 0]],
        [[ij + m(ik, kj), -ik, -in_ + m(ik, 1), in_ + m(ik, -1)], [-kj, 0, -1, 1],
         [-nj + m(kj, -1), 1, 0, 1], [nj + m(kj, 1), -1, -1, 0]],
        [[ij + m(ik, kj), in_ - m(ik, 1), ik, -in_ - m(ik, -1)], [nj - m(kj, -1), 0, -1, -1],
         [kj, 1, 0, -1], [-nj - m(kj, 1), 1, 1, 0]],
        [[ij + m(ik, kj), -in_ + m(ik, 1), in_ + m(ik, -1), -ik], [-nj + m(kj, -1), 0, 1, 1],
         [nj + m(kj, 1), -1, 0, -1], [-kj, -1, 1, 0]],
        [[ij + m(ik, kj), ik, -in_ - m(ik, -1), in_ - m(ik, 1)], [kj, 0, -1, 1],
         [-nj - m(kj, 1), 1, 0, 1], [nj - m(kj, -1), -1, -1, 0]],
        [[ij + 2 * m(ik, kj), -ik, -in_, in_], [-kj, 0, 1, -1], [-nj, -1, 0, 2], [nj, 1, -2, 0]],
    ]


def _c2_block_chain(ij, ik, in_, kj, nj):
    return [
        [[ij, ik, -in_, in_], [kj, 0, 2, -2], [-nj, -1, 0, 2], [nj, 1, -2, 0]],
        [[ij + m(ik, kj), -ik, -in_ + m(ik, 2), in_ + m(ik, -2)], [-kj, 0, -2, 2],
         [-nj + m(kj, -1), 1, 0, 0], [nj + m(kj, 1), -1, 0, 0]],
        [[ij + m(ik, kj), in_ - abs(ik), -in_ + m(ik, 2), -in_ - m(ik, -2)], [2 * nj + abs(kj), 0, -2, -2],
         [-nj + m(kj, -1), 1, 0, 0], [-nj - m(kj, 1), 1, 0, 0]],
        # row k is the negation of the previous row k: -2 b_nj - |b_kj|
        [[ij + m(ik, kj), -in_ + abs(ik), in_ + m(ik, -2), in_ - m(ik, 2)], [-2 * nj - abs(kj), 0, 2, 2],
         [nj + m(kj, 1), -1, 0, 0], [nj - m(kj, -1), -1, 0, 0]],
        [[ij + m(ik, kj), ik, -in_ - m(ik, -2), in_ - m(ik, 2)], [kj, 0, -2, 2],
         [-nj - m(kj, 1), 1, 0, 0], [nj - m(kj, -1), -1, 0, 0]],
        [[ij + 2 * m(ik, kj), -ik, -in_, in_], [-kj, 0, 2, -2], [-nj, -1, 0, 2], [nj, 1, -2, 0]],
    ]


# (b_ij, b_ik, b_in, b_kj, b_nj) with b_nj >= 0 and b_in <= 0
GENERIC_PARAMETERS = [(1, 2, -1, -3, 2), (0, -1, 0, 1, 0), (-2, -3, -2, 2, 1)]


def _replay_array(start, word):
    out = [tuple(tuple(r) for r in start)]
    cur = out[0]
    for k in word:
        cur = mutate_array(cur, k)
        out.append(cur)
    return out


def _as_rows(stages):
    return [tuple(tuple(r) for r in s) for s in stages]


NEIGH_CASES = [
    # affine submatrix, generic chain after p then after n, fixed ray
    ((2, -2), lambda rp, rn: [[[0, -2, -rp], [2, 0, rn + m(rp, -2)]],
                              [[0, 2, -rp + m(rn + m(rp, -2), -2)], [-2, 0, -rn - m(rp, -2)]]], (-1, 1)),
    ((4, -1), lambda rp, rn: [[[0, -4, -rp], [1, 0, rn + m(rp, -1)]],
                              [[0, 4, -rp + m(rn + m(rp, -1), -4)], [-1, 0, -rn - m(rp, -1)]]], (-2, 1)),
    ((1, -4), lambda rp, rn: [[[0, -1, -rp], [4, 0, rn + m(rp, -4)]],
                              [[0, 1, -rp + m(rn + m(rp, -4), -1)], [-4, 0, -rn - m(rp, -4)]]], (-1, 2)),
]


def _g2_column(c1, c2):
    a = abs(c1)
    return [
        (c1, c2, -c2),
        (-c1, c2 + m(c1, -1), -c2 + m(c1, 1)),
        (-3 * c2 + a + m(c1, 1), c2 + m(c1, -1), c2 - m(c1, 1)),
        (3 * c2 - a - m(c1, 1), c2 + m(c1, -1), -2 * c2 + a),
        (-3 * c2 + 2 * a - m(c1, 1), -c2 + m(c1, 1), 2 * c2 - a),
        (-3 * c2 + 2 * a - m(c1, 1), c2 - m(c1, 1), c2 + m(c1, -1)),
        (c1, c2 - m(c1, 1), -c2 - m(c1, -1)),
        (-c1, c2, -c2),
    ]


@criterion(2, "replay of the special-index mutation chains and ray fixed points", 5)
def test_criterion_2_chain_replay():
    assert _replay(A2_SPECIAL_CHAIN[0], FIVE_STEP) == A2_SPECIAL_CHAIN
    assert _replay(C2_SPECIAL_CHAIN[0], FIVE_STEP) == C2_SPECIAL_CHAIN
    assert _replay(G2_CHAIN[0], SEVEN_STEP) == G2_CHAIN
    # 4x4 blocks: rows (i, k, n-1, n), columns (j, k, n-1, n); k, n-1, n sit at 0-based 1, 2, 3
    word = (1, 3, 1, 2, 1)
    for params in GENERIC_PARAMETERS:
        for generic in (_a2_block_chain, _c2_block_chain):
            stages = _as_rows(generic(*params))
            assert _replay_array(stages[0], word) == stages, (generic.__name__, params)
    # the sign of |b_kj| in that entry matters: b_kj = -1, b_nj = 0 gives -1, not 1
    assert _replay_array(_as_rows(_c2_block_chain(1, 2, 0, -1, 0))[0], word)[3][1][0] == -1
    # ray fixed points: generic chains, then the fixed rays through eta
    for (bpn, bnp), generic, ray in NEIGH_CASES:
        for rp, rn in [(-1, 1), (2, -3), (0, 5), (-4, 0), ray]:
            start = ((0, bpn, rp), (bnp, 0, rn))
            got = _replay_array(start, (0, 1))
            assert got[1:] == _as_rows(generic(rp, rn)), ((bpn, bnp), rp, rn)
        b = M(((0, bpn), (bnp, 0)))
        assert eta(b, (1, 2), ray)[0] == ray
        assert delta_general(b).ray == ray
    # G2 with an extra column (c1, c2, -c2), c2 <= 0
    g2 = [list(r) for r in G2_CHAIN[0]]
    for c1, c2 in [(2, -1), (-3, -2), (0, -1), (1, 0)]:
        start = tuple(tuple(r) + (c,) for r, c in zip(g2, (c1, c2, -c2)))
        stages = _replay_array(start, tuple(k - 1 for k in SEVEN_STEP))
        assert [tuple(r[-1] for r in s) for s in stages] == _g2_column(c1, c2), (c1, c2)
        assert [tuple(r[:3] for r in s) for s in stages] == G2_CHAIN
    assert eta(M(G2_CHAIN[0]), SEVEN_STEP, (0, -1, 1))[0] == (0, -1, 1)


# 3 -------------------------------------------------------------------------------

C2_FOLDED = ((0, -2), (1, 0))
A3_SIGMA = FoldingAutomorphism.from_cycles(3, [(1, 3)])


@criterion(3, "finite-type dominance: A2, A3 and folded C2", 300)
def test_criterion_3_finite_type():
    a2 = verify_finite_bipartite(M(A2))
    assert a2.verified and len(a2.checks) == 5
    a3 = verify_finite_bipartite(M(A3_BIPARTITE))
    assert a3.verified and len(a3.checks) == 14
    # folded C2: the slice of each A3 piece equals the C2 piece, and the A3
    # region at the embedded point is a single point, so the C2 region is too
    c2 = M(C2_FOLDED)
    assert fold(M(A3_BIPARTITE), A3_SIGMA) == c2
    direct = verify_finite_bipartite(c2)
    assert direct.verified and len(direct.checks) == 6
    word = direct.word
    for check in direct.checks:
        c = check.lam
        for ell in range(direct.period):
            fs = fold_slice_check(M(A3_BIPARTITE), A3_SIGMA, c, word * ell)
            assert fs.verified, (c, ell)
        assert verify_finite_bipartite(M(A3_BIPARTITE), orbit_embed(A3_SIGMA, c)).verified


# 4 -------------------------------------------------------------------------------

@criterion(4, "affine rank 2: segments and every other integer point", 60)
def test_criterion_4_affine_rank_two():
    k = M(KRONECKER)
    expected = {
        (-2, 2): [(-2, 2), (0, 0)],
        (-3, 3): [(-3, 3), (-1, 1)],
        (-1, 1): [(-1, 1)],
    }
    for lam, integral in expected.items():
        out = verify_segment(k, lam, depth=8)
        assert out.verified and out.depth <= 8
        assert (out.segment.p, out.segment.q) == (lam, (0, 0))
        assert out.region is None
        assert integral_dominance(k, lam) == integral


# 5 -------------------------------------------------------------------------------

@criterion(5, "affine rank 3: predicted segment for the table matrix", 600)
def test_criterion_5_affine_rank_three():
    b = M(A2_AFFINE_TABLE)
    lam = (1, -2, 2)
    seg = affine_segment_predict(b, lam)
    assert (seg.p, seg.q) == ((1, -2, 2), (1, 0, 0))
    out = verify_segment(b, lam, depth=12)
    # containment half: both endpoints lie in every exact piece that was used
    for seq in out.family:
        piece = dominance_piece(b, lam, seq, "exact")
        assert piece.contains(seg.p) and piece.contains(seg.q)
    if out.verified:
        assert out.depth <= 12
    else:
        hist = [h for h in out.history if h is not None]
        for before, after in zip(hist, hist[1:]):
            assert contained_in(after, before) and not contained_in(before, after)
    assert out.verified


# 6 -------------------------------------------------------------------------------

DELTA_TABLE = {(2, -2): (1, 1), (4, -1): (2, 1), (1, -4): (1, 2)}
RAY_TABLE = {(2, -2): (-1, 1), (4, -1): (-2, 1), (1, -4): (-1, 2)}
ACYCLIC_A2_1 = ((0, 1, 1), (-1, 0, 1), (-1, -1, 0))


def _census(rows):
    members = neighboring = 0
    for r in mutation_class(M(rows)):
        members += 1
        b = M(r)
        pairs = affine_pairs(b)
        if not pairs:
            continue
        neighboring += 1
        s = neighboring_structure(b)
        p, q = s.affine_pair
        assert mutate_sequence(b, (p, q)) == b and mutate_sequence(b, (q, p)) == b
        d = delta_general(b)
        key = (r[p - 1][q - 1], r[q - 1][p - 1])
        assert (d.delta[p - 1], d.delta[q - 1]) == DELTA_TABLE[key]
        assert all(x == 0 for i, x in enumerate(d.delta) if i + 1 not in (p, q))
        ray = imaginary_ray(b, d.delta)
        assert (ray[p - 1], ray[q - 1]) == RAY_TABLE[key]
        assert all(x == 0 for i, x in enumerate(ray) if i + 1 not in (p, q))
        comp = comp_c(b, s)
        for block in block_decompose(comp):
            sub = M(tuple(tuple(comp.rows[i - 1][j - 1] for j in block) for i in block))
            assert classify(sub).tag == "finite"
            name = dynkin_name(sub)
            assert name == "A1" or name.startswith("C"), name
    return members, neighboring


@criterion(6, "neighboring census of three affine classes", 120)
def test_criterion_6_neighboring_census():
    seeds = [ACYCLIC_A2_1, TABLE1["C2_1"], RANK4_NEIGHBORING]
    acyclic = [classify(M(rows)).acyclic for rows in seeds]
    assert acyclic[0] == M(ACYCLIC_A2_1)
    assert all(is_acyclic(b) and classify(b).tag == "affine" for b in acyclic)
    assert [_census(b.rows) for b in acyclic] == [(12, 6), (6, 2), (120, 48)]


# 7 -------------------------------------------------------------------------------

AFFINE_SEEDS = [KRONECKER, ((0, 4), (-1, 0)), RANK4_NEIGHBORING] + list(TABLE1.values())


@criterion(7, "imaginary ray transported along 200 random paths", 60)
def test_criterion_7_transport():
    rng = random.Random(7)
    classes = [sorted(mutation_class(M(rows))) for rows in AFFINE_SEEDS]
    for _ in range(200):
        cls = rng.choice(classes)
        b = M(rng.choice(cls))
        seq = tuple(rng.randint(1, b.n) for _ in range(rng.randint(0, 8)))
        end = mutate_sequence(b, seq)
        d0, d1 = delta_general(b).delta, delta_general(end).delta
        assert eta(b, seq, imaginary_ray(b, d0))[0] == imaginary_ray(end, d1)
        extra = [[rng.randint(-2, 2) for _ in range(b.n)] for _ in range(rng.randint(1, 3))]
        bt = ExtendedExchangeMatrix.of(list(b.rows) + extra)
        bt_end = mutate_extended_sequence(bt, seq)
        before = tuple(Fraction(-sum(x * y for x, y in zip(row, d0)), 2) for row in bt.rows)
        after = tuple(Fraction(-sum(x * y for x, y in zip(row, d1)), 2) for row in bt_end.rows)
        assert eta_extended(bt, seq, before) == after


# 8 -------------------------------------------------------------------------------

def _revalidate(bt, lam, cert):
    seq = cert.seed_path + cert.red_sequence
    end = mutate_extended_sequence(bt, seq)
    assert end.rows == cert.end_matrix
    assert eta_extended(bt, seq, lam) == cert.end_lambda
    seed = mutate_sequence(bt.top, cert.seed_path)
    assert is_maximal_red(seed, cert.red_sequence)
    cols = [tuple(r[j] for r in end.rows) for j in range(bt.n)]
    up = PointedPolyhedron(cert.end_lambda, tuple(cols))
    down = PointedPolyhedron(cert.end_lambda, tuple(tuple(-x for x in c) for c in cols))
    meet = intersect(up, down)
    assert is_singleton(meet) and meet.vertices == (cert.end_lambda,)
    # independently at the original matrix: the two exact pieces meet only in lam
    pieces = _exact_intersection(bt, lam, [cert.seed_path, seq])
    assert len(pieces) == 1 and is_singleton(pieces[0]) and pieces[0].vertices == (tuple(lam),)


@criterion(8, "point certificates for principal A2 and Kronecker", 60)
def test_criterion_8_point_certificates():
    rng = random.Random(8)
    a2 = P(M(A2))
    seeds = enumerate_seeds(M(A2))
    lams = []
    for f in seeds:
        cols = f.g_columns()
        for _ in range(2):
            w = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in cols]
            top = tuple(sum(wi * c[i] for wi, c in zip(w, cols)) for i in range(2))
            lams.append(top + tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(2)))
    assert len(lams) == 10
    for lam in lams:
        cert = certify_point(a2, lam)
        assert cert is not None, lam
        _revalidate(a2, lam, cert)
    kron = P(M(KRONECKER))
    tops = [(1, 3), (-3, 2), (Fraction(2, 3), -5), (-1, -1), (3, Fraction(-1, 2))]
    for top in tops:
        lam = top + (Fraction(rng.randint(-6, 6), 2), rng.randint(-3, 3))
        cert = certify_point(kron, lam)
        assert cert is not None, lam
        _revalidate(kron, lam, cert)


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
