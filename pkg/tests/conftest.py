"""Shared generators for random exchange matrices and sequences."""

from __future__ import annotations

import random
from math import gcd

import hypothesis.strategies as st
import pytest

from clusterdom.exchange import ExchangeMatrix, ExtendedExchangeMatrix

KRONECKER = ((0, 2), (-2, 0))
A2 = ((0, 1), (-1, 0))
A3_BIPARTITE = ((0, -1, 0), (1, 0, 1), (0, -1, 0))
A2_AFFINE_TABLE = ((0, 1, -1), (-1, 0, 2), (1, -2, 0))
RANK4_NEIGHBORING = ((0, 1, 0, 0), (-1, 0, 1, -1), (0, -1, 0, 2), (0, 1, -2, 0))


def skew_symmetrizable(d, couplings) -> ExchangeMatrix:
    """``b_ij = c d_j / g``, ``b_ji = -c d_i / g`` with ``g = gcd(d_i, d_j)``."""
    n = len(d)
    rows = [[0] * n for _ in range(n)]
    it = iter(couplings)
    for i in range(n):
        for j in range(i + 1, n):
            c = next(it)
            g = gcd(d[i], d[j])
            rows[i][j] = c * d[j] // g
            rows[j][i] = -c * d[i] // g
    return ExchangeMatrix.of(rows)


@st.composite
def exchange_matrices(draw, max_n: int = 5, max_c: int = 2, max_d: int = 3, min_n: int = 1):
    n = draw(st.integers(min_n, max_n))
    d = draw(st.lists(st.integers(1, max_d), min_size=n, max_size=n))
    cs = draw(st.lists(st.integers(-max_c, max_c), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    return skew_symmetrizable(d, cs)


@st.composite
def matrices_with_sequences(draw, max_n: int = 5, max_len: int = 10, **kw):
    b = draw(exchange_matrices(max_n=max_n, **kw))
    seq = draw(st.lists(st.integers(1, b.n), max_size=max_len))
    return b, tuple(seq)


@st.composite
def extended_matrices(draw, max_n: int = 4, max_extra: int = 2, max_c: int = 2):
    b = draw(exchange_matrices(max_n=max_n, max_c=max_c))
    extra = draw(st.integers(0, max_extra))
    bottom = [draw(st.lists(st.integers(-2, 2), min_size=b.n, max_size=b.n)) for _ in range(extra)]
    return ExtendedExchangeMatrix.of(list(b.rows) + bottom)


def random_matrix(rng: random.Random, max_n: int = 5, max_c: int = 2, max_d: int = 3) -> ExchangeMatrix:
    n = rng.randint(1, max_n)
    d = [rng.randint(1, max_d) for _ in range(n)]
    cs = [rng.randint(-max_c, max_c) for _ in range(n * (n - 1) // 2)]
    return skew_symmetrizable(d, cs)


def rationals(lo: int = -5, hi: int = 5, denom: int = 3):
    return st.builds(lambda a, b: __import__("fractions").Fraction(a, b), st.integers(lo * denom, hi * denom), st.integers(1, denom))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20241015)


# criterion number -> (passed, title, seconds, budget, reason); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, seconds, budget, reason = ACCEPTANCE[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.1f} s of {budget:.0f} s)"
        if reason:
            line += f"  {reason}"
        terminalreporter.write_line(line)
