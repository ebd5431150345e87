from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from finwalg.ratlin import (InconsistentSystem, SparseMatrix, format_rational, identity, inverse,
                            kernel_basis, mat_mul, parse_rational, rank, solve)

small = st.integers(min_value=-3, max_value=3)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def det(M):
    """Leibniz formula: an oracle independent of elimination."""
    n = len(M)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i in range(n):
            prod *= M[i][perm[i]]
        total += -prod if inv % 2 else prod
    return total


def rank_by_minors(M):
    r, c = len(M), len(M[0])
    for k in range(min(r, c), 0, -1):
        for rows in combinations(range(r), k):
            for cols in combinations(range(c), k):
                if det([[M[i][j] for j in cols] for i in rows]):
                    return k
    return 0


def test_rational_round_trip():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(-2) == -2
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(Fraction(5)) == "5"
    with pytest.raises(TypeError):
        parse_rational(0.5)


def test_sparse_matrix_drops_zeros_and_checks_bounds():
    M = SparseMatrix.from_dense([[0, 1], [2, 0]])
    assert M.data == [{1: 1}, {0: 2}]
    assert M.apply([1, 1]) == [1, 2]
    with pytest.raises(ValueError):
        SparseMatrix(1, 1, [{3: Fraction(1)}])


@settings(max_examples=60, derandomize=True, deadline=None)
@given(matrices())
def test_rank_matches_minor_oracle(M):
    S = SparseMatrix.from_dense(M)
    assert rank(S) == rank_by_minors(M)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(matrices())
def test_kernel_is_annihilated_and_complete(M):
    S = SparseMatrix.from_dense(M)
    ker = kernel_basis(S)
    for v in ker:
        assert S.apply(v) == [0] * len(M)
    assert len(ker) + rank_by_minors(M) == len(M[0])


@settings(max_examples=60, derandomize=True, deadline=None)
@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_solve_reproduces_rhs(M, x):
    S = SparseMatrix.from_dense(M)
    b = S.apply(x[:len(M[0])])
    assert S.apply(solve(S, b)) == b


def test_inconsistent_system():
    S = SparseMatrix.from_dense([[1, 1], [2, 2]])
    with pytest.raises(InconsistentSystem):
        solve(S, [1, 3])


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_inverse(M):
    inv = inverse(M)
    if det(M) == 0:
        assert inv is None
    else:
        assert mat_mul(M, inv) == identity(len(M))
