from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from chiralis.linalg import (
    Echelon,
    in_span,
    mat_vec,
    nullspace,
    rank,
    rref,
    solve,
    spanning_coefficients,
)


def test_rref_identity():
    rows, pivots = rref([[2, 0], [0, 3]])
    assert rows == [[1, 0], [0, 1]]
    assert pivots == [0, 1]


def test_rank_and_nullspace_singular():
    m = [[1, 2], [2, 4]]
    assert rank(m) == 1
    ns = nullspace(m)
    assert ns == [[Fraction(-2), Fraction(1)]]


def test_solve_consistent_and_inconsistent():
    assert solve([[1, 1], [0, 1]], [3, 1]) == [2, 1]
    assert solve([[1, 1], [2, 2]], [1, 3]) is None
    assert solve([], []) == []


def test_spanning_coefficients():
    vs = [[1, 0, 1], [0, 1, 1]]
    cs = spanning_coefficients(vs, [2, 3, 5])
    assert cs == [2, 3]
    assert not in_span(vs, [0, 0, 1])
    assert in_span([], [0, 0])
    assert not in_span([], [1])


def test_echelon_membership():
    e = Echelon()
    assert e.add({0: 1, 2: 1})
    assert e.add({1: 2})
    assert not e.add({0: 3, 1: 2, 2: 3})
    assert e.rank() == 2 and e.pivots() == [0, 1]
    assert e.reduce({0: 1, 1: 1, 2: 1}) == {}
    assert e.reduce({2: 5}) == {2: 5}


small = st.integers(min_value=-6, max_value=6)


@st.composite
def matrices(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    m = draw(st.integers(min_value=1, max_value=4))
    return [[draw(small) for _ in range(m)] for _ in range(n)]


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_rank_nullity_and_kernel(mat):
    ncols = len(mat[0])
    ns = nullspace(mat)
    assert rank(mat) + len(ns) == ncols
    for v in ns:
        assert mat_vec(mat, v) == [0] * len(mat)


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_rank_transpose(mat):
    t = [list(c) for c in zip(*mat)]
    assert rank(mat) == rank(t)


@given(matrices(), st.lists(small, min_size=1, max_size=4))
@settings(max_examples=80, deadline=None)
def test_solve_recovers_image_vector(mat, x):
    x = (x + [0] * len(mat[0]))[: len(mat[0])]
    rhs = mat_vec(mat, x)
    y = solve(mat, rhs)
    assert y is not None
    assert mat_vec(mat, y) == rhs
