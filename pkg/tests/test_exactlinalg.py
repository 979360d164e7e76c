from fractions import Fraction as F
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from mbernoulli.errors import SpanError, ValidationError
from mbernoulli.exactlinalg import (
    SubspaceChart, coset_representatives, det, floor_q, ceil_q, from_columns,
    hermite_normal_form, lattice_intersect, lattice_quotient, matmul, matvec,
    primitive_equation, smith_normal_form, Q,
)


def cols(*vs):
    return from_columns(vs)


def test_hnf_identity():
    h, u = hermite_normal_form([[1, 0], [0, 1]])
    assert h == ((1, 0), (0, 1))


def test_hnf_swap():
    h, u = hermite_normal_form([[0, 1], [1, 0]])
    assert h == ((1, 0), (0, 1))
    assert u == ((0, 1), (1, 0))


def test_hnf_hand_example():
    h, _ = hermite_normal_form(cols((2, 0), (2, 2)))
    assert h == cols((2, 0), (0, 2))


small_int = st.integers(-6, 6)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_int, min_size=3, max_size=3), min_size=2, max_size=3))
def test_hnf_invariants(rows):
    h, u = hermite_normal_form(rows)
    assert matmul(rows, u) == h
    assert abs(det(u)) == 1
    # lower triangular echelon with positive pivots, reduced left entries
    col = 0
    for i, row in enumerate(h):
        if col < len(row) and row[col] > 0:
            assert all(x == 0 for x in row[col + 1:])
            assert all(0 <= row[j] < row[col] for j in range(col))
            col += 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_int, min_size=3, max_size=3), min_size=3, max_size=3))
def test_snf_invariants(rows):
    d, left, right = smith_normal_form(rows)
    assert matmul(matmul(left, rows), right) == d
    assert abs(det(left)) == 1 and abs(det(right)) == 1
    diag = [d[i][i] for i in range(3)]
    assert all(d[i][j] == 0 for i in range(3) for j in range(3) if i != j)
    for a, b in zip(diag, diag[1:]):
        assert a >= 0 and b >= 0
        if a:
            assert b % a == 0
        else:
            assert b == 0


def test_cosets_examples():
    assert coset_representatives([(1, 0), (0, 1)]) == [(0, 0)]
    assert coset_representatives([(2,)]) == [(0,), (1,)]
    assert coset_representatives([(1, 0), (1, 2)]) == [(0, 0), (0, 1)]


def test_cosets_rank_deficient():
    with pytest.raises(SpanError):
        coset_representatives([(1, 1), (2, 2)])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2))
def test_coset_count_and_distinct(basis):
    m = from_columns(basis)
    dt = det(m)
    if dt == 0:
        return
    reps = coset_representatives(basis)
    assert len(reps) == abs(dt)
    # pairwise inequivalent modulo the sublattice
    inv = [[F(x) for x in r] for r in __import__("mbernoulli.exactlinalg", fromlist=["inverse"]).inverse(m)]
    for a, b in itertools.combinations(reps, 2):
        diff = [x - y for x, y in zip(a, b)]
        coords = matvec(inv, diff)
        assert not all(c.denominator == 1 for c in coords)


def test_primitive_equation_examples():
    assert primitive_equation([(1, 1)]) == (1, -1)
    assert primitive_equation([(1, 0)]) == (0, 1)
    assert primitive_equation([(1, 1, 0), (0, 0, 1)]) == (1, -1, 0)
    with pytest.raises(SpanError):
        primitive_equation([(1, 0, 0)])


def test_lattice_intersect_and_quotient():
    assert lattice_intersect([(1, 1)]) == ((1, 1),)
    assert lattice_intersect([(2, 2)]) == ((1, 1),)
    p, r = lattice_quotient([(1, 1)])
    assert p == ((1, -1),)
    assert matvec(p, (1, 0)) == (1,) and matvec(p, (0, 1)) == (-1,)
    p, r = lattice_quotient([], 2)
    assert p == ((1, 0), (0, 1))
    assert lattice_intersect([], 2) == ()
    assert lattice_intersect([(1, 0), (0, 3)]) == ((1, 0), (0, 1))
    assert lattice_quotient([(1, 0), (0, 1)])[0] == ()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=2))
def test_chart_is_unimodular_and_saturated(vecs):
    vecs = [v for v in vecs if any(v)]
    if not vecs:
        return
    ch = SubspaceChart.build(vecs, 3)
    u = from_columns(list(ch.S) + list(ch.R))
    assert abs(det(u)) == 1
    # saturation: the Smith invariants of S are all one
    d, _, _ = smith_normal_form(from_columns(ch.S))
    assert all(d[i][i] == 1 for i in range(ch.d))
    for v in vecs:
        assert all(x == 0 for x in matvec(ch.P, v))


@given(st.integers(-50, 50), st.integers(1, 12))
def test_floor_ceil_against_scan(p, q):
    x = F(p, q)
    fl = max(n for n in range(-60, 60) if n <= x)
    assert floor_q(x) == fl
    assert ceil_q(x) == min(n for n in range(-60, 60) if n >= x)


def test_rational_parsing():
    assert Q("3/4") == F(3, 4)
    assert Q(2) == F(2)
    with pytest.raises(ValidationError):
        Q("abc")
