from fractions import Fraction as F
import random

import pytest
from hypothesis import given, settings, strategies as st

from mbernoulli.arrangement import System, admissible_subspaces, tope_of
from mbernoulli.berseries import (
    ber_eval, ber_tope_poly, fourier_partial_sum, independent_tope_poly, integralize,
    partial_fractions, poly_prefactor_series, quotient_system, theta_series_tope_poly,
    verify_partial_fractions,
)
from mbernoulli.errors import SpanError, ValidationError
from mbernoulli.exactlinalg import SubspaceChart, coset_representatives, from_columns, inverse, matvec
from mbernoulli.polynomials import MultiPoly, bernoulli_polynomial
from conftest import A2, B2, phi_k, q, t, v1, v2


# partial fractions -----------------------------------------------------------

def test_pf_basis_is_itself():
    (term,) = partial_fractions([(1, 0), (0, 1)])
    assert term.coefficient == 1 and term.n == (1, 1)


def test_pf_repeated_1d():
    (term,) = partial_fractions([(1,), (1,)])
    assert term.coefficient == 1 and term.n == (2,)


def test_pf_a2_example():
    terms = partial_fractions(A2.phi)
    got = {(tm.sigma, tm.n, tm.coefficient) for tm in terms}
    assert got == {(((1, 0), (1, 1)), (1, 2), 1), (((1, 1), (0, 1)), (2, 1), 1)}
    assert verify_partial_fractions(A2.phi, terms)


def test_pf_rejects_nonspanning():
    with pytest.raises(SpanError):
        partial_fractions([(1, 0), (2, 0)])


vec2 = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(any)


@settings(max_examples=60, deadline=None)
@given(st.lists(vec2, min_size=2, max_size=6))
def test_pf_postcondition(L):
    from mbernoulli.exactlinalg import rank_of_vectors
    if rank_of_vectors(L) < 2:
        return
    assert verify_partial_fractions(L, partial_fractions(L))


def test_pf_postcondition_3d():
    L = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1), (1, 0, 0)]
    assert verify_partial_fractions(L, partial_fractions(L))


def test_pf_against_sympy_rational_function():
    import sympy
    x1, x2 = sympy.symbols("x1 x2")
    L = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1)]
    lhs = 1 / sympy.prod([a * x1 + b * x2 for a, b in L])
    rhs = 0
    for tm in partial_fractions(L):
        den = sympy.prod([(a * x1 + b * x2) ** k for (a, b), k in zip(tm.sigma, tm.n)])
        rhs += sympy.Rational(tm.coefficient.numerator, tm.coefficient.denominator) / den
    assert sympy.simplify(lhs - rhs) == 0


# independent families --------------------------------------------------------

def test_independent_examples():
    b2 = bernoulli_polynomial(2)
    assert independent_tope_poly([(1,)], [2], q("1/2")) == -b2 / 2
    assert independent_tope_poly([(1,)], [2], q("3/2")) == -b2.translate([-1]) / 2
    assert independent_tope_poly([(1, 0), (0, 1)], [1, 1], q("1/2", "1/2")) == (v1 - F(1, 2)) * (v2 - F(1, 2))


def test_independent_on_wall_raises():
    with pytest.raises(ValidationError):
        independent_tope_poly([(1,)], [1], q(1))


# Ber --------------------------------------------------------------------------

A2_LOW = -(1 + v1 - 2 * v2) * (v1 - 1 + v2) * (2 * v1 - v2) / 6
A2_HIGH = -(v1 - 2 * v2) * (v1 - 1 + v2) * (2 * v1 - 1 - v2) / 6


def test_ber_1d():
    for k in range(1, 7):
        assert ber_tope_poly(phi_k(k), q("1/2")) == -bernoulli_polynomial(k) / __import__("math").factorial(k)
    assert ber_tope_poly(phi_k(1), q("1/2")) == F(1, 2) - t


def test_ber_a2():
    assert ber_tope_poly(A2, q("1/5", "1/2")) == A2_LOW
    assert ber_tope_poly(A2, q("1/2", "1/5")) == A2_HIGH


def test_ber_eval_examples():
    assert ber_eval(A2, q("1/5", "1/2")) == A2_LOW.eval(q("1/5", "1/2"))
    assert ber_eval(phi_k(2), q("3/10")) == F(13, 600)
    z = System(2, ((1, 0), (0, 0), (0, 1)), allow_zero=True)
    assert ber_eval(z, q("1/3", "1/5")) == 0


def test_ber_requires_span():
    with pytest.raises(SpanError):
        ber_tope_poly(System(2, ((1, 0),)), q("1/2", "1/3"))


def test_degree_equals_length():
    systems = [A2, B2, phi_k(5), System(2, ((1, 0), (0, 1), (1, 2), (2, 1), (1, 1))),
               System(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))]
    for s in systems:
        w = tuple(F(1, p) for p in (3, 7, 11)[:s.r])
        assert ber_tope_poly(s, w).degree() == len(s.phi)


def test_order_independence():
    rng = random.Random(5)
    base = list(B2.phi) + [(1, 2)]
    ref = ber_tope_poly(System(2, tuple(base)), q("1/3", "1/7"))
    for _ in range(4):
        rng.shuffle(base)
        assert ber_tope_poly(System(2, tuple(base)), q("1/3", "1/7")) == ref


def _quotient_by_line(system, i):
    """(Φ \\ φ_i projected onto V/Rφ_i, P) allowing zero images."""
    ch = SubspaceChart.build([system.phi[i]], system.r)
    rest = system.phi[:i] + system.phi[i + 1:]
    return System(system.r - 1, tuple(tuple(matvec(ch.P, p)) for p in rest), allow_zero=True), ch.P


@pytest.mark.parametrize("system", [A2, B2, System(2, ((1, 0), (1, 0), (0, 1), (1, 2)))], ids=["A2", "B2", "mixed"])
def test_recurrence(system):
    for w in (q("1/5", "1/2"), q("1/2", "1/5"), q("7/10", "-1/10"), q("-3/11", "5/13")):
        ber = ber_tope_poly(system, w)
        for i, phi in enumerate(system.phi):
            lhs = ber.directional(phi)
            rest = system.without(i)
            first = ber_tope_poly(rest, w) if rest.spans else MultiPoly.zero(2)
            q0, P = _quotient_by_line(system, i)
            second = ber_tope_poly(q0, tuple(matvec(P, w))).compose_affine(P, None, 2)
            assert lhs == first - second


@settings(max_examples=25, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_periodicity(a, b):
    w = q("2/7", "1/9")
    lam = (a, b)
    for s in (A2, B2):
        moved = ber_tope_poly(s, (w[0] + a, w[1] + b))
        assert moved == ber_tope_poly(s, w).translate([-a, -b])


def _sublattice_average(system, M, w):
    """Rebuild Ber(Φ, Z^r) from the sublattice M Z^r by averaging translates."""
    r = system.r
    Minv = inverse(M)
    phis, factor = integralize([matvec(Minv, p) for p in system.phi])
    sub = System(r, tuple(phis))
    reps = coset_representatives([tuple(c) for c in zip(*M)])
    total = MultiPoly.zero(r)
    for lam in reps:
        shifted = tuple(x + y for x, y in zip(w, lam))
        u = matvec(Minv, shifted)
        p = ber_tope_poly(sub, u)
        # v -> M^{-1}(v + λ)
        total = total + p.compose_affine(Minv, matvec(Minv, lam), r)
    return total * factor / len(reps)


def test_averaging_index2_1d():
    for k in (1, 2, 3):
        s = phi_k(k)
        assert _sublattice_average(s, ((2,),), q("3/10")) == ber_tope_poly(s, q("3/10"))


@pytest.mark.parametrize("M", [((2, 0), (0, 1)), ((2, 0), (0, 2)), ((1, 1), (-1, 1))])
def test_averaging_2d(M):
    for s in (A2, B2):
        w = q("2/7", "1/9")
        assert _sublattice_average(s, M, w) == ber_tope_poly(s, w)


# quotient systems -------------------------------------------------------------

def test_quotient_system_examples():
    subs = admissible_subspaces(A2)
    line = next(x for x in subs if x.dim == 1 and x.contains((1, 1)))
    qs = quotient_system(A2, line)
    assert qs.system.phi == ((1,), (-1,))
    assert quotient_system(A2, subs[0]).system.phi == A2.phi
    assert quotient_system(A2, subs[-1]).system.r == 0


# generalized series ------------------------------------------------------------

def test_theta_series():
    p = theta_series_tope_poly([(1,)], q("1/2"))
    assert p.parts == {1: F(1, 2) - t}
    p = theta_series_tope_poly([(1,), (1,)], q("1/2"))
    assert p.parts == {2: -bernoulli_polynomial(2) / 2}
    with pytest.raises(ValidationError):
        theta_series_tope_poly([], ())


def test_poly_prefactor():
    L = [(1,), (1,)]
    base = theta_series_tope_poly(L, q("1/2"))
    assert poly_prefactor_series(MultiPoly.const(1, 1), L, q("1/2")) == base
    assert poly_prefactor_series(t, L, q("1/2")).parts == {1: F(1, 2) - t}
    # x^2 / x^2 = 1 off γ = 0: the series is -1 on every tope
    assert poly_prefactor_series(t * t, L, q("1/2")).parts == {0: MultiPoly.const(-1, 1)}


def test_poly_prefactor_against_partial_sum():
    import numpy as np
    # Σ_{n != 0} n / n^3 e^{2iπ n t} computed directly
    tt = 0.3
    n = np.arange(1, 20001)
    direct = 2 * np.sum(np.cos(2 * np.pi * n * tt) / n ** 2)
    ser = poly_prefactor_series(t, [(1,)] * 3, q("3/10"))
    assert abs(ser.eval_complex(q("3/10")) - direct) < 1e-6


# Fourier oracle ------------------------------------------------------------

def test_fourier_1d():
    assert abs(fourier_partial_sum(phi_k(2), (0.3,), 10 ** 4) - 0.0216667) < 1e-6
    assert abs(fourier_partial_sum(phi_k(1), (0.25,), 10 ** 5, cesaro=True) - 0.25) < 1e-4
    with pytest.raises(ValidationError):
        fourier_partial_sum(System(1, ()), (0.3,), 10)


def test_fourier_2d_absolutely_convergent():
    s = System(2, ((1, 0), (1, 0), (0, 1), (0, 1), (1, 1), (1, 1)))
    for w in (q("3/10", "1/7"), q("4/5", "2/9")):
        assert abs(fourier_partial_sum(s, w, 120) - float(ber_eval(s, w))) < 1e-5


def test_integralize():
    vecs, f = integralize([(F(1, 2), 1), (2, 0)])
    assert vecs == [(1, 2), (1, 0)] and f == 1
    vecs, f = integralize([(F(1, 3),)])
    assert vecs == [(1,)] and f == 3
