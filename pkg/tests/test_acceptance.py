"""Acceptance criteria 1-9.

Every test carries ``@pytest.mark.criterion(n, label)``; the conftest hook
prints one PASS/FAIL line per criterion at the end of the session.  Run
``python3 tests/test_acceptance.py`` to execute only this module.
"""
import cmath
import itertools
import math
import random
from fractions import Fraction as F

import pytest

from conftest import A2, B2, phi_k, q, v1, v2
from mbernoulli.affineseries import affine_1d, affine_eval, affine_jump_1d
from mbernoulli.arrangement import System, admissible_subspaces, cell_topes, tope_of
from mbernoulli.berseries import (
    ber_eval, ber_tope_poly, fourier_partial_sum, integralize, partial_fractions,
    verify_partial_fractions,
)
from mbernoulli.errors import SpanError
from mbernoulli.eulermaclaurin import EMConfig, TestFunction, em_verify
from mbernoulli.exactlinalg import SubspaceChart, coset_representatives, inverse, matvec, rank_of_vectors
from mbernoulli.polynomials import MultiPoly, bernoulli_polynomial
from mbernoulli.splines import decomposition_eval, decomposition_terms, term_polynomial
from mbernoulli.wallcross import jump, jump_by_difference, residue_pol

crit = pytest.mark.criterion
TPI = 2j * math.pi


# 1 ---------------------------------------------------------------------------

@crit(1, "1-D Bernoulli identity, exact")
def test_c1_one_dimensional():
    for k in range(1, 7):
        assert ber_tope_poly(phi_k(k), q("1/2")) == -bernoulli_polynomial(k) / math.factorial(k)


# 2 ---------------------------------------------------------------------------

A2_LOW = -(1 + v1 - 2 * v2) * (v1 - 1 + v2) * (2 * v1 - v2) / 6
A2_HIGH = -(v1 - 2 * v2) * (v1 - 1 + v2) * (2 * v1 - 1 - v2) / 6


@crit(2, "A2 closed forms, exact")
def test_c2_a2():
    assert ber_tope_poly(A2, q("1/5", "1/2")) == A2_LOW  # v1 < v2
    assert ber_tope_poly(A2, q("1/2", "1/5")) == A2_HIGH  # v1 > v2


# 3 ---------------------------------------------------------------------------

B2_FORMS = {
    # region (by computation) -> witness, polynomial
    "v1-v2<1, v2<0, v1+v2>0": (q("7/10", "-1/10"), v2 * (2 * v1 - 1) * (v1 - 1 - v2) * (v1 + v2) / 8),
    "v1>v2, v2>0, v1+v2<1": (q("1/2", "1/5"), v2 * (2 * v1 - 1) * (v1 - 1 + v2) * (v1 - v2) / 8),
    # mirror image of the previous entry under v1 <-> v2, so it lives on
    # v2 > v1; the witness check below confirms the region
    "v2>v1, v1>0, v1+v2<1": (q("1/5", "1/2"), v1 * (2 * v2 - 1) * (v1 - 1 + v2) * (v1 - v2) / 8),
}


@crit(3, "B2-type closed forms with computed region labels, exact")
def test_c3_b2():
    for region, (w, poly) in B2_FORMS.items():
        assert ber_tope_poly(B2, w) == poly, region
    # the v1 > v2 tope does not carry the mirrored polynomial
    assert ber_tope_poly(B2, q("1/2", "1/5")) != B2_FORMS["v2>v1, v1>0, v1+v2<1"][1]
    # the two regions inside the unit square each carry exactly one unit-square tope
    inside = ["v1>v2, v2>0, v1+v2<1", "v2>v1, v1>0, v1+v2<1"]
    found = {name: [] for name in inside}
    for tope, _ in cell_topes(B2):
        p = ber_tope_poly(B2, tope)
        for name in inside:
            if p == B2_FORMS[name][1]:
                found[name].append(tope.witness)
    assert all(len(ws) == 1 for ws in found.values())
    assert tope_of(found[inside[1]][0], B2) == tope_of(B2_FORMS[inside[1]][0], B2)


@crit(3, "B2-type closed forms with computed region labels, exact")
def test_c3_b2_wall_crossing_consistency():
    a, b, c = (B2_FORMS[k][0] for k in B2_FORMS)
    assert jump(B2, b, a) == B2_FORMS["v1>v2, v2>0, v1+v2<1"][1] - B2_FORMS["v1-v2<1, v2<0, v1+v2>0"][1]
    assert jump(B2, c, b) == B2_FORMS["v2>v1, v1>0, v1+v2<1"][1] - B2_FORMS["v1>v2, v2>0, v1+v2<1"][1]


# 4 ---------------------------------------------------------------------------

def _adjacent_pairs(system):
    topes = []
    for tp, _ in cell_topes(system):
        for a, b in itertools.product((-1, 0, 1), repeat=2):
            topes.append(tope_of((tp.witness[0] + a, tp.witness[1] + b), system))
    inside = [tp for tp in topes if all(0 <= x < 1 for x in tp.witness)]
    seen = set()
    for t1 in inside:
        for t2 in topes:
            diff = [abs(x - y) for x, y in zip(t1.key, t2.key)]
            if sum(diff) == 1 and (t1.key, t2.key) not in seen:
                seen.add((t1.key, t2.key))
                yield t1, t2


@crit(4, "wall crossing: residue path equals difference path, exact")
def test_c4_wall_crossing():
    for system in (A2, B2):
        count = 0
        for t1, t2 in _adjacent_pairs(system):
            assert jump(system, t1, t2) == jump_by_difference(system, t1, t2)
            count += 1
        assert count >= 4
    assert jump(A2, q("1/5", "1/2"), q("1/2", "1/5")) == (1 - v1 - v2) * (v1 - v2) / 2
    assert jump(B2, q("1/2", "1/5"), q("7/10", "-1/10")) == v2 ** 2 * (2 * v1 - 1) / 4
    assert jump(B2, q("1/5", "1/2"), q("1/2", "1/5")) == -(v1 - 1 + v2) * (v1 - v2) ** 2 / 8


# 5 ---------------------------------------------------------------------------

V_PT = q("9/5", "1/4")
TOTAL = -(v1 - 1 - 2 * v2) * (2 * v1 - 3 - v2) * (v1 - 2 + v2) / 6


def _key(d, lam):
    subs = admissible_subspaces(A2)
    if d is None:
        sub = subs[0]
    elif d == "V":
        sub = subs[-1]
    else:
        sub = next(s for s in subs if s.dim == 1 and s.contains(d))
    ch = SubspaceChart.build(list(sub.basis), 2)
    return (sub.dim, sub.rref, tuple(matvec(ch.P, lam)))


@crit(5, "decomposition worked example for two generic points, exact")
def test_c5_decomposition():
    beta, beta_p = q("1/2", "1/5"), q("7/10", "1/2")
    got = {tm.key: term_polynomial(tm, V_PT) for tm, _ in decomposition_terms(A2, beta, V_PT)}
    assert got == {
        _key("V", (0, 0)): ber_tope_poly(A2, beta),
        _key((0, 1), (1, 0)): (v1 - 1) * (v1 - 2 * v2) / 2,
        _key((1, 1), (0, -1)): -(-v1 - v2) * (v1 - v2 - 1) / 2,
        _key(None, (1, 0)): -(v1 - 1 - v2),
    }
    got_p = {tm.key: term_polynomial(tm, V_PT) for tm, _ in decomposition_terms(A2, beta_p, V_PT)}
    assert got_p == {
        _key("V", (0, 0)): ber_tope_poly(A2, beta),
        _key((0, 1), (1, 0)): (v1 - 1) * (v1 - 2 * v2) / 2,
        _key((1, 1), (1, 0)): -(2 - v1 - v2) * (v1 - 1 - v2) / 2,
    }
    assert sum(got.values(), MultiPoly.zero(2)) == TOTAL
    assert sum(got_p.values(), MultiPoly.zero(2)) == TOTAL
    assert TOTAL == ber_tope_poly(A2, V_PT)
    assert decomposition_eval(A2, beta, V_PT) == TOTAL.eval(V_PT) == F(-7, 8000)


# 6 ---------------------------------------------------------------------------

@crit(6, "1-D decomposition identity at 20 random points, exact")
def test_c6_one_dimensional_decomposition():
    rng = random.Random(2024)
    s = phi_k(2)
    beta = q("1/3")
    done = 0
    while done < 20:
        tt = F(rng.randint(-500, 500), rng.choice([7, 11, 13, 100]))
        if tt.denominator == 1 or not -5 < tt < 5:
            continue
        assert decomposition_eval(s, beta, (tt,)) == ber_eval(s, (tt,))
        done += 1


# 7 ---------------------------------------------------------------------------

EM_CONFIG = EMConfig(lattice_radius=8, quad_order=24)


@crit(7, "Euler-MacLaurin with Gaussians (radius 8, 24-point Gauss rule)")
@pytest.mark.parametrize("system,tol", [(phi_k(1), 1e-8), (phi_k(2), 1e-8), (A2, 1e-6)], ids=["phi1", "phi2", "A2"])
def test_c7_euler_maclaurin(system, tol):
    f = TestFunction.gaussian(system.r, a=F(1, 2), center=[F(1, 3)] * system.r)
    assert em_verify(system, f, EM_CONFIG).abs_error <= tol


# 8 ---------------------------------------------------------------------------

@crit(8, "affine closed forms, jump and z -> 0 degeneration (1e-10)")
def test_c8_affine():
    rng = random.Random(8)
    for _ in range(10):
        z = F(rng.randint(-29, 29), rng.choice([3, 4, 5, 7, 9]))
        if z.denominator == 1:
            z += F(1, 2)
        tt = F(rng.randint(1, 96), 97)
        q_ = cmath.exp(-TPI * float(z))
        k1 = cmath.exp(-TPI * float(z * tt)) / (1 - q_)
        k2 = k1 * (float(tt) + 1 / (cmath.exp(TPI * float(z)) - 1))
        assert abs(affine_1d(1, z, tt).eval([tt]) - k1) < 1e-10
        assert abs(affine_1d(2, z, tt).eval([tt]) - k2) < 1e-10
        # jump across 0
        j = affine_jump_1d(z, F(1, 2), F(-1, 2))
        for x in (tt, tt - 1):
            assert abs(j.eval([x]) - cmath.exp(-TPI * float(z * x))) < 1e-10
    for k in range(1, 5):
        assert abs(affine_1d(k, 0, F(2, 7)).eval([F(2, 7)]) - float(ber_eval(phi_k(k), q("2/7")))) < 1e-10
    for system, w in ((A2, q("1/5", "1/2")), (B2, q("7/10", "-1/10"))):
        assert abs(affine_eval([(p, 0) for p in system.phi], w) - float(ber_eval(system, w))) < 1e-10


# 9 ---------------------------------------------------------------------------

PROPS = "property suites"


@crit(9, PROPS)
def test_c9_recurrence():
    for system in (A2, B2):
        for w in (q("1/5", "1/2"), q("1/2", "1/5"), q("7/10", "-1/10")):
            ber = ber_tope_poly(system, w)
            for i, phi in enumerate(system.phi):
                rest = system.without(i)
                first = ber_tope_poly(rest, w) if rest.spans else MultiPoly.zero(2)
                ch = SubspaceChart.build([phi], 2)
                others = system.phi[:i] + system.phi[i + 1:]
                q0 = System(1, tuple(tuple(matvec(ch.P, p)) for p in others), allow_zero=True)
                second = ber_tope_poly(q0, tuple(matvec(ch.P, w))).compose_affine(ch.P, None, 2)
                assert ber.directional(phi) == first - second


@crit(9, PROPS)
def test_c9_periodicity():
    rng = random.Random(9)
    w = q("2/7", "1/9")
    for _ in range(8):
        a, b = rng.randint(-6, 6), rng.randint(-6, 6)
        for s in (A2, B2):
            assert ber_tope_poly(s, (w[0] + a, w[1] + b)) == ber_tope_poly(s, w).translate([-a, -b])


@crit(9, PROPS)
@pytest.mark.parametrize("M", [((2, 0), (0, 1)), ((2, 0), (0, 2)), ((1, 1), (-1, 1)), ((2, 1), (0, 2))],
                         ids=["index2", "index4", "index2-skew", "index4-skew"])
def test_c9_sublattice_averaging(M):
    w = q("2/7", "1/9")
    for system in (A2, B2):
        Minv = inverse(M)
        phis, factor = integralize([matvec(Minv, p) for p in system.phi])
        sub = System(2, tuple(phis))
        reps = coset_representatives([tuple(c) for c in zip(*M)])
        total = MultiPoly.zero(2)
        for lam in reps:
            u = matvec(Minv, (w[0] + lam[0], w[1] + lam[1]))
            total = total + ber_tope_poly(sub, u).compose_affine(Minv, matvec(Minv, lam), 2)
        assert total * factor / len(reps) == ber_tope_poly(system, w)


@crit(9, PROPS)
def test_c9_degree_and_partial_fractions():
    systems = [A2, B2, phi_k(5), System(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))]
    for s in systems:
        w = tuple(F(1, p) for p in (3, 7, 11)[:s.r])
        assert ber_tope_poly(s, w).degree() == len(s.phi)
    rng = random.Random(1)
    for _ in range(20):
        L = [(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(2, 6))]
        L = [v for v in L if any(v)]
        if len(L) < 2 or rank_of_vectors(L) < 2:
            continue
        assert verify_partial_fractions(L, partial_fractions(L))


@crit(9, PROPS)
def test_c9_pol_properties():
    E = (-1, 1)
    ev = MultiPoly.linear([-1, 1])
    f = F(1, 2) - v1
    psi = [(1, 0), (0, 1), (1, -1)]
    # extension independence
    for g in (MultiPoly.const(3, 2), v1 * v2 - 2):
        assert residue_pol(f + ev * g, psi, E) == residue_pol(f, psi, E)
    # (a): derivative along ψ drops ψ
    full = residue_pol(v1 * v2 + 1, psi, (1, 2))
    for i, p in enumerate(psi):
        assert full.directional(p) == residue_pol(v1 * v2 + 1, psi[:i] + psi[i + 1:], (1, 2))
    # (c): vanishing order |Ψ| - 1 along the wall R e1
    pol = residue_pol(MultiPoly(2, {(2, 0): 1, (0, 0): -3}), [(0, 1), (1, 1), (1, -1)], (0, 1))
    assert all(e[1] >= 2 for e in pol.terms)


@crit(9, PROPS)
def test_c9_decomposition_properties():
    rng = random.Random(4)
    v = q("13/10", "-3/5")
    ref = ber_eval(A2, v)
    for _ in range(4):
        beta = (F(rng.choice([-1, 1]) * rng.randint(1, 30), 17), F(rng.choice([-1, 1]) * rng.randint(1, 30), 19))
        assert decomposition_eval(A2, beta, v) == ref
    beta = q("1/2", "1/5")
    assert decomposition_eval(A2, beta, V_PT, radius=3) == decomposition_eval(A2, beta, V_PT, radius=6)
    # J-independence: any basis J of the quotient taken from Ψ gives the same value
    for tm, val in decomposition_terms(A2, beta, V_PT):
        for J in itertools.combinations(range(len(tm.psi)), len(tm.chart.P)):
            try:
                alt = tm.evaluate(V_PT, J)
            except SpanError:
                continue
            assert alt == val


@crit(9, PROPS)
def test_c9_fourier_oracle():
    s = System(2, ((1, 0), (1, 0), (0, 1), (0, 1), (1, 1), (1, 1)))
    for w in (q("3/10", "1/7"), q("4/5", "2/9")):
        assert abs(fourier_partial_sum(s, w, 120) - float(ber_eval(s, w))) < 1e-5
    assert abs(fourier_partial_sum(phi_k(2), (0.3,), 10 ** 4) - float(ber_eval(phi_k(2), q("3/10")))) < 1e-5


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
