"""Tope polynomials of multiple Bernoulli series.

The series of a list ``A`` paired with a rational function ``g`` is
``S(A, g)(v) = Σ_{γ ∈ Γ_reg(A)} g(2iπγ) e^{2iπ<v,γ>}`` over covectors
``γ ∈ Z^r`` with ``<φ,γ> != 0`` for every φ in ``A``.  The plain series
``B(Φ)`` is ``S(Φ, 1/∏φ)``.

Computation: split ``1/∏φ`` into atoms ``1/∏σ_i^{n_i}`` over bases σ
extracted from Φ, evaluate each atom in closed form (products of Bernoulli
polynomials averaged over ``Z^r / Zσ``), and correct for the covectors that
are regular for σ but not for Φ by recursing into quotients ``V / Rφ``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

import numpy as np

from .arrangement import (
    AdmissibleSubspace, InducedSystem, System, Tope, quotient, tope_of,
)
from .errors import SpanError, ValidationError
from .exactlinalg import (
    SubspaceChart, coset_representatives, direction_key, dot, floor_q, from_columns,
    independent_subset, inverse, ivec, matvec, primitive, rank_of_vectors, solve_in_span,
)
from .polynomials import MultiPoly, PiPolynomial, apply_diff_operator, bernoulli_affine


@dataclass(frozen=True)
class PartialFractionTerm:
    """``coefficient / ∏ sigma_i^{n_i}`` for an independent family ``sigma``."""

    coefficient: Fraction
    sigma: tuple  # vectors
    n: tuple
    indices: tuple = ()  # positions in the input list of the sigma vectors


def _parallel_factor(a: Sequence, b: Sequence) -> Fraction | None:
    """c with a = c b, or None."""
    c = None
    for x, y in zip(a, b):
        if y == 0:
            if x != 0:
                return None
            continue
        q = Fraction(x) / Fraction(y)
        if c is None:
            c = q
        elif c != q:
            return None
    return c


def partial_fractions(L: Sequence[Sequence]) -> list[PartialFractionTerm]:
    """Write ``1/∏_{α∈L} α`` as a combination of atoms over bases taken from L.

    The first independent vectors of ``L`` form the starting basis; the other
    vectors are eliminated one at a time using ``α = Σ c_i σ_i``.
    """
    L = [tuple(int(x) for x in v) for v in L]
    if not L:
        return [PartialFractionTerm(Fraction(1), (), (), ())]
    r = len(L[0])
    if any(not any(v) for v in L):
        raise ValidationError("zero vector in list")
    if rank_of_vectors(L) != r:
        raise SpanError("list does not span")
    # distinct vectors with multiplicities, first-appearance order
    distinct: list = []
    mult: dict = {}
    first: dict = {}
    for i, v in enumerate(L):
        if v not in mult:
            distinct.append(v)
            mult[v] = 0
            first[v] = i
        mult[v] += 1
    base_idx = independent_subset(distinct)
    sigma0 = tuple(distinct[i] for i in base_idx)
    state = {(sigma0, tuple(mult[v] for v in sigma0)): Fraction(1)}
    for alpha in distinct:
        if alpha in sigma0:
            continue
        N = mult[alpha]
        new: dict = {}
        for (sigma, n), coef in state.items():
            for (s2, n2), c2 in _eliminate(sigma, n, alpha, N).items():
                key = (s2, n2)
                new[key] = new.get(key, 0) + coef * c2
        state = {k: v for k, v in new.items() if v != 0}
    out = []
    for (sigma, n), coef in state.items():
        idx = tuple(first.get(v, -1) for v in sigma)
        out.append(PartialFractionTerm(coef, sigma, n, idx))
    out.sort(key=lambda t: (t.indices, t.sigma, t.n))
    return out


@lru_cache(maxsize=None)
def _eliminate(sigma: tuple, n: tuple, alpha: tuple, N: int) -> dict:
    """``θ(σ,n) / α^N`` as a combination of atoms not involving α separately."""
    c = solve_in_span(sigma, alpha)
    nz = [i for i, x in enumerate(c) if x != 0]
    out: dict = {}
    if len(nz) == 1:
        i = nz[0]
        n2 = list(n)
        n2[i] += N
        return {(sigma, tuple(n2)): 1 / c[i] ** N}
    # 1 = Σ c_i σ_i / α
    for i in nz:
        if n[i] == 1:
            s2 = list(sigma)
            s2[i] = alpha
            n2 = list(n)
            n2[i] = N + 1
            key = (tuple(s2), tuple(n2))
            out[key] = out.get(key, 0) + c[i]
        else:
            n2 = list(n)
            n2[i] -= 1
            for key, v in _eliminate(sigma, tuple(n2), alpha, N + 1).items():
                out[key] = out.get(key, 0) + c[i] * v
    return out


def verify_partial_fractions(L: Sequence[Sequence], terms: Sequence[PartialFractionTerm]) -> bool:
    """Exact check of ``Σ c θ(σ,n) = 1/∏ L`` by clearing denominators."""
    L = [tuple(v) for v in L]
    r = len(L[0])
    # every factor written as scalar * primitive form
    def factor(v):
        p = direction_key(v)
        return p, _parallel_factor(v, p)

    lhs_exp: dict = {}
    lhs_scale = Fraction(1)
    for v in L:
        p, c = factor(v)
        lhs_exp[p] = lhs_exp.get(p, 0) + 1
        lhs_scale *= c
    term_data = []
    top = dict(lhs_exp)
    for t in terms:
        exps: dict = {}
        scale = Fraction(1)
        for v, k in zip(t.sigma, t.n):
            p, c = factor(v)
            exps[p] = exps.get(p, 0) + k
            scale *= c ** k
        term_data.append((t.coefficient / scale, exps))
        for p, k in exps.items():
            top[p] = max(top.get(p, 0), k)

    def form(p):
        return MultiPoly.linear(list(p))

    def cleared(coef, exps):
        out = MultiPoly.const(coef, r)
        for p, k in top.items():
            out = out * form(p) ** (k - exps.get(p, 0))
        return out

    lhs = cleared(1 / lhs_scale, lhs_exp)
    rhs = MultiPoly.zero(r)
    for coef, exps in term_data:
        rhs = rhs + cleared(coef, exps)
    return lhs == rhs


def integralize(phi: Sequence[Sequence]) -> tuple[list[tuple], Fraction]:
    """Rescale rational vectors to primitive integer ones.

    Returns ``(vectors, factor)`` with ``B(Φ) = factor · B(Φ')``.
    """
    out = []
    factor = Fraction(1)
    for v in phi:
        v = [Fraction(x) for x in v]
        p = primitive(v)
        c = _parallel_factor(v, p)
        out.append(p)
        factor /= c
    return out, factor


# ---------------------------------------------------------------------------
# closed form for an independent family


def independent_tope_poly(sigma: Sequence[Sequence], n: Sequence[int], witness: Sequence) -> MultiPoly:
    """Tope polynomial of ``Σ_{γ: <σ_i,γ> != 0} e^{2iπ<v,γ>} / ∏ (2iπ<σ_i,γ>)^{n_i}``.

    ``sigma`` is a basis of ``Q^r`` made of integer vectors, not necessarily
    a lattice basis; the series is averaged over ``Z^r / Zσ``.
    """
    sigma = [tuple(int(x) for x in s) for s in sigma]
    r = len(sigma)
    w = [Fraction(x) for x in witness]
    if r == 0:
        return MultiPoly.const(1, 0)
    return _independent_cached(tuple(sigma), tuple(n), tuple(w))


@lru_cache(maxsize=None)
def _independent_cached(sigma: tuple, n: tuple, w: tuple) -> MultiPoly:
    r = len(sigma)
    smat = from_columns(sigma)
    sinv = inverse(smat)
    reps = coset_representatives(sigma)
    total = MultiPoly.zero(r)
    const = Fraction((-1) ** r, 1)
    for k in n:
        const /= factorial(k)
    for lam in reps:
        term = MultiPoly.const(const, r)
        for i in range(r):
            row = sinv[i]
            shift = dot(row, lam)
            at_w = dot(row, w) - shift
            if at_w.denominator == 1:
                raise ValidationError("witness lies on a wall of the independent family")
            m = floor_q(at_w)
            form = MultiPoly.linear(list(row), -shift - m)
            term = term * bernoulli_affine(n[i], form)
        total = total + term
    return total / len(reps)


# ---------------------------------------------------------------------------
# full recursion


def _chart_for(phi: tuple) -> SubspaceChart:
    return SubspaceChart.build([phi], len(phi))


@lru_cache(maxsize=None)
def _series_atom(A: tuple, sigma: tuple, n: tuple, w: tuple) -> MultiPoly:
    """``S(A, θ(σ, n))`` on the tope of ``w``; every σ direction occurs in ``A``."""
    r = len(w)
    if r == 0:
        return MultiPoly.const(1, 0)
    sdirs = {direction_key(s) for s in sigma}
    phi = next((a for a in A if direction_key(a) not in sdirs), None)
    if phi is None:
        return _independent_cached(sigma, n, w)
    dphi = direction_key(phi)
    rest = tuple(a for a in A if direction_key(a) != dphi)
    main = _series_atom(rest, sigma, n, w)
    # covectors orthogonal to φ that are regular for the rest
    ch = _chart_for(dphi)
    P = ch.P
    A0 = tuple(ivec(matvec(P, a)) for a in rest)
    L0 = []
    for s, k in zip(sigma, n):
        L0.extend([ivec(matvec(P, s))] * k)
    w0 = tuple(matvec(P, w))
    corr = MultiPoly.zero(r - 1)
    for t in partial_fractions(L0):
        corr = corr + _series_atom(A0, t.sigma, t.n, w0) * t.coefficient
    return main - corr.compose_affine(P, None, r)


def series_tope_poly(A: Sequence[Sequence], L: Sequence[Sequence], witness: Sequence) -> MultiPoly:
    """Tope polynomial of ``S(A, 1/∏_{α∈L} α)``; the directions of L must occur in A."""
    w = tuple(Fraction(x) for x in witness)
    A = tuple(tuple(int(x) for x in a) for a in A)
    r = len(w)
    total = MultiPoly.zero(r)
    for t in partial_fractions(L):
        total = total + _series_atom(A, t.sigma, t.n, w) * t.coefficient
    return total


def _witness(system: System, tope_or_witness) -> tuple:
    if isinstance(tope_or_witness, Tope):
        return tope_or_witness.witness
    w = tuple(Fraction(x) for x in tope_or_witness)
    tope_of(w, system)  # validates regularity
    return w


def ber_tope_poly(system: System, tope_or_witness) -> MultiPoly:
    """``Ber(Φ, Z^r, τ)``: the polynomial agreeing with ``B(Φ)`` on the tope τ."""
    if system.has_zero:
        return MultiPoly.zero(system.r)
    system.require_spanning()
    w = _witness(system, tope_or_witness)
    if system.r == 0:
        return MultiPoly.const(1, 0)
    return series_tope_poly(system.phi, system.phi, w)


def ber_eval(system: System, v: Sequence) -> Fraction:
    if system.has_zero:
        return Fraction(0)
    v = tuple(Fraction(x) for x in v)
    return ber_tope_poly(system, v).eval(v)


def quotient_system(system: System, sub: AdmissibleSubspace) -> InducedSystem:
    """The list ``Φ \\ s`` projected to ``V/s`` with lattice ``Z^{r-d}``."""
    return quotient(system, sub)


def theta_series_tope_poly(L: Sequence[Sequence], witness: Sequence) -> PiPolynomial:
    """Tope polynomial of ``Σ_{γ reg} e^{2iπ<v,γ>} / ∏ <α,γ>`` as ``(2iπ)^{|L|}·p``."""
    if not L:
        raise ValidationError("empty list: the series is a Dirac comb, not a function")
    sysL = System(len(L[0]), tuple(tuple(v) for v in L))
    p = ber_tope_poly(sysL, witness)
    return PiPolynomial.single(len(L), p)


def poly_prefactor_series(P: MultiPoly, L: Sequence[Sequence], witness: Sequence) -> PiPolynomial:
    """Series of ``P(γ) / ∏ <α,γ>``: each monomial acts as ``(2iπ)^{-deg} ∂^deg``."""
    base = theta_series_tope_poly(L, witness)
    (k, p), = base.parts.items()
    out = PiPolynomial(p.nvars)
    for e, c in P.terms.items():
        mono = MultiPoly(P.nvars, {e: c})
        out = out + PiPolynomial.single(k - sum(e), apply_diff_operator(mono, p))
    return out


def fourier_partial_sum(system: System, v: Sequence, N: int, cesaro: bool = False) -> complex:
    """Partial sum of the defining series over ``|γ_i| <= N``.

    The series converges only conditionally when some multiplicity is one;
    ``cesaro`` applies Fejér weights ``∏(1 - |γ_i|/(N+1))`` in that case.
    """
    if not system.phi:
        raise ValidationError("empty Φ: the series is a Dirac comb")
    r = system.r
    v = np.array([float(x) for x in v])
    rng = np.arange(-N, N + 1)
    grids = np.meshgrid(*([rng] * r), indexing="ij")
    gam = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    phis = np.array(system.phi, dtype=float)
    pair = gam @ phis.T  # (m, |Φ|)
    mask = np.all(pair != 0, axis=1)
    gam, pair = gam[mask], pair[mask]
    denom = np.prod(2j * np.pi * pair, axis=1)
    terms = np.exp(2j * np.pi * (gam @ v)) / denom
    if cesaro:
        terms = terms * np.prod(1 - np.abs(gam) / (N + 1), axis=1)
    return complex(terms.sum())
