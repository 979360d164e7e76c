"""Affine multiple Bernoulli series

    B(Φ~)(v) = Σ_{γ : <φ_j,γ> + z_j != 0} e^{2iπ<v,γ>} / ∏_j 2iπ(<φ_j,γ> + z_j)

for pairs ``[φ_j, z_j]`` with rational ``z_j``.  On each tope the series is an
exponential polynomial; this module computes it with complex double
coefficients.  Partial fractions stay exact: for affine forms
``ℓ_α = Σ c_i ℓ_i + δ`` the constant ``δ`` is rational.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, pi
from typing import Sequence

from .berseries import _parallel_factor, _chart_for, integralize
from .errors import NotAdjacentError, SpanError, ValidationError
from .exactlinalg import (
    coset_representatives, direction_key, dot, floor_q, from_columns, independent_subset,
    inverse, is_integral, matvec, rank_of_vectors, solve, solve_in_span, transpose,
)
from .polynomials import MultiPoly, bernoulli_affine

TWO_PI_I = 2j * pi


@dataclass(frozen=True)
class AffinePair:
    """The pair ``[φ, z]``: the affine form ``γ ↦ <φ, γ> + z``."""

    phi: tuple
    z: Fraction = Fraction(0)

    def __post_init__(self):
        phi = tuple(Fraction(x) for x in self.phi)
        if not any(phi):
            raise ValidationError("zero vector in affine list")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "z", Fraction(self.z))


# ---------------------------------------------------------------------------
# exponential polynomials


def _cmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return out


def _cadd(p: dict, q: dict, s=1) -> dict:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + s * c
    return out


def _from_multipoly(p: MultiPoly) -> dict:
    return {e: complex(c) for e, c in p.terms.items()}


class ExpPolyC:
    """``Σ_w e^{2iπ<w,v>} p_w(v)`` with rational frequencies ``w`` and complex ``p_w``."""

    def __init__(self, nvars: int, parts: dict | None = None):
        self.nvars = nvars
        self.parts = {w: p for w, p in (parts or {}).items() if p}

    @classmethod
    def zero(cls, nvars: int) -> "ExpPolyC":
        return cls(nvars)

    @classmethod
    def const(cls, c, nvars: int) -> "ExpPolyC":
        return cls(nvars, {(Fraction(0),) * nvars: {(0,) * nvars: complex(c)}})

    @classmethod
    def term(cls, freq: Sequence, poly, coef=1) -> "ExpPolyC":
        """``coef · e^{2iπ<freq,v>} · poly`` with ``poly`` a MultiPoly or complex dict."""
        if isinstance(poly, MultiPoly):
            n = poly.nvars
            poly = _from_multipoly(poly)
        else:
            n = len(freq)
        poly = {e: c * coef for e, c in poly.items()}
        return cls(n, {tuple(Fraction(x) for x in freq): poly})

    def __add__(self, other: "ExpPolyC") -> "ExpPolyC":
        parts = dict(self.parts)
        for w, p in other.parts.items():
            parts[w] = _cadd(parts.get(w, {}), p)
        return ExpPolyC(self.nvars, parts)

    def __neg__(self) -> "ExpPolyC":
        return self.scale(-1)

    def __sub__(self, other: "ExpPolyC") -> "ExpPolyC":
        return self + (-other)

    def scale(self, c) -> "ExpPolyC":
        return ExpPolyC(self.nvars, {w: {e: x * c for e, x in p.items()} for w, p in self.parts.items()})

    def __mul__(self, other):
        if not isinstance(other, ExpPolyC):
            return self.scale(other)
        parts: dict = {}
        for w1, p1 in self.parts.items():
            for w2, p2 in other.parts.items():
                w = tuple(a + b for a, b in zip(w1, w2))
                parts[w] = _cadd(parts.get(w, {}), _cmul(p1, p2))
        return ExpPolyC(self.nvars, parts)

    __rmul__ = __mul__

    def frequencies(self) -> list[tuple]:
        return sorted(self.parts)

    def eval(self, v: Sequence) -> complex:
        v = [float(x) for x in v]
        total = 0j
        for w, p in self.parts.items():
            s = 0j
            for e, c in p.items():
                m = c
                for x, k in zip(v, e):
                    m *= x ** k
                s += m
            total += cmath.exp(TWO_PI_I * sum(float(a) * x for a, x in zip(w, v))) * s
        return total

    def diff(self, direction: Sequence) -> "ExpPolyC":
        """Directional derivative along ``direction``."""
        d = [Fraction(x) for x in direction]
        parts: dict = {}
        for w, p in self.parts.items():
            out = {e: c * TWO_PI_I * float(dot(w, d)) for e, c in p.items()}
            for e, c in p.items():
                for i, k in enumerate(e):
                    if k and d[i]:
                        e2 = list(e)
                        e2[i] -= 1
                        e2 = tuple(e2)
                        out[e2] = out.get(e2, 0) + c * k * float(d[i])
            parts[w] = out
        return ExpPolyC(self.nvars, parts)

    def compose_linear(self, M: Sequence[Sequence], nnew: int) -> "ExpPolyC":
        """``v ↦ f(M v)`` for an ``nvars × nnew`` rational matrix ``M``."""
        rows = [MultiPoly.linear(list(row)) for row in M]
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = _from_multipoly(rows[i] ** k)
            return cache[key]

        MT = transpose(M) if M else [[] for _ in range(nnew)]
        parts: dict = {}
        for w, p in self.parts.items():
            w2 = tuple(dot(col, w) for col in MT) if M else (Fraction(0),) * nnew
            acc: dict = {}
            for e, c in p.items():
                mono = {(0,) * nnew: c}
                for i, k in enumerate(e):
                    if k:
                        mono = _cmul(mono, power(i, k))
                acc = _cadd(acc, mono)
            parts[w2] = _cadd(parts.get(w2, {}), acc)
        return ExpPolyC(nnew, parts)

    def close_to(self, other: "ExpPolyC", tol: float = 1e-10) -> bool:
        diff = self - other
        return all(abs(c) <= tol for p in diff.parts.values() for c in p.values())

    def __repr__(self):
        return f"ExpPolyC({self.nvars}, {self.parts})"


# ---------------------------------------------------------------------------
# one-dimensional closed forms


def _one_minus_q(z: Fraction) -> complex:
    """``1 - e^{-2iπz}`` without cancellation for small z."""
    th = 2 * pi * float(z)
    return complex(2 * math.sin(th / 2) ** 2, math.sin(th))


def _inverse_series(z: Fraction, m: int) -> list[complex]:
    """Taylor coefficients of ``1 / (1 - q e^u)``, ``q = e^{-2iπz}``, up to ``u^m``."""
    q = cmath.exp(-TWO_PI_I * float(z))
    g = [_one_minus_q(z)] + [-q / factorial(j) for j in range(1, m + 1)]
    c = [1 / g[0]]
    for j in range(1, m + 1):
        c.append(-sum(g[i] * c[j - i] for i in range(1, j + 1)) / g[0])
    return c


def _affine_factor(k: int, z: Fraction, row: Sequence, shift: Fraction, witness: Sequence) -> ExpPolyC:
    """``F_{k,z}(<row,v> - shift)`` on the interval containing the witness, where
    ``F_{k,z}(t) = Σ_{n+z != 0} e^{2iπnt} / (2iπ(n+z))^k``."""
    r = len(row)
    t_w = dot(row, witness) - shift
    if t_w.denominator == 1:
        raise ValidationError("witness lies on a wall")
    m = floor_q(t_w)
    form = MultiPoly.linear(list(row), -shift - m)  # t - m, in [0, 1)
    freq = [-z * x for x in row]
    phase = cmath.exp(TWO_PI_I * float(z * (shift + m)))
    if z.denominator == 1:
        poly = bernoulli_affine(k, form) * Fraction(-1, factorial(k))
        return ExpPolyC.term(freq, poly, phase)
    c = _inverse_series(z, k - 1)
    acc: dict = {}
    pw = MultiPoly.const(1, r)
    for j in range(k):
        acc = _cadd(acc, _from_multipoly(pw), c[k - 1 - j] / factorial(j))
        pw = pw * form
    return ExpPolyC(r, {tuple(freq): {e: x * phase for e, x in acc.items()}})


def affine_1d(k: int, z, witness) -> ExpPolyC:
    """``B([[ω, z]] * k, Zω)`` on the tope containing ``t = witness`` (t in units of ω)."""
    if k < 1:
        raise ValidationError("k must be positive")
    return _affine_factor(k, Fraction(z), (Fraction(1),), Fraction(0), (Fraction(witness),))


def affine_jump_1d(z, t_plus, t_minus, k: int = 1) -> ExpPolyC:
    """Jump ``B(τ+) - B(τ-)`` of ``B([[ω, z]] * k)`` across the integer between the topes:
    ``e^{-2iπz(t-n)} (t-n)^{k-1} / (k-1)!``."""
    z = Fraction(z)
    tp, tm = Fraction(t_plus), Fraction(t_minus)
    if tp.denominator == 1 or tm.denominator == 1:
        raise ValidationError("witness lies on a wall")
    n = floor_q(tp)
    if floor_q(tm) != n - 1:
        raise NotAdjacentError("topes are not adjacent with t+ above t-")
    form = MultiPoly.linear([1], -n)
    poly = form ** (k - 1) * Fraction(1, factorial(k - 1))
    return ExpPolyC.term([-z], poly, cmath.exp(TWO_PI_I * float(z * n)))


# ---------------------------------------------------------------------------
# affine partial fractions


def _proportional(a: tuple, b: tuple) -> bool:
    c = _parallel_factor(a[0], b[0])
    return c is not None and a[1] == c * b[1]


@lru_cache(maxsize=None)
def _eliminate_affine(sigma: tuple, n: tuple, alpha: tuple, N: int) -> dict:
    """``θ(σ,n) / ℓ_α^N`` over atoms on bases; forms are ``(vector, z)``."""
    if N == 0:
        return {(sigma, n): Fraction(1)}
    c = solve_in_span([s[0] for s in sigma], alpha[0])
    delta = alpha[1] - sum(ci * s[1] for ci, s in zip(c, sigma))
    nz = [i for i, x in enumerate(c) if x != 0]
    out: dict = {}

    def add(d, coef):
        for key, v in d.items():
            out[key] = out.get(key, 0) + coef * v

    if delta == 0 and len(nz) == 1:
        # ℓ_α = c ℓ_i: merge into a higher power
        i = nz[0]
        n2 = list(n)
        n2[i] += N
        return {(sigma, tuple(n2)): 1 / c[i] ** N}
    if delta == 0:
        # 1 = Σ c_i ℓ_i / ℓ_α
        scale, first = Fraction(1), None
        sign = 1
    else:
        # 1 = (ℓ_α - Σ c_i ℓ_i) / δ
        scale, sign = 1 / delta, -1
        first = _eliminate_affine(sigma, n, alpha, N - 1)
        add(first, scale)
    Nn = N + 1 if delta == 0 else N
    for i in nz:
        coef = sign * scale * c[i]
        if n[i] == 1:
            s2 = list(sigma)
            s2[i] = alpha
            n2 = list(n)
            n2[i] = Nn
            key = (tuple(s2), tuple(n2))
            out[key] = out.get(key, 0) + coef
        else:
            n2 = list(n)
            n2[i] -= 1
            add(_eliminate_affine(sigma, tuple(n2), alpha, Nn), coef)
    return {k: v for k, v in out.items() if v != 0}


def affine_partial_fractions(L: Sequence[tuple]) -> list[tuple[Fraction, tuple, tuple]]:
    """``1/∏ ℓ`` for affine forms ``(vector, z)`` as ``Σ c / ∏ ℓ_i^{n_i}`` over bases."""
    L = [(tuple(int(x) for x in v), Fraction(z)) for v, z in L]
    r = len(L[0][0])
    if rank_of_vectors([v for v, _ in L]) != r:
        raise SpanError("vector parts do not span")
    distinct: list = []
    mult: dict = {}
    for f in L:
        if f not in mult:
            distinct.append(f)
            mult[f] = 0
        mult[f] += 1
    base = independent_subset([v for v, _ in distinct])
    sigma0 = tuple(distinct[i] for i in base)
    state = {(sigma0, tuple(mult[f] for f in sigma0)): Fraction(1)}
    for alpha in distinct:
        if alpha in sigma0:
            continue
        new: dict = {}
        for (sigma, n), coef in state.items():
            for key, c2 in _eliminate_affine(sigma, n, alpha, mult[alpha]).items():
                new[key] = new.get(key, 0) + coef * c2
        state = {k: v for k, v in new.items() if v != 0}
    return sorted(((c, s, n) for (s, n), c in state.items()), key=lambda x: (x[1], x[2]))


def _pf_value(L: Sequence[tuple], terms, g: Sequence) -> complex:
    """Evaluate both sides at a point, for checking the decomposition."""
    def form(f):
        return float(dot(f[0], g) + f[1])
    lhs = 1.0
    for f in L:
        lhs /= form(f)
    rhs = 0.0
    for c, s, n in terms:
        x = float(c)
        for f, k in zip(s, n):
            x /= form(f) ** k
        rhs += x
    return lhs, rhs


# ---------------------------------------------------------------------------
# series


@lru_cache(maxsize=None)
def _affine_independent(sigma: tuple, n: tuple, w: tuple) -> ExpPolyC:
    r = len(sigma)
    vecs = [s[0] for s in sigma]
    sinv = inverse(from_columns(vecs))
    reps = coset_representatives(vecs)
    total = ExpPolyC.zero(r)
    for lam in reps:
        term = ExpPolyC.const(1, r)
        for i in range(r):
            term = term * _affine_factor(n[i], sigma[i][1], sinv[i], dot(sinv[i], lam), w)
        total = total + term
    return total.scale(1 / len(reps))


@lru_cache(maxsize=None)
def _affine_atom(A: tuple, sigma: tuple, n: tuple, w: tuple) -> ExpPolyC:
    """Series of ``1/∏ (2iπ ℓ_i)^{n_i}`` over covectors regular for every form in ``A``."""
    r = len(w)
    if r == 0:
        return ExpPolyC.const(1, 0)
    a = next((f for f in A if not any(_proportional(f, s) for s in sigma)), None)
    if a is None:
        return _affine_independent(sigma, n, w)
    rest = tuple(f for f in A if not _proportional(f, a))
    main = _affine_atom(rest, sigma, n, w)
    p = direction_key(a[0])
    m = -a[1] / _parallel_factor(a[0], p)
    if m.denominator != 1:
        return main  # the form never vanishes on the lattice
    ch = _chart_for(p)
    y = ch.Q[0]
    y = [Fraction(x) / dot(y, p) for x in y]
    gz = [m * x for x in y]  # <p, γ_z> = m

    def project(f):
        return (tuple(int(x) for x in matvec(ch.P, f[0])), f[1] + dot(f[0], gz))

    A0 = tuple(g for g in map(project, rest) if any(g[0]))
    const = 1 + 0j
    L0 = []
    for s, k in zip(sigma, n):
        g = project(s)
        if any(g[0]):
            L0.extend([g] * k)
        else:
            const /= (TWO_PI_I * float(g[1])) ** k
    w0 = tuple(matvec(ch.P, w))
    corr = ExpPolyC.zero(r - 1)
    for c, s0, n0 in affine_partial_fractions(L0) if L0 else [(Fraction(1), (), ())]:
        weight = float(c) * TWO_PI_I ** (sum(n0) - len(L0))
        corr = corr + _affine_atom(A0, s0, n0, w0).scale(weight)
    corr = corr.compose_linear(ch.P, r) * ExpPolyC.term(gz, {(0,) * r: const})
    return main - corr


def _canonical(pairs: Sequence[AffinePair]) -> tuple[list[tuple], complex]:
    vecs, _ = integralize([p.phi for p in pairs])
    forms = []
    factor = 1.0
    for p, v in zip(pairs, vecs):
        c = _parallel_factor(p.phi, v)
        forms.append((tuple(int(x) for x in v), p.z / c))
        factor /= float(c)
    return forms, factor


def affine_tope(pairs: Sequence[AffinePair], witness: Sequence) -> ExpPolyC:
    """Exponential polynomial agreeing with ``B(Φ~)`` on the tope of the witness."""
    pairs = [p if isinstance(p, AffinePair) else AffinePair(*p) for p in pairs]
    w = tuple(Fraction(x) for x in witness)
    r = len(w)
    if not pairs:
        raise ValidationError("empty list: the series is a Dirac comb")
    if rank_of_vectors([p.phi for p in pairs]) != r:
        raise SpanError("vector parts do not span")
    forms, factor = _canonical(pairs)
    total = ExpPolyC.zero(r)
    A = tuple(forms)
    for c, s, n in affine_partial_fractions(forms):
        weight = float(c) * TWO_PI_I ** (sum(n) - len(forms))
        total = total + _affine_atom(A, s, n, w).scale(weight)
    return total.scale(factor)


def affine_eval(pairs: Sequence[AffinePair], v: Sequence, lattice_basis: Sequence[Sequence] | None = None) -> complex:
    """Value of ``B(Φ~, Λ)`` at a regular point.  Without ``lattice_basis`` the
    lattice is ``Z^r``; otherwise vectors and ``v`` are rewritten in its basis."""
    pairs = [p if isinstance(p, AffinePair) else AffinePair(*p) for p in pairs]
    if lattice_basis is not None:
        B = from_columns([[Fraction(x) for x in row] for row in lattice_basis])
        pairs = [AffinePair(tuple(solve(B, p.phi)), p.z) for p in pairs]
        v = solve(B, [Fraction(x) for x in v])
    return affine_tope(pairs, v).eval(v)


def affine_fourier_partial_sum(pairs: Sequence[AffinePair], v: Sequence, N: int, cesaro: bool = False) -> complex:
    """Truncated defining series over ``|γ_i| <= N`` (oracle for tests)."""
    import numpy as np

    pairs = [p if isinstance(p, AffinePair) else AffinePair(*p) for p in pairs]
    r = len(v)
    rng = np.arange(-N, N + 1)
    grids = np.meshgrid(*([rng] * r), indexing="ij")
    gam = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    phis = np.array([[float(x) for x in p.phi] for p in pairs])
    zs = np.array([float(p.z) for p in pairs])
    pair = gam @ phis.T + zs
    mask = np.all(np.abs(pair) > 1e-12, axis=1)
    gam, pair = gam[mask], pair[mask]
    terms = np.exp(TWO_PI_I * (gam @ np.array([float(x) for x in v]))) / np.prod(TWO_PI_I * pair, axis=1)
    if cesaro:
        terms = terms * np.prod(1 - np.abs(gam) / (N + 1), axis=1)
    return complex(terms.sum())


def gamma_z(pair: AffinePair) -> tuple | None:
    """Some ``γ ∈ Z^r`` with ``<φ,γ> + z = 0``, or None when there is none."""
    forms, _ = _canonical([pair])
    v, z = forms[0]
    p = direction_key(v)
    m = -z / _parallel_factor(v, p)
    if m.denominator != 1:
        return None
    ch = _chart_for(p)
    y = ch.Q[0]
    return tuple(m * Fraction(x) / dot(y, p) for x in y)


def recurrence_sides(pairs: Sequence[AffinePair], i: int, witness: Sequence) -> tuple[ExpPolyC, ExpPolyC]:
    """Both sides of ``(∂_φ + 2iπz) B(Φ~) = B(Φ~ - φ~) - e^{2iπ<v,γ_z>} B(Φ~_0)(v̄)``
    on the tope of the witness, for integral primitive ``φ = pairs[i].phi``."""
    pairs = [p if isinstance(p, AffinePair) else AffinePair(*p) for p in pairs]
    w = tuple(Fraction(x) for x in witness)
    r = len(w)
    target = pairs[i]
    if not is_integral(target.phi) or tuple(target.phi) != tuple(direction_key(target.phi)):
        raise ValidationError("recurrence check expects a primitive integral vector")
    lhs_b = affine_tope(pairs, w)
    lhs = lhs_b.diff(target.phi) + lhs_b.scale(TWO_PI_I * float(target.z))
    others = pairs[:i] + pairs[i + 1:]
    rhs = affine_tope(others, w) if others and rank_of_vectors([p.phi for p in others]) == r else None
    if rhs is None:
        # the remaining series is a distribution, not a function, unless it is empty
        if others:
            raise SpanError("removing the element leaves a non-spanning list")
        rhs = ExpPolyC.zero(r)
    gz = gamma_z(target)
    if gz is None:
        return lhs, rhs
    ch = _chart_for(tuple(int(x) for x in target.phi))
    const = 1 + 0j
    reduced = []
    for p in others:
        img = tuple(matvec(ch.P, p.phi))
        zz = p.z + dot(p.phi, gz)
        if any(img):
            reduced.append(AffinePair(img, zz))
        elif zz == 0:
            return lhs, rhs  # a parallel copy kills every correction term
        else:
            const /= TWO_PI_I * float(zz)
    if r == 1:
        corr = ExpPolyC.const(const, 0)
    else:
        corr = affine_tope(reduced, matvec(ch.P, w)).scale(const) if reduced else None
        if corr is None:
            raise SpanError("quotient list is empty: the correction is a Dirac comb")
    corr = corr.compose_linear(ch.P, r) * ExpPolyC.term(gz, {(0,) * r: 1})
    return lhs, rhs - corr
