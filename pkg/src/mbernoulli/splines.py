"""Multivariate splines, convolutions with subspace densities, and the
decomposition of a Bernoulli series into affine-subspace terms.

Densities are taken with respect to the Lebesgue measure giving volume one
to the unit cube of ``Z^r`` (canonical coordinates).  On an admissible
affine subspace ``a = λ + s`` the chart ``c = Q (x - λ)`` identifies
``Z^r ∩ s`` with ``Z^d``, and ``P`` maps ``V/s`` onto ``Q^{r-d}`` with
``P Z^r = Z^{r-d}``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arrangement import (
    AdmissibleSubspace, System, admissible_subspaces, restrict, tope_of,
)
from .berseries import ber_tope_poly
from .errors import GenericityError, SpanError, ValidationError
from .exactlinalg import (
    SubspaceChart, det, dot, from_columns, identity, independent_subset, inverse, matmul,
    fmt_vec, matvec, primitive_equation, rank_of_vectors, solve, transpose,
)
from .polynomials import MultiPoly, monomials_up_to, poly_from_values
from .polytope import Polytope


# ---------------------------------------------------------------------------
# splines


def find_polarizer(X: Sequence[Sequence]) -> tuple | None:
    """A covector ``u`` with ``<x, u> >= 1`` for all x, or None if the cone is not pointed.

    ``X`` must span.  The feasible region, when nonempty, has a vertex cut
    out by ``r`` tight constraints, so trying all independent r-subsets is exact.
    """
    r = len(X[0])
    for sub in itertools.combinations(range(len(X)), r):
        rows = [X[i] for i in sub]
        if det(rows) == 0:
            continue
        u = solve(rows, [1] * r)
        if all(dot(x, u) >= 1 for x in X):
            return u
    return None


def _cone_walls(X: Sequence[Sequence]) -> list[tuple]:
    r = len(X[0])
    out = set()
    if r == 1:
        return [(1,)]
    for sub in itertools.combinations(X, r - 1):
        if rank_of_vectors(list(sub)) == r - 1:
            out.add(primitive_equation(list(sub), r))
    return sorted(out)


def _fiber_integral(psi: Sequence[Sequence], target: Sequence, proj: Sequence[Sequence] | None,
                    integrand, J: Sequence[int] | None = None) -> Fraction:
    """``(1/|det projψ_J|) ∫ integrand(t_free)`` over the fiber
    ``{t >= 0 : Σ t_i proj ψ_i = target}``, parametrised by ``t`` outside ``J``.

    ``integrand`` maps (free variable count, affine images of every t_i) to a
    MultiPoly in the free variables.
    """
    q = len(psi)
    pimg = [tuple(matvec(proj, p)) if proj is not None else tuple(p) for p in psi]
    k = len(target)
    if J is None:
        J = independent_subset(pimg)
    J = list(J)
    if len(J) != k or (k and rank_of_vectors([pimg[j] for j in J]) != k):
        raise SpanError("no basis of the quotient among the projected list")
    free = [i for i in range(q) if i not in J]
    m = len(free)
    if k:
        M = from_columns([pimg[j] for j in J])
        Minv = inverse(M)
        idx = abs(det(M))
    else:
        Minv = ()
        idx = Fraction(1)
    # t_J = Minv (target - Σ_free t_i pimg_i): affine forms in the free variables
    tforms = [None] * q
    for pos, i in enumerate(free):
        tforms[i] = MultiPoly.var(pos, m)
    base = matvec(Minv, target) if k else ()
    for row_pos, j in enumerate(J):
        coeffs = []
        for i in free:
            coeffs.append(-dot(Minv[row_pos], pimg[i]))
        tforms[j] = MultiPoly.linear(coeffs, base[row_pos]) if m else MultiPoly.const(base[row_pos], 0)
    # constraints t_i >= 0 written as A y <= b
    A, b = [], []
    for i in range(q):
        form = tforms[i]
        A.append(tuple(-form.coefficient(tuple(int(a == c) for a in range(m))) for c in range(m)))
        b.append(form.constant_term())
    poly = Polytope(A, b, m)
    g = integrand(m, tforms)
    return poly.integrate(g) / idx


def spline_eval(X: Sequence[Sequence], v: Sequence) -> Fraction:
    """Density of ``T(X)``: the push-forward of ``dt`` on ``R_{>=0}^X`` by ``t ↦ Σ t_i x_i``."""
    X = [tuple(Fraction(a) for a in x) for x in X]
    v = tuple(Fraction(a) for a in v)
    if not X:
        raise SpanError("empty list: T is a Dirac mass")
    r = len(X[0])
    if rank_of_vectors(X) != r:
        raise SpanError("list does not span: T has no density")
    if find_polarizer(X) is None:
        raise ValidationError("cone generated by the list is not pointed")
    for E in _cone_walls(X):
        if dot(E, v) == 0:
            raise GenericityError("point lies on a wall of the spline", suggestion=None)
    return _fiber_integral(X, v, None, lambda m, tf: MultiPoly.const(1, m))


def polarize(X: Sequence[Sequence], u: Sequence) -> tuple[list[tuple], int]:
    """Flip elements with ``<x,u> < 0``; returns (flipped list, sign (-1)^{#flips})."""
    out, sign = [], 1
    for x in X:
        s = dot(x, u)
        if s == 0:
            raise GenericityError(f"covector is not polarizing: vanishes on {fmt_vec(x)}")
        if s > 0:
            out.append(tuple(x))
        else:
            out.append(tuple(-a for a in x))
            sign = -sign
    return out, sign


def polarized_spline_eval(X: Sequence[Sequence], u: Sequence, v: Sequence) -> Fraction:
    flipped, sign = polarize(X, u)
    return sign * spline_eval(flipped, v)


# ---------------------------------------------------------------------------
# scalar products


@dataclass(frozen=True)
class Gram:
    """Positive definite rational scalar product on ``Q^r``."""

    matrix: tuple

    def __post_init__(self):
        m = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        n = len(m)
        if any(len(row) != n for row in m):
            raise ValidationError("Gram matrix must be square")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(n)):
            raise ValidationError("Gram matrix must be symmetric")
        for k in range(1, n + 1):
            if det([row[:k] for row in m[:k]]) <= 0:
                raise ValidationError("Gram matrix is not positive definite")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, r: int) -> "Gram":
        return cls(identity(r))

    def inner(self, a, b) -> Fraction:
        return dot(a, matvec(self.matrix, b))

    def covector(self, a) -> tuple:
        return matvec(self.matrix, a)


# ---------------------------------------------------------------------------
# affine terms


@dataclass(frozen=True)
class AffineTerm:
    """One summand ``Ber(Φ∩s, τ(β0)) * T(Φ\\s, β1)`` attached to ``a = λ + s``."""

    system: System
    sub: AdmissibleSubspace
    chart: SubspaceChart
    lam: tuple  # canonical representative R P λ
    mu: tuple  # P λ, the quotient lattice point
    beta: tuple
    beta0: tuple
    beta1: tuple
    u: tuple  # covector G β1
    density: MultiPoly = field(compare=False)  # in chart coordinates c = Q(x - λ)
    psi: tuple = field(compare=False)  # polarized Φ \ s
    sign: int = 1

    @property
    def key(self) -> tuple:
        return (self.sub.dim, self.sub.rref, self.mu)

    def describe(self) -> str:
        names = [f"e{i + 1}" for i in range(self.system.r)]

        def vec(v):
            parts = []
            for c, n in zip(v, names):
                if c == 0:
                    continue
                coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
                parts.append(f"{coef}{n}")
            return "+".join(parts).replace("+-", "-") or "0"

        if self.sub.dim == 0:
            return "{" + str(tuple(int(x) for x in self.lam)) + "}"
        if self.sub.dim == self.system.r:
            return "V"
        span = ", ".join(vec(s) for s in self.chart.S)
        base = f"R({span})" if self.sub.dim == 1 else f"span({span})"
        if not any(self.lam):
            return base
        shift = vec(self.lam)
        return f"{base} - {shift[1:]}" if shift.startswith("-") else f"{base} + {shift}"

    def evaluate(self, v: Sequence, J: Sequence[int] | None = None) -> Fraction:
        return self.sign * conv_eval(self.chart, self.lam, self.density, self.psi, v, J)

    def supports(self, v: Sequence) -> bool:
        """Exact test ``v ∈ a + cone(ψ)``."""
        target = matvec(self.chart.P, [a - b for a, b in zip(v, self.lam)])
        if not self.psi:
            return all(x == 0 for x in target)
        try:
            poly = _support_polytope(self.psi, target, self.chart.P)
        except SpanError:
            return False
        return bool(poly.vertices())


def _support_polytope(psi, target, proj) -> Polytope:
    pimg = [tuple(matvec(proj, p)) for p in psi]
    J = independent_subset(pimg)
    if len(J) != len(target):
        raise SpanError("projected list does not span")
    free = [i for i in range(len(psi)) if i not in J]
    m = len(free)
    M = from_columns([pimg[j] for j in J]) if J else ()
    Minv = inverse(M) if J else ()
    base = matvec(Minv, target) if J else ()
    A, b = [], []
    for i in range(len(psi)):
        if i in free:
            row = [Fraction(0)] * m
            row[free.index(i)] = Fraction(-1)
            A.append(tuple(row))
            b.append(Fraction(0))
        else:
            pos = J.index(i)
            A.append(tuple(dot(Minv[pos], pimg[f]) for f in free))
            b.append(base[pos])
    return Polytope(A, b, m)


def conv_eval(chart: SubspaceChart, lam: Sequence, f: MultiPoly, psi: Sequence[Sequence],
              v: Sequence, J: Sequence[int] | None = None) -> Fraction:
    """Density at ``v`` of ``(f on λ + s) * T(ψ)`` for an already polarized list ψ.

    ``f`` is written in the chart coordinates ``c = Q (x - λ)``; the result is
    ``(1/|det Pψ_J|) ∫ f(Q(v - λ - Σ t_i ψ_i)) dt_free`` over the fiber
    polytope, with ``t_J`` eliminated through the ``V/s`` component.
    """
    v = [Fraction(x) for x in v]
    lam = [Fraction(x) for x in lam]
    rel = [a - b for a, b in zip(v, lam)]
    target = matvec(chart.P, rel)
    Qrows = chart.Q
    d = len(Qrows)

    def integrand(m, tforms):
        # x = rel - Σ t_i ψ_i, then c = Q x
        images = []
        for row in Qrows:
            c = MultiPoly.const(dot(row, rel), m)
            for ti, p in zip(tforms, psi):
                coef = dot(row, p)
                if coef:
                    c = c - ti * coef
            images.append(c)
        return f.substitute(images, m)

    if not psi:
        if any(x != 0 for x in target):
            return Fraction(0)
        return f.eval(matvec(Qrows, rel)) if d else f.constant_term()
    return _fiber_integral(psi, target, chart.P, integrand, J)


def _chart(system: System, sub: AdmissibleSubspace) -> SubspaceChart:
    return SubspaceChart.build(list(sub.basis), system.r)


def _project_orthogonal(chart: SubspaceChart, gram: Gram, lam, beta) -> tuple:
    """G-orthogonal projection of β on λ + s."""
    if not chart.S:
        return tuple(lam)
    S = from_columns(chart.S)
    G = gram.matrix
    StG = matmul(transpose(S), G)
    c = solve(matmul(StG, S), matvec(StG, [b - l for b, l in zip(beta, lam)]))
    return tuple(l + x for l, x in zip(lam, matvec(S, c)))


def _suggest(beta: Sequence, check) -> tuple | None:
    r = len(beta)
    dirs = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    dirs.append(tuple(1 for _ in range(r)))
    for k in range(1, 12):
        eps = Fraction(1, 2 ** k * 97)
        for dvec in dirs:
            cand = tuple(b + eps * x for b, x in zip(beta, dvec))
            if check(cand):
                return cand
    return None


def affine_term(system: System, sub: AdmissibleSubspace, lam: Sequence, beta: Sequence,
                gram: Gram | None = None) -> AffineTerm:
    """Build the term of ``a = λ + s`` for the generic point β."""
    r = system.r
    gram = gram or Gram.identity(r)
    beta = tuple(Fraction(x) for x in beta)
    lam = tuple(Fraction(x) for x in lam)
    if any(x.denominator != 1 for x in lam):
        raise ValidationError("λ must be a lattice point")
    ind = restrict(system, sub)
    ch = ind.chart
    mu = tuple(matvec(ch.P, lam))
    lam_c = tuple(ch.lift(mu))
    beta0 = _project_orthogonal(ch, gram, lam_c, beta)
    beta1 = tuple(a - b for a, b in zip(beta0, beta))
    u = gram.covector(beta1)
    others = [i for i in range(len(system.phi)) if i not in ind.indices]
    w_sub = tuple(matvec(ch.Q, [a - b for a, b in zip(beta0, lam_c)])) if ch.Q else ()

    def ok(b):
        try:
            _genericity(system, sub, lam, b, gram)
            return True
        except GenericityError:
            return False

    bad = [system.phi[i] for i in others if dot(system.phi[i], u) == 0]
    if bad:
        span = "span{" + ", ".join(map(fmt_vec, sub.basis)) + "}" if sub.basis else "{0}"
        raise GenericityError(
            f"β1 is not polarizing for Φ\\s: <{fmt_vec(bad[0])}, Gβ1> = 0 on {span} + {fmt_vec(lam_c)}",
            suggestion=_suggest(beta, ok))
    try:
        density = ber_tope_poly(ind.system, w_sub)
    except ValidationError as exc:
        raise GenericityError(f"β0 is not in a tope of the affine subspace: {exc}",
                              suggestion=_suggest(beta, ok)) from None
    psi, sign = polarize([system.phi[i] for i in others], u)
    return AffineTerm(system, sub, ch, lam_c, mu, beta, beta0, beta1, tuple(u), density,
                      tuple(psi), sign)


def _genericity(system, sub, lam, beta, gram):
    ind = restrict(system, sub)
    ch = ind.chart
    mu = tuple(matvec(ch.P, lam))
    lam_c = tuple(ch.lift(mu))
    beta0 = _project_orthogonal(ch, gram, lam_c, beta)
    beta1 = tuple(a - b for a, b in zip(beta0, beta))
    u = gram.covector(beta1)
    for i in range(len(system.phi)):
        if i not in ind.indices and dot(system.phi[i], u) == 0:
            raise GenericityError("not polarizing")
    if ch.Q:
        w = tuple(matvec(ch.Q, [a - b for a, b in zip(beta0, lam_c)]))
        try:
            tope_of(w, ind.system)
        except ValidationError:
            raise GenericityError("β0 on a wall") from None


def quotient_gram(chart: SubspaceChart, gram: Gram) -> tuple:
    """Scalar product of ``V/s`` in the coordinates ``P``: ``R^T π^T G π R``."""
    r = chart.r
    G = gram.matrix
    if chart.S:
        S = from_columns(chart.S)
        StG = matmul(transpose(S), G)
        proj_s = matmul(S, matmul(inverse(matmul(StG, S)), StG))
        pi = tuple(tuple(int(i == j) - proj_s[i][j] for j in range(r)) for i in range(r))
    else:
        pi = identity(r)
    if not chart.R:
        return ()
    R = from_columns(chart.R)
    PR = matmul(pi, R)
    return matmul(transpose(PR), matmul(G, PR))


def _thales_points(chart: SubspaceChart, gram: Gram, beta, v, radius) -> list[tuple]:
    """Lattice points μ of ``V/s`` with ``<μ - Pβ, μ - Pv>_G < 0``."""
    k = chart.r - len(chart.S)
    if k == 0:
        return [()]
    G0 = quotient_gram(chart, gram)
    pb = matvec(chart.P, beta)
    pv = matvec(chart.P, v)
    centre = [(a + b) / 2 for a, b in zip(pb, pv)]
    diff = [a - b for a, b in zip(pv, pb)]
    rho2 = dot(diff, matvec(G0, diff)) / 4
    G0inv = inverse(G0)
    ranges = []
    for i in range(k):
        half = math.sqrt(float(rho2 * G0inv[i][i])) + 1
        lo = math.floor(float(centre[i]) - half)
        hi = math.ceil(float(centre[i]) + half)
        if radius is not None:
            lo = max(lo, math.ceil(centre[i] - radius))
            hi = min(hi, math.floor(centre[i] + radius))
        ranges.append(range(lo, hi + 1))
    out = []
    for mu in itertools.product(*ranges):
        a = [m - b for m, b in zip(mu, pb)]
        b = [m - c for m, c in zip(mu, pv)]
        if dot(a, matvec(G0, b)) < 0:
            out.append(tuple(Fraction(x) for x in mu))
    return out


def contributing_affines(system: System, beta: Sequence, v: Sequence, radius=None,
                         gram: Gram | None = None) -> list[AffineTerm]:
    """Affine terms whose support contains ``v``, in deterministic order.

    Candidates are bounded automatically: a term can reach ``v`` only if its
    quotient lattice point lies in the open ball with diameter ``[Pβ, Pv]``.
    ``radius`` optionally restricts candidates further to a sup-norm box of
    that size around the ball's centre.
    """
    system.require_spanning()
    if radius is not None:
        radius = Fraction(radius)
        if radius <= 0:
            raise ValidationError("radius must be positive")
    r = system.r
    gram = gram or Gram.identity(r)
    beta = tuple(Fraction(x) for x in beta)
    v = tuple(Fraction(x) for x in v)
    out = []
    for sub in admissible_subspaces(system):
        ch = _chart(system, sub)
        for mu in _thales_points(ch, gram, beta, v, radius):
            lam = ch.lift(mu)
            term = affine_term(system, sub, lam, beta, gram)
            if term.supports(v):
                out.append(term)
    out.sort(key=lambda tm: (-tm.sub.dim, tm.sub.rref, tm.mu))
    return out


def decomposition_terms(system: System, beta, v, radius=None, gram=None) -> list[tuple[AffineTerm, Fraction]]:
    v = tuple(Fraction(x) for x in v)
    tope_of(v, system)
    return [(tm, tm.evaluate(v)) for tm in contributing_affines(system, beta, v, radius, gram)]


def decomposition_eval(system: System, beta, v, radius=None, gram=None) -> Fraction:
    """``Σ_a A(Φ, a, β)(v)``; equals the Bernoulli series at regular ``v``."""
    return sum((val for _, val in decomposition_terms(system, beta, v, radius, gram)), Fraction(0))


def term_polynomial(term: AffineTerm, v: Sequence, degree: int | None = None) -> MultiPoly:
    """The polynomial agreeing with the term near the regular point ``v``.

    Recovered by exact interpolation on a small principal lattice around v,
    shrunk until every node lies in the tope of v.
    """
    system = term.system
    r = system.r
    v = tuple(Fraction(x) for x in v)
    tp = tope_of(v, system)
    D = degree if degree is not None else len(system.phi)
    monos = monomials_up_to(r, D)
    delta = Fraction(1, 4 * (D + 1))
    for _ in range(40):
        pts = [tuple(x + delta * a for x, a in zip(v, e)) for e in monos]
        try:
            same = all(tope_of(p, system) == tp for p in pts)
        except ValidationError:
            same = False
        if same:
            vals = [term.evaluate(p) for p in pts]
            return poly_from_values(pts, vals, monos)
        delta /= 2
    raise GenericityError("could not fit an interpolation stencil inside the tope")
