"""Jumps of Bernoulli tope polynomials across walls.

For a polynomial ``P`` on ``V``, a list ``Ψ`` and a covector ``E`` with
``<ψ, E> != 0`` the polynomial

    Pol(P, Ψ, E)(v) = Res_{z=0} [P(∂_x) e^{<v, x + zE>} / ∏_ψ <ψ, x + zE>]_{x=0}

is computed from a truncated Laurent expansion in ``z``.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence

from .arrangement import System, Tope, facet_witness, restrict, tope_of, wall_subspace
from .berseries import ber_tope_poly
from .errors import ValidationError
from .exactlinalg import dot, matvec
from .polynomials import MultiPoly


class TruncatedLaurent:
    """Finite sum ``Σ c[α, j] x^α z^j`` with x-degree at most ``xdeg``."""

    def __init__(self, nx: int, xdeg: int, terms: dict | None = None):
        self.nx = nx
        self.xdeg = xdeg
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def one(cls, nx: int, xdeg: int) -> "TruncatedLaurent":
        return cls(nx, xdeg, {((0,) * nx, 0): Fraction(1)})

    @classmethod
    def inverse_linear(cls, ell: Sequence, a, xdeg: int) -> "TruncatedLaurent":
        """``1 / (ℓ(x) + a z) = Σ_m (-1)^m ℓ(x)^m / (a z)^{m+1}``, truncated."""
        a = Fraction(a)
        if a == 0:
            raise ValidationError("covector vanishes on a list element")
        nx = len(ell)
        lin = MultiPoly.linear(list(ell))
        out: dict = {}
        power = MultiPoly.const(1, nx)
        for m in range(xdeg + 1):
            scale = Fraction((-1) ** m) / a ** (m + 1)
            for e, c in power.terms.items():
                key = (e, -(m + 1))
                out[key] = out.get(key, 0) + c * scale
            power = power * lin
        return cls(nx, xdeg, out)

    def __mul__(self, other: "TruncatedLaurent") -> "TruncatedLaurent":
        out: dict = {}
        for (e1, j1), c1 in self.terms.items():
            d1 = sum(e1)
            for (e2, j2), c2 in other.terms.items():
                if d1 + sum(e2) > self.xdeg:
                    continue
                key = (tuple(a + b for a, b in zip(e1, e2)), j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return TruncatedLaurent(self.nx, self.xdeg, out)

    def min_z(self) -> int:
        return min((j for _, j in self.terms), default=0)


def residue_pol(P: MultiPoly, psi: Sequence[Sequence], E: Sequence) -> MultiPoly:
    """``Pol(P, Ψ, E)`` as a polynomial in ``v`` (same variables as ``P``)."""
    r = P.nvars
    E = [Fraction(x) for x in E]
    D = max(P.degree(), 0)
    K = TruncatedLaurent.one(r, D)
    for p in psi:
        K = K * TruncatedLaurent.inverse_linear(p, dot(p, E), D)
    # [x^α] of e^{<v,x>} K, paired with p_α α!
    by_x: dict = {}
    for (e, j), c in K.terms.items():
        by_x.setdefault(e, []).append((j, c))
    ev = MultiPoly.linear(list(E))
    ev_powers = [MultiPoly.const(1, r)]
    result = MultiPoly.zero(r)
    for alpha, pa in P.terms.items():
        afact = 1
        for k in alpha:
            afact *= factorial(k)
        # split α = β + γ with v^β / β! from the exponential
        for gamma, zs in by_x.items():
            beta = tuple(a - g for a, g in zip(alpha, gamma))
            if any(b < 0 for b in beta):
                continue
            bfact = 1
            for k in beta:
                bfact *= factorial(k)
            vb = MultiPoly(r, {beta: Fraction(1, bfact)})
            # residue: z^j times <v,E>^n z^n / n! with j + n = -1
            zpart = MultiPoly.zero(r)
            for j, c in zs:
                n = -1 - j
                if n < 0:
                    continue
                while len(ev_powers) <= n:
                    ev_powers.append(ev_powers[-1] * ev)
                zpart = zpart + ev_powers[n] * (c / factorial(n))
            result = result + vb * zpart * (pa * afact)
    return result


def wall_extension(f_sub: MultiPoly, Qrows: Sequence[Sequence], shift: Sequence | None = None) -> MultiPoly:
    """Extend a polynomial given in wall coordinates: ``v ↦ f(Q (v - shift))``."""
    r = len(Qrows[0]) if Qrows else len(shift or ())
    b = None
    if shift is not None:
        b = [-x for x in matvec(Qrows, shift)] if Qrows else []
    return f_sub.compose_affine(Qrows, b, r)


def jump(system: System, t1, t2) -> MultiPoly:
    """``Ber(t1) - Ber(t2)`` for adjacent topes, via the residue formula."""
    if not isinstance(t1, Tope):
        t1 = tope_of(t1, system)
    if not isinstance(t2, Tope):
        t2 = tope_of(t2, system)
    wall, p, k = facet_witness(system, t1, t2)
    i = system.walls.index(wall)
    E = wall.E if t1.key[i] > t2.key[i] else tuple(-x for x in wall.E)
    sub = wall_subspace(system, wall)
    ind = restrict(system, sub)
    ch = ind.chart
    lam0 = ch.lift(matvec(ch.P, p))
    w_sub = matvec(ch.Q, [a - b for a, b in zip(p, lam0)])
    f_sub = ber_tope_poly(ind.system, w_sub)
    r = system.r
    P = wall_extension(f_sub, ch.Q) if ch.Q else MultiPoly.const(f_sub.constant_term(), r)
    psi = [system.phi[j] for j in range(len(system.phi)) if j not in ind.indices]
    pol = residue_pol(P, psi, E)
    return pol.translate([-x for x in lam0])


def jump_by_difference(system: System, t1, t2) -> MultiPoly:
    return ber_tope_poly(system, t1) - ber_tope_poly(system, t2)
