"""Numerical check of the multidimensional Euler-MacLaurin formula

    Σ_{λ ∈ Z^r} f(λ) = Σ_s (-1)^{|Φ \\ s|} ∫_V B(Φ/s)(P v) (∏_{φ ∉ s} ∂_φ f)(v) dv

over admissible subspaces ``s``, for ``f`` a polynomial times a Gaussian.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arrangement import AdmissibleSubspace, InducedSystem, System, admissible_subspaces, cell_topes, quotient
from .berseries import ber_tope_poly
from .errors import ValidationError
from .exactlinalg import matvec
from .polynomials import MultiPoly


@dataclass(frozen=True)
class TestFunction:
    """``f(v) = p(v) exp(-a (v-c)^T M (v-c))`` with exact polynomial part.

    ``M`` defaults to the identity; a positive definite ``metric`` lets a
    Gaussian that is round in other coordinates be written in lattice ones.
    """

    __test__ = False  # not a pytest class

    p: MultiPoly
    center: tuple
    a: Fraction
    metric: tuple | None = None

    def __post_init__(self):
        a = Fraction(self.a)
        if a <= 0:
            raise ValidationError("Gaussian width must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "center", tuple(Fraction(x) for x in self.center))
        if len(self.center) != self.p.nvars:
            raise ValidationError("centre dimension does not match the polynomial")
        if self.metric is not None:
            M = tuple(tuple(Fraction(x) for x in row) for row in self.metric)
            if len(M) != len(self.center) or any(len(row) != len(M) for row in M):
                raise ValidationError("metric has the wrong shape")
            if any(M[i][j] != M[j][i] for i in range(len(M)) for j in range(i)):
                raise ValidationError("metric is not symmetric")
            if np.any(np.linalg.eigvalsh(np.array(M, dtype=float)) <= 0):
                raise ValidationError("metric is not positive definite")
            object.__setattr__(self, "metric", M)

    @classmethod
    def gaussian(cls, r: int, a=1, center: Sequence | None = None) -> "TestFunction":
        return cls(MultiPoly.const(1, r), tuple(center or [0] * r), a)

    def derivative(self, direction: Sequence) -> "TestFunction":
        """``∂_φ f``: the polynomial becomes ``∂_φ p - 2a φ^T M (v - c) p``."""
        d = [Fraction(x) for x in direction]
        if self.metric is not None:
            d_m = [sum(d[i] * self.metric[i][j] for i in range(len(d))) for j in range(len(d))]
        else:
            d_m = d
        shifted = MultiPoly.linear(d_m, -sum(x * c for x, c in zip(d_m, self.center)))
        newp = self.p.directional(d) - shifted * self.p * (2 * self.a)
        return TestFunction(newp, self.center, self.a, self.metric)

    def derivatives(self, directions: Sequence[Sequence]) -> "TestFunction":
        out = self
        for d in directions:
            out = out.derivative(d)
        return out

    def eval_numpy(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        c = np.array([float(x) for x in self.center])
        diff = pts - c
        if self.metric is None:
            sq = np.sum(diff ** 2, axis=-1)
        else:
            sq = np.einsum("...i,ij,...j->...", diff, np.array(self.metric, dtype=float), diff)
        return self.p.eval_numpy(pts) * np.exp(-float(self.a) * sq)


@dataclass(frozen=True)
class EMTerm:
    sub: AdmissibleSubspace
    sign: int
    quotient: InducedSystem


def em_terms(system: System) -> list[EMTerm]:
    """One term per admissible subspace with sign ``(-1)^{|Φ \\ s|}``."""
    system.require_spanning()
    out = []
    for sub in admissible_subspaces(system):
        qs = quotient(system, sub)
        out.append(EMTerm(sub, (-1) ** len(qs.indices), qs))
    return out


@dataclass
class EMConfig:
    """Truncation and quadrature settings for :func:`em_verify`."""

    lattice_radius: int = 8
    quad_order: int = 24


@dataclass
class EMReport:
    lhs: float
    rhs: float
    abs_error: float
    terms: list = field(default_factory=list)  # (subspace key, sign, value)


def _simplex_rule(verts: Sequence[Sequence], order: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed Gauss-Legendre nodes and weights on a simplex."""
    V = np.array([[float(x) for x in v] for v in verts])
    d = V.shape[0] - 1
    x, w = np.polynomial.legendre.leggauss(order)
    x = (x + 1) / 2
    w = w / 2
    p0 = V[0]
    edges = V[1:] - p0
    vol = abs(np.linalg.det(edges)) if d else 1.0
    pts, wts = [], []
    for idx in itertools.product(range(order), repeat=d):
        u = x[list(idx)]
        weight = np.prod(w[list(idx)])
        coeff = np.empty(d)
        rem = 1.0
        jac = 1.0
        for k in range(d):
            coeff[k] = rem * u[k]
            jac *= rem  # Duffy jacobian
            rem *= 1 - u[k]
        pts.append(p0 + coeff @ edges)
        wts.append(weight * jac * vol)
    return np.array(pts), np.array(wts)


def _cell_rules(system: System, order: int):
    rules = []
    for tope, poly in cell_topes(system):
        pts, wts = [], []
        for simplex in poly.triangulate():
            p, w = _simplex_rule(simplex, order)
            pts.append(p)
            wts.append(w)
        rules.append((tope, np.concatenate(pts), np.concatenate(wts)))
    return rules


def _periodized(g: TestFunction, pts: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    total = np.zeros(len(pts))
    for chunk in np.array_split(shifts, max(1, len(shifts) // 512)):
        allp = (pts[:, None, :] + chunk[None, :, :]).reshape(-1, pts.shape[1])
        total += g.eval_numpy(allp).reshape(len(pts), len(chunk)).sum(axis=1)
    return total


def em_verify(system: System, f: TestFunction, config: EMConfig | None = None) -> EMReport:
    """Compare the truncated lattice sum with the signed sum of integrals."""
    config = config or EMConfig()
    system.require_spanning()
    r = system.r
    R = config.lattice_radius
    pts = np.array(list(itertools.product(range(-R, R + 1), repeat=r)), dtype=float)
    lhs = float(f.eval_numpy(pts).sum())
    shifts = np.array(list(itertools.product(range(-R, R), repeat=r)), dtype=float)
    rules = _cell_rules(system, config.quad_order)
    rhs = 0.0
    report_terms = []
    for term in em_terms(system):
        qs = term.quotient
        g = f.derivatives([system.phi[i] for i in qs.indices])
        P = qs.chart.P
        value = 0.0
        for tope, nodes, wts in rules:
            w0 = tuple(matvec(P, tope.witness)) if P else ()
            ber = ber_tope_poly(qs.system, w0)
            bv = ber.compose_affine(P, None, r) if P else MultiPoly.const(ber.constant_term(), r)
            value += float(np.sum(wts * bv.eval_numpy(nodes) * _periodized(g, nodes, shifts)))
        value *= term.sign
        report_terms.append((term.sub.rref, term.sign, value))
        rhs += value
    return EMReport(lhs, rhs, abs(lhs - rhs), report_terms)
