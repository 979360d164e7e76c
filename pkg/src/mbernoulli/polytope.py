"""Exact rational polytopes: vertices, triangulation, polynomial integrals."""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial
from typing import Sequence

from .exactlinalg import det, rank, solve
from .polynomials import MultiPoly


def affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


class Polytope:
    """The set ``{x : A x <= b}`` in ``Q^d``, assumed bounded."""

    def __init__(self, A: Sequence[Sequence], b: Sequence, dim: int | None = None):
        self.A = [tuple(Fraction(x) for x in row) for row in A]
        self.b = [Fraction(x) for x in b]
        self.dim = dim if dim is not None else (len(self.A[0]) if self.A else 0)
        self._vertices = None

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        for row, bi in zip(self.A, self.b):
            s = sum(a * xi for a, xi in zip(row, x))
            if s > bi or (strict and s == bi):
                return False
        return True

    def vertices(self) -> list[tuple]:
        """Vertices in lexicographic order (exact, by brute force over d-subsets)."""
        if self._vertices is not None:
            return self._vertices
        d = self.dim
        found = set()
        if d == 0:
            if all(bi >= 0 for bi in self.b):
                found.add(())
        else:
            m = len(self.A)
            for idx in itertools.combinations(range(m), d):
                sub = [self.A[i] for i in idx]
                if det(sub) == 0:
                    continue
                x = solve(sub, [self.b[i] for i in idx])
                if self.contains(x):
                    found.add(tuple(x))
        self._vertices = sorted(found)
        return self._vertices

    def tight(self, x: Sequence) -> frozenset:
        return frozenset(i for i, (row, bi) in enumerate(zip(self.A, self.b))
                         if sum(a * xi for a, xi in zip(row, x)) == bi)

    def is_full_dimensional(self) -> bool:
        vs = self.vertices()
        return len(vs) > self.dim and affine_rank(vs) == self.dim

    def triangulate(self) -> list[list[tuple]]:
        """Pulling triangulation; each simplex is a list of ``dim + 1`` vertices.

        Returns an empty list when the polytope is not full dimensional.
        """
        vs = self.vertices()
        d = self.dim
        if d == 0:
            return [[()]] if vs else []
        if not self.is_full_dimensional():
            return []
        tights = [self.tight(v) for v in vs]

        def face_triangulation(vidx: tuple, k: int) -> list[list[int]]:
            if k == 0:
                return [[vidx[0]]]
            v0 = vidx[0]
            common = frozenset.intersection(*(tights[i] for i in vidx))
            out = []
            seen = set()
            for c in range(len(self.A)):
                if c in common or c in tights[v0]:
                    continue
                facet = tuple(i for i in vidx if c in tights[i])
                if len(facet) < k or facet in seen:
                    continue
                if affine_rank([vs[i] for i in facet]) != k - 1:
                    continue
                seen.add(facet)
                for simplex in face_triangulation(facet, k - 1):
                    out.append([v0] + simplex)
            return out

        return [[vs[i] for i in s] for s in face_triangulation(tuple(range(len(vs))), d)]

    def volume(self) -> Fraction:
        return self.integrate(MultiPoly.const(1, self.dim))

    def integrate(self, f: MultiPoly) -> Fraction:
        """Exact integral of ``f`` over the polytope (Lebesgue measure on Q^d)."""
        if self.dim == 0:
            return f.eval(()) if self.vertices() else Fraction(0)
        return sum((simplex_integral(f, s) for s in self.triangulate()), Fraction(0))


def simplex_integral(f: MultiPoly, verts: Sequence[Sequence]) -> Fraction:
    """``∫_Δ f`` for the simplex with the given ``d + 1`` vertices."""
    d = len(verts) - 1
    p0 = verts[0]
    edges = [[Fraction(a) - Fraction(b) for a, b in zip(p, p0)] for p in verts[1:]]
    jac = abs(det(edges))
    if jac == 0:
        return Fraction(0)
    # x = p0 + sum_j lam_j * edge_j
    cols = [[edges[j][i] for j in range(d)] for i in range(d)]
    g = f.compose_affine(cols, list(p0), d)
    total = Fraction(0)
    for e, c in g.terms.items():
        num = 1
        for k in e:
            num *= factorial(k)
        total += c * Fraction(num, factorial(sum(e) + d))
    return total * jac
