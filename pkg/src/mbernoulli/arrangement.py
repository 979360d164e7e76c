"""Systems (Φ, Z^r), walls, topes and admissible subspaces."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import NotAdjacentError, SpanError, ValidationError
from .exactlinalg import (
    SubspaceChart, ceil_q, direction_key, dot, floor_q, fmt_vec, ivec, matvec, primitive_equation,
    rank_of_vectors, rref, span_basis,
)
from .polytope import Polytope


@dataclass(frozen=True)
class System:
    """A list Φ of integer vectors in ``Z^r``; the lattice is ``Z^r`` itself.

    Elements are stored expanded (repeated according to multiplicity) in
    the order given.
    """

    r: int
    phi: tuple
    allow_zero: bool = False

    def __post_init__(self):
        vecs = tuple(ivec(v) for v in self.phi)
        if any(len(v) != self.r for v in vecs):
            raise ValidationError("all vectors must have length r")
        if not self.allow_zero and any(not any(v) for v in vecs):
            raise ValidationError("zero vector in Φ (pass allow_zero=True for the trivial series)")
        object.__setattr__(self, "phi", vecs)

    @classmethod
    def from_multiplicities(cls, r: int, items: Sequence[tuple[Sequence, int]], **kw) -> "System":
        out = []
        for v, m in items:
            if int(m) < 1:
                raise ValidationError("multiplicities must be >= 1")
            out.extend([tuple(v)] * int(m))
        return cls(r, tuple(out), **kw)

    def __len__(self):
        return len(self.phi)

    @property
    def has_zero(self) -> bool:
        return any(not any(v) for v in self.phi)

    @cached_property
    def spans(self) -> bool:
        if self.r == 0:
            return True
        nz = [v for v in self.phi if any(v)]
        return bool(nz) and rank_of_vectors(nz) == self.r

    def require_spanning(self):
        if not self.spans:
            raise SpanError("Φ does not span V")

    @cached_property
    def directions(self) -> tuple:
        """Distinct lines R φ, as canonical primitive vectors, in order of first appearance."""
        seen = []
        for v in self.phi:
            if any(v):
                k = direction_key(v)
                if k not in seen:
                    seen.append(k)
        return tuple(seen)

    @cached_property
    def walls(self) -> tuple:
        return tuple(_compute_walls(self))

    def without(self, index: int) -> "System":
        return System(self.r, self.phi[:index] + self.phi[index + 1:], self.allow_zero)


@dataclass(frozen=True)
class Wall:
    """Hyperplane spanned by elements of Φ, with primitive equation ``E``."""

    E: tuple
    members: tuple  # indices into Φ of the vectors lying in the hyperplane

    def value(self, v) -> Fraction:
        return dot(self.E, [Fraction(x) for x in v])


@dataclass(frozen=True)
class Tope:
    """Connected regular region, addressed by the floors ``[<E, v>]`` over all walls."""

    key: tuple
    witness: tuple = field(compare=False)


def _compute_walls(system: System) -> list[Wall]:
    system.require_spanning()
    r = system.r
    if r == 0:
        return []
    dirs = system.directions
    found = {}
    for sub in itertools.combinations(dirs, r - 1):
        if r > 1 and rank_of_vectors(list(sub)) != r - 1:
            continue
        E = primitive_equation(list(sub), r) if r > 1 else (1,)
        if E not in found:
            members = tuple(i for i, v in enumerate(system.phi) if dot(E, v) == 0)
            found[E] = Wall(E, members)
    return [found[k] for k in sorted(found)]


def walls(system: System) -> list[Wall]:
    return list(system.walls)


def is_regular(v: Sequence, system: System) -> bool:
    v = [Fraction(x) for x in v]
    return all(w.value(v).denominator != 1 for w in system.walls)


def tope_of(v: Sequence, system: System) -> Tope:
    v = tuple(Fraction(x) for x in v)
    key = []
    for w in system.walls:
        x = w.value(v)
        if x.denominator == 1:
            raise ValidationError(f"point {fmt_vec(v)} lies on the affine wall <{fmt_vec(w.E)}, v> = {x}")
        key.append(floor_q(x))
    return Tope(tuple(key), v)


@dataclass(frozen=True)
class AdmissibleSubspace:
    """Subspace spanned by elements of Φ."""

    basis: tuple  # independent elements of Φ spanning s
    dim: int
    rref: tuple  # canonical key
    members: tuple  # indices of Φ lying in s

    def contains(self, v) -> bool:
        from .exactlinalg import in_span
        return in_span(self.rref, v)


def _subspace(system: System, vectors: Sequence) -> AdmissibleSubspace:
    from .exactlinalg import independent_subset, in_span
    r = system.r
    key = span_basis(list(vectors), r) if vectors else ()
    members = tuple(i for i, v in enumerate(system.phi) if any(v) and in_span(key, v))
    nz = [system.phi[i] for i in members]
    idx = independent_subset(nz)
    basis = tuple(nz[i] for i in idx)
    return AdmissibleSubspace(basis, len(key), key, members)


def admissible_subspaces(system: System) -> list[AdmissibleSubspace]:
    """All subspaces spanned by subsets of Φ, by dimension then canonical basis."""
    dirs = system.directions
    found = {(): _subspace(system, [])}
    frontier = [()]
    while frontier:
        new = []
        for key in frontier:
            sub = found[key]
            for d in dirs:
                if sub.contains(d):
                    continue
                nk = span_basis(list(sub.rref) + [d], system.r)
                if nk not in found:
                    found[nk] = _subspace(system, list(nk))
                    new.append(nk)
        frontier = new
    return sorted(found.values(), key=lambda s: (s.dim, s.rref))


def subspace_from_vectors(system: System, vectors: Sequence) -> AdmissibleSubspace:
    """The admissible subspace spanned by the given vectors (must be Φ-spanned)."""
    sub = _subspace(system, [tuple(Fraction(x) for x in v) for v in vectors])
    spanned = rank_of_vectors([system.phi[i] for i in sub.members]) if sub.members else 0
    if spanned != sub.dim:
        raise ValidationError("subspace is not spanned by elements of Φ")
    return sub


def full_subspace(system: System) -> AdmissibleSubspace:
    return _subspace(system, [tuple(int(i == j) for j in range(system.r)) for i in range(system.r)])


@dataclass(frozen=True)
class InducedSystem:
    """A system derived from ``(Φ, Z^r)`` together with its chart.

    For a restriction ``Φ ∩ s`` the new coordinates are ``Q v`` (on ``s``);
    for a quotient ``Φ / s`` they are ``P v``.
    """

    system: System
    chart: SubspaceChart
    indices: tuple  # indices into the parent Φ of the elements used


def restrict(system: System, sub: AdmissibleSubspace) -> InducedSystem:
    ch = SubspaceChart.build(list(sub.basis), system.r) if sub.dim else SubspaceChart.build([], system.r)
    vecs = tuple(ivec(matvec(ch.Q, system.phi[i])) for i in sub.members)
    return InducedSystem(System(sub.dim, vecs), ch, sub.members)


def quotient(system: System, sub: AdmissibleSubspace) -> InducedSystem:
    ch = SubspaceChart.build(list(sub.basis), system.r) if sub.dim else SubspaceChart.build([], system.r)
    idx = tuple(i for i in range(len(system.phi)) if i not in sub.members)
    vecs = tuple(ivec(matvec(ch.P, system.phi[i])) for i in idx)
    return InducedSystem(System(system.r - sub.dim, vecs, system.allow_zero), ch, idx)


def wall_subspace(system: System, wall: Wall) -> AdmissibleSubspace:
    return _subspace(system, [system.phi[i] for i in wall.members])


def separating_wall(system: System, t1: Tope, t2: Tope) -> int:
    diff = [i for i, (a, b) in enumerate(zip(t1.key, t2.key)) if a != b]
    if len(diff) != 1 or abs(t1.key[diff[0]] - t2.key[diff[0]]) != 1:
        raise NotAdjacentError("topes are not separated by exactly one affine wall")
    return diff[0]


def facet_witness(system: System, t1: Tope, t2: Tope) -> tuple[Wall, tuple, int]:
    """Separating wall, a point on the shared facet, and the wall level ``k``.

    The point is where the segment between the two witnesses crosses
    ``<E, v> = k``.  Both topes are convex and share every other floor, so
    the crossing avoids all other affine walls; in particular it is regular
    for the wall's own subsystem.
    """
    i = separating_wall(system, t1, t2)
    w = system.walls[i]
    k = max(t1.key[i], t2.key[i])
    a, b = t1.witness, t2.witness
    ea, eb = w.value(a), w.value(b)
    s = (k - ea) / (eb - ea)
    p = tuple(x + s * (y - x) for x, y in zip(a, b))
    for j, w2 in enumerate(system.walls):
        if j != i and w2.value(p).denominator == 1:
            raise ValidationError("degenerate facet crossing")
    return w, p, k


def cell_topes(system: System) -> list[tuple[Tope, Polytope]]:
    """Topes meeting the unit cube ``[0,1)^r``, each with its cell polytope."""
    r = system.r
    A = []
    b = []
    for i in range(r):
        e = [0] * r
        e[i] = 1
        A.append(tuple(e))
        b.append(1)
        A.append(tuple(-x for x in e))
        b.append(0)
    cells = [Polytope(A, b, r)]
    for w in system.walls:
        lo = sum(min(0, x) for x in w.E)
        hi = sum(max(0, x) for x in w.E)
        for k in range(lo + 1, hi):
            nxt = []
            for c in cells:
                for sign in (1, -1):
                    piece = Polytope(c.A + [tuple(sign * x for x in w.E)], c.b + [sign * k], r)
                    if piece.is_full_dimensional():
                        nxt.append(piece)
            cells = nxt
    out = []
    for c in cells:
        vs = c.vertices()
        cen = tuple(sum(v[i] for v in vs) / len(vs) for i in range(r))
        out.append((tope_of(cen, system), c))
    return out
