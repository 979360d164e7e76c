"""Sparse multivariate polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError


def _add_exp(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class MultiPoly:
    """Polynomial in ``nvars`` variables; ``terms`` maps exponent tuples to Fractions.

    Zero coefficients are never stored, so two polynomials are equal iff
    their term dictionaries are equal.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c == 0:
                    continue
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise ValidationError("exponent length does not match nvars")
                clean[e] = clean.get(e, Fraction(0)) + c
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def const(cls, c, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "MultiPoly":
        """The affine form ``sum coeffs[i] x_i + const``."""
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValidationError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return MultiPoly.const(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = Fraction(other)
            return MultiPoly(self.nvars, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = Fraction(c)
        return MultiPoly(self.nvars, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, k: int):
        out = MultiPoly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == MultiPoly.const(other, self.nvars)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"MultiPoly({self.render()})"

    def __str__(self):
        return self.render()

    # queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    # calculus -----------------------------------------------------------
    def diff(self, i: int, k: int = 1) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i] < k:
                continue
            f = 1
            for j in range(k):
                f *= e[i] - j
            ne = list(e)
            ne[i] -= k
            out[tuple(ne)] = c * f
        return MultiPoly(self.nvars, out)

    def directional(self, direction: Sequence) -> "MultiPoly":
        """Derivative along a constant vector."""
        out = MultiPoly.zero(self.nvars)
        for i, a in enumerate(direction):
            if a:
                out = out + self.diff(i) * a
        return out

    # evaluation ---------------------------------------------------------
    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        return self.eval(point)

    def eval(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValidationError("point dimension does not match nvars")
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        exps = np.array(list(self.terms.keys()), dtype=np.int64).reshape(len(self.terms), self.nvars)
        coefs = np.array([float(c) for c in self.terms.values()], dtype=float)
        return exps, coefs

    def eval_numpy(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at an (m, nvars) float array."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.nvars)
        if not self.terms:
            return np.zeros(len(pts))
        exps, coefs = self.to_arrays()
        maxdeg = int(exps.max()) if exps.size else 0
        powers = np.ones((maxdeg + 1,) + pts.shape)
        for k in range(1, maxdeg + 1):
            powers[k] = powers[k - 1] * pts
        out = np.zeros(len(pts))
        for e, c in zip(exps, coefs):
            term = np.full(len(pts), c)
            for i, k in enumerate(e):
                if k:
                    term = term * powers[k][:, i]
            out += term
        return out

    # substitution -------------------------------------------------------
    def substitute(self, images: Sequence["MultiPoly"], nvars: int | None = None) -> "MultiPoly":
        """Replace variable ``i`` by the polynomial ``images[i]``."""
        if len(images) != self.nvars:
            raise ValidationError("need one image per variable")
        m = nvars if nvars is not None else (images[0].nvars if images else 0)
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = MultiPoly.const(1, m) if k == 0 else power(i, k - 1) * images[i]
            return cache[key]

        out = MultiPoly.zero(m)
        for e, c in self.terms.items():
            term = MultiPoly.const(c, m)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def compose_affine(self, A: Sequence[Sequence], b: Sequence | None = None, nnew: int | None = None) -> "MultiPoly":
        """``f(A y + b)`` with ``A`` of shape (nvars, nnew)."""
        if nnew is None:
            nnew = len(A[0]) if A and len(A[0]) else 0
        if b is None:
            b = [0] * self.nvars
        images = [MultiPoly.linear(list(A[i]) if nnew else [], b[i]) for i in range(self.nvars)]
        return self.substitute(images, nnew)

    def translate(self, shift: Sequence) -> "MultiPoly":
        """``f(y + shift)``."""
        n = self.nvars
        eye = [[int(i == j) for j in range(n)] for i in range(n)]
        return self.compose_affine(eye, shift, n)

    def embed(self, nvars: int, offset: int = 0) -> "MultiPoly":
        """Same polynomial viewed in a larger variable set, at positions offset.."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            ne[offset:offset + self.nvars] = e
            out[tuple(ne)] = c
        return MultiPoly(nvars, out)

    # rendering ----------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0])))

    def render(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = default_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            num, den = abs(c.numerator), c.denominator
            if mono:
                body = mono if num == 1 else f"{num}*{mono}"
            else:
                body = str(num)
            if den != 1:
                body = f"{body}/{den}"
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def default_names(n: int) -> list[str]:
    if n == 1:
        return ["t"]
    return [f"v{i + 1}" for i in range(n)]


def apply_diff_operator(P: MultiPoly, f: MultiPoly) -> MultiPoly:
    """``P(∂) f``: each monomial ``x^a`` of ``P`` acts as ``∂^a``."""
    if P.nvars != f.nvars:
        raise ValidationError("operator and polynomial must have the same number of variables")
    out = MultiPoly.zero(f.nvars)
    for e, c in P.terms.items():
        g = f
        for i, k in enumerate(e):
            if k:
                g = g.diff(i, k)
            if g.is_zero():
                break
        out = out + g * c
    return out


def affine_substitute(f: MultiPoly, A: Sequence[Sequence], b: Sequence | None = None) -> MultiPoly:
    """Composition ``f ∘ (y ↦ A y + b)``."""
    return f.compose_affine(A, b)


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Bernoulli numbers with ``B_1 = -1/2``."""
    if n == 0:
        return Fraction(1)
    s = sum(comb(n + 1, j) * bernoulli_number(j) for j in range(n))
    return -s / (n + 1)


@lru_cache(maxsize=None)
def _bernoulli_coeffs(k: int) -> tuple:
    # coefficient of t^j in B(k, t)
    return tuple(comb(k, j) * bernoulli_number(k - j) for j in range(k + 1))


def bernoulli_polynomial(k: int) -> MultiPoly:
    """Univariate Bernoulli polynomial ``B(k, t)``; ``B(1, t) = t - 1/2``."""
    if k < 0:
        raise ValidationError("k must be nonnegative")
    return MultiPoly(1, {(j,): c for j, c in enumerate(_bernoulli_coeffs(k))})


def bernoulli_value(k: int, t) -> Fraction:
    t = Fraction(t)
    return sum((c * t**j for j, c in enumerate(_bernoulli_coeffs(k))), Fraction(0))


def bernoulli_affine(k: int, form: MultiPoly) -> MultiPoly:
    """``B(k, ·)`` composed with a polynomial (typically an affine form)."""
    out = MultiPoly.zero(form.nvars)
    pw = MultiPoly.const(1, form.nvars)
    for c in _bernoulli_coeffs(k):
        out = out + pw * c
        pw = pw * form
    return out


class PiPolynomial:
    """Formal sum ``Σ_k (2iπ)^k p_k(v)`` with rational polynomials ``p_k``."""

    def __init__(self, nvars: int, parts: Mapping[int, MultiPoly] | None = None):
        self.nvars = nvars
        self.parts = {k: p for k, p in (parts or {}).items() if not p.is_zero()}

    @classmethod
    def single(cls, k: int, p: MultiPoly) -> "PiPolynomial":
        return cls(p.nvars, {k: p})

    def __add__(self, other: "PiPolynomial") -> "PiPolynomial":
        out = dict(self.parts)
        for k, p in other.parts.items():
            out[k] = out[k] + p if k in out else p
        return PiPolynomial(self.nvars, out)

    def scale(self, c, shift: int = 0) -> "PiPolynomial":
        return PiPolynomial(self.nvars, {k + shift: p * c for k, p in self.parts.items()})

    def __eq__(self, other):
        return isinstance(other, PiPolynomial) and self.nvars == other.nvars and self.parts == other.parts

    def __repr__(self):
        inner = ", ".join(f"(2iπ)^{k}·[{p.render()}]" for k, p in sorted(self.parts.items()))
        return f"PiPolynomial({inner or '0'})"

    def eval_complex(self, point: Sequence) -> complex:
        tot = 0j
        for k, p in self.parts.items():
            tot += (2j * np.pi) ** k * float(p.eval(point))
        return tot


def poly_from_values(points: Sequence[Sequence], values: Sequence, monomials: Iterable[tuple]) -> MultiPoly:
    """Exact interpolation: the polynomial spanned by ``monomials`` through the data.

    Raises if the system is singular.
    """
    from .exactlinalg import solve

    monos = list(monomials)
    if len(points) != len(monos):
        raise ValidationError("need as many points as monomials")
    mat = []
    for p in points:
        row = []
        for e in monos:
            v = Fraction(1)
            for x, k in zip(p, e):
                v *= Fraction(x) ** k
            row.append(v)
        mat.append(row)
    coefs = solve(mat, [Fraction(v) for v in values])
    nv = len(monos[0]) if monos else 0
    return MultiPoly(nv, dict(zip(monos, coefs)))


def monomials_up_to(nvars: int, deg: int) -> list[tuple]:
    out = []

    def rec(prefix, left, k):
        if k == nvars:
            out.append(tuple(prefix))
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a, k + 1)

    rec([], deg, 0)
    return sorted(out, key=lambda e: (sum(e), e))


def factorial_q(n: int) -> Fraction:
    return Fraction(factorial(n))
