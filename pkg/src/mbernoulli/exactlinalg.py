"""Exact rational linear algebra and integer lattice helpers.

Scalars are :class:`fractions.Fraction`; vectors are tuples, matrices are
tuples of row tuples.  Integer matrices use plain ``int`` entries.

Lattice conventions: a lattice basis is given by the *columns* of a matrix.
After normalisation every system lives in coordinates where the lattice is
``Z^r`` and the dual lattice is ``Z^r`` under the dot pairing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import SpanError, ValidationError

Rat = Fraction
Vec = tuple
Mat = tuple


def Q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational: {x!r}") from exc
    if isinstance(x, float):
        # only exactly representable floats are accepted
        return Fraction(x)
    raise ValidationError(f"not a rational: {x!r}")


def qvec(xs: Iterable) -> tuple:
    return tuple(Q(x) for x in xs)


def qmat(rows: Iterable[Iterable]) -> tuple:
    return tuple(qvec(r) for r in rows)


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def ivec(v: Sequence) -> tuple:
    if not is_integral(v):
        raise ValidationError(f"vector is not integral: {tuple(str(x) for x in v)}")
    return tuple(int(Fraction(x)) for x in v)


def floor_q(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil_q(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0) if not a else 0 * a[0])


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a):
    return tuple(c * x for x in a)


def transpose(m: Sequence[Sequence]) -> tuple:
    if not m:
        return ()
    return tuple(zip(*m))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum((x * y for x, y in zip(row, v)), 0) for row in a)


def identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def columns(m: Sequence[Sequence]) -> list:
    return [tuple(c) for c in transpose(m)]


def from_columns(cols: Sequence[Sequence], nrows: int | None = None) -> tuple:
    if not cols:
        return tuple(() for _ in range(nrows or 0))
    return transpose(cols)


def rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in m]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def rank_of_vectors(vectors: Sequence[Sequence]) -> int:
    return rank(list(vectors)) if vectors else 0


def det(m: Sequence[Sequence]) -> Fraction:
    n = len(m)
    if n == 0:
        return Fraction(1)
    a = [[Fraction(x) for x in row] for row in m]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m: Sequence[Sequence]) -> tuple:
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValidationError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def int_inverse(m: Sequence[Sequence]) -> tuple:
    """Inverse of a unimodular integer matrix, as ints."""
    inv = inverse(m)
    return tuple(tuple(ivec(row)) for row in inv)


def solve(a: Sequence[Sequence], b: Sequence) -> tuple:
    """Unique solution of a x = b for square nonsingular a."""
    return matvec(inverse(a), b)


def solve_in_span(cols: Sequence[Sequence], v: Sequence) -> tuple | None:
    """Coefficients c with sum c_i cols[i] = v, or None if v is not in the span.

    ``cols`` must be linearly independent.
    """
    k = len(cols)
    n = len(v)
    if k == 0:
        return () if all(x == 0 for x in v) else None
    aug = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(v[i])] for i in range(n)]
    red, piv = rref(aug)
    if k in piv:
        return None
    sol = [Fraction(0)] * k
    for row, c in zip(red, piv):
        sol[c] = row[k]
    return tuple(sol)


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Basis of {x : m x = 0} over Q."""
    if ncols is None:
        ncols = len(m[0])
    if not m:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    red, piv = rref(m)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def primitive(v: Sequence) -> tuple:
    """Scale a nonzero rational vector to a primitive integer vector (same direction)."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValidationError("zero vector has no primitive direction")
    return tuple(x // g for x in ints)


def normalize_sign(v: Sequence) -> tuple:
    """Flip so that the first nonzero entry is positive."""
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def direction_key(v: Sequence) -> tuple:
    """Canonical representative of the line R v."""
    return normalize_sign(primitive(v))


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Greedy: indices of the first maximal independent subfamily, in order."""
    chosen: list[int] = []
    rows: list = []
    for i, v in enumerate(vectors):
        trial = rows + [v]
        if rank(trial) == len(trial):
            rows = trial
            chosen.append(i)
    return chosen


def span_basis(vectors: Sequence[Sequence], dim: int) -> tuple:
    """Canonical (RREF) basis of span(vectors), as a tuple of rows."""
    if not vectors:
        return ()
    red, piv = rref(vectors)
    return tuple(tuple(red[i]) for i in range(len(piv)))


def in_span(basis_rows: Sequence[Sequence], v: Sequence) -> bool:
    if not basis_rows:
        return all(x == 0 for x in v)
    return rank(list(basis_rows) + [v]) == len(basis_rows)


# ---------------------------------------------------------------------------
# integer normal forms


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    if a and b % a == 0:
        # keep the pivot; avoids swap cycles in the elimination loops
        return a, 1, 0
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[tuple, tuple]:
    """Column-style Hermite normal form.

    Returns ``(H, U)`` with ``M U = H``, ``U`` unimodular, ``H`` lower
    triangular in echelon form with positive pivots, and every entry left of
    a pivot reduced into ``[0, pivot)``.
    """
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    a = [[int(x) for x in row] for row in m]
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(i: int, j: int, p: int, q: int, r: int, s: int) -> None:
        # (col_i, col_j) <- (p col_i + q col_j, r col_i + s col_j)
        for mat in (a, u):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = p * x + q * y, r * x + s * y

    col = 0
    pivots: list[tuple[int, int]] = []
    for row in range(nrows):
        if col >= ncols:
            break
        for j in range(col + 1, ncols):
            if a[row][j] == 0:
                continue
            x, y = a[row][col], a[row][j]
            g, p, q = _xgcd(x, y)
            # [p, -y/g; q, x/g] has determinant 1
            colop(col, j, p, q, -y // g, x // g)
        if a[row][col] == 0:
            continue
        if a[row][col] < 0:
            for mat in (a, u):
                for r_ in mat:
                    r_[col] = -r_[col]
        piv = a[row][col]
        for j in range(col):
            f = a[row][j] // piv
            if f:
                for mat in (a, u):
                    for r_ in mat:
                        r_[j] -= f * r_[col]
        pivots.append((row, col))
        col += 1
    return tuple(map(tuple, a)), tuple(map(tuple, u))


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[tuple, tuple, tuple]:
    """Smith normal form ``D = L M R`` with ``L``, ``R`` unimodular.

    ``D`` is diagonal with nonnegative entries, each dividing the next.
    """
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    a = [[int(x) for x in row] for row in m]
    left = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    right = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def rowop(i, j, p, q, r, s):
        for mat in (a, left):
            ri, rj = mat[i], mat[j]
            mat[i] = [p * x + q * y for x, y in zip(ri, rj)]
            mat[j] = [r * x + s * y for x, y in zip(ri, rj)]

    def colop(i, j, p, q, r, s):
        for mat in (a, right):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = p * x + q * y, r * x + s * y

    t = 0
    while t < min(nrows, ncols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        if pi != t:
            rowop(t, pi, 0, 1, 1, 0)
        if pj != t:
            colop(t, pj, 0, 1, 1, 0)
        done = False
        while not done:
            done = True
            for i in range(t + 1, nrows):
                if a[i][t]:
                    x, y = a[t][t], a[i][t]
                    g, p, q = _xgcd(x, y)
                    rowop(t, i, p, q, -y // g, x // g)
                    done = False
            for j in range(t + 1, ncols):
                if a[t][j]:
                    x, y = a[t][t], a[t][j]
                    g, p, q = _xgcd(x, y)
                    colop(t, j, p, q, -y // g, x // g)
                    done = False
            if done:
                piv = a[t][t]
                bad = next(((i, j) for i in range(t + 1, nrows) for j in range(t + 1, ncols)
                            if a[i][j] % piv), None)
                if bad is not None:
                    rowop(t, bad[0], 1, 1, 0, 1)
                    done = False
        if a[t][t] < 0:
            for mat in (a, left):
                mat[t] = [-x for x in mat[t]]
        t += 1
    return tuple(map(tuple, a)), tuple(map(tuple, left)), tuple(map(tuple, right))


def coset_representatives(sub_basis: Sequence[Sequence[int]]) -> list[tuple]:
    """Representatives of ``Z^r / L'`` where ``L'`` has the given basis vectors.

    Representatives are reduced into the half-open parallelepiped of the
    Hermite basis of ``L'``, i.e. ``0 <= x_i < H_ii``; returned in
    lexicographic order.
    """
    r = len(sub_basis)
    if r == 0:
        return [()]
    if any(len(v) != r for v in sub_basis):
        raise ValidationError("sub_basis must consist of r vectors in Z^r")
    cols = from_columns([ivec(v) for v in sub_basis])
    if det(cols) == 0:
        raise SpanError("sub_basis is rank deficient")
    h, _ = hermite_normal_form(cols)
    ranges = [range(h[i][i]) for i in range(r)]
    return [tuple(Fraction(x) for x in p) for p in itertools.product(*ranges)]


def primitive_equation(spanning: Sequence[Sequence], r: int | None = None) -> tuple:
    """Primitive integer covector vanishing on a hyperplane.

    The sign is fixed by making the first nonzero entry positive.
    """
    if r is None:
        r = len(spanning[0])
    if rank_of_vectors(spanning) != r - 1:
        raise SpanError("vectors do not span a hyperplane")
    ns = nullspace(list(spanning), r) if spanning else nullspace([], r)
    (e,) = ns
    return normalize_sign(primitive(e))


def lattice_intersect(s_basis: Sequence[Sequence], r: int | None = None) -> tuple:
    """Saturated basis of ``Z^r ∩ span(s_basis)``, as a tuple of column vectors.

    The basis is put in Hermite form so that it is canonical.
    """
    return SubspaceChart.build(s_basis, r).S


def lattice_quotient(s_basis: Sequence[Sequence], r: int | None = None) -> tuple[tuple, tuple]:
    """Integer projection ``P`` onto ``V/s`` (image lattice = ``Z^{r-d}``) and a lift basis."""
    ch = SubspaceChart.build(s_basis, r)
    return ch.P, ch.R


@dataclass(frozen=True)
class SubspaceChart:
    """Lattice-adapted coordinates for a rational subspace ``s`` of ``Q^r``.

    ``U = [S | R]`` is unimodular, the columns ``S`` are a (Hermite) basis
    of ``Z^r ∩ s``; the rows of ``U^{-1}`` split as ``Q`` (coordinates along
    ``S``) over ``P`` (the quotient map onto ``Z^{r-d}``).
    """

    r: int
    d: int
    S: tuple  # column vectors (d of them)
    R: tuple  # column vectors (r - d)
    Q: tuple  # d rows
    P: tuple  # r - d rows

    @classmethod
    def build(cls, s_basis: Sequence[Sequence], r: int | None = None) -> "SubspaceChart":
        vecs = [tuple(Fraction(x) for x in v) for v in s_basis]
        if r is None:
            if not vecs:
                raise ValidationError("dimension required for an empty basis")
            r = len(vecs[0])
        vecs = [primitive(v) for v in vecs if any(v)]
        d = rank_of_vectors(vecs)
        if d == 0:
            eye = identity(r)
            return cls(r, 0, (), tuple(map(tuple, eye)), (), eye)
        m = from_columns(vecs)
        _, left, _ = smith_normal_form(m)
        lm = int_inverse(left)
        lcols = columns(lm)
        s_cols = lcols[:d]
        r_cols = lcols[d:]
        h, _ = hermite_normal_form(from_columns(s_cols))
        s_cols = [c for c in columns(h) if any(c)]
        u = from_columns(s_cols + r_cols)
        uinv = int_inverse(u)
        qrows = uinv[:d]
        prows = uinv[d:]
        if prows:
            # canonical quotient chart: row-Hermite form of P
            hp, g = hermite_normal_form(transpose(prows))
            prows = transpose(hp)
            prows = tuple(row for row in prows)
            # P_new = g^T P  =>  R_new = R g^{-T}
            gt_inv = int_inverse(transpose(g))
            r_cols = columns(matmul(from_columns(r_cols), gt_inv))
            u = from_columns(s_cols + r_cols)
            uinv = int_inverse(u)
            qrows = uinv[:d]
            prows = uinv[d:]
        return cls(r, d, tuple(s_cols), tuple(r_cols), tuple(qrows), tuple(prows))

    def project(self, v: Sequence) -> tuple:
        return matvec(self.P, v)

    def s_coords(self, v: Sequence) -> tuple:
        return matvec(self.Q, v)

    def lift(self, mu: Sequence) -> tuple:
        """The lattice/rational point ``R mu``."""
        if not self.R:
            return tuple(Fraction(0) for _ in range(self.r))
        return matvec(from_columns(self.R), mu)

    def from_s(self, c: Sequence) -> tuple:
        if not self.S:
            return tuple(Fraction(0) for _ in range(self.r))
        return matvec(from_columns(self.S), c)


def fmt_vec(v: Sequence) -> str:
    """``(1/2, -3)`` style rendering for messages."""
    return "(" + ", ".join(str(Fraction(x)) for x in v) + ")"
