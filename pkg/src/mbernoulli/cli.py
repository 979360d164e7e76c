"""Command-line front end.

Input is one JSON document describing the system in user coordinates::

    {
      "dimension": 2,
      "lattice_basis": [[1, 0], [0, 1]],
      "phi": [{"vector": [1, 0], "multiplicity": 1, "z": "1/3"}, ...],
      "gram": [[1, 0], [0, 1]]
    }

Rationals may be integers or strings such as ``"-7/3"``.  ``z`` is only used
by the ``affine`` command and ``gram`` (an inner product in user coordinates,
Euclidean by default) only by ``decompose``.  Points are comma separated
rationals, e.g. ``--at 1/5,1/2``.

Exit codes: 0 success, 2 invalid input, 3 point not generic.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .affineseries import AffinePair, affine_eval
from .arrangement import System, tope_of
from .berseries import ber_tope_poly, fourier_partial_sum, integralize
from .errors import GenericityError, ValidationError
from .eulermaclaurin import EMConfig, TestFunction, em_verify
from .exactlinalg import from_columns, inverse, matmul, matvec, transpose
from .polynomials import MultiPoly, default_names
from .splines import Gram, decomposition_terms, term_polynomial
from .wallcross import jump, jump_by_difference


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ValidationError(f"not a rational: {x!r}")
    if isinstance(x, float):
        x = repr(x)
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(f"not a rational: {x!r}") from None


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_point(text: str, r: int) -> tuple:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != r:
        raise ValidationError(f"expected {r} coordinates, got {len(parts)}")
    return tuple(parse_rational(p) for p in parts)


@dataclass(frozen=True)
class PhiEntry:
    vector: tuple
    multiplicity: int = 1
    z: Fraction | None = None


@dataclass(frozen=True)
class SystemDescription:
    dimension: int
    lattice_basis: tuple
    phi: tuple
    gram: tuple | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "SystemDescription":
        if not isinstance(d, dict):
            raise ValidationError("system description must be a JSON object")
        unknown = set(d) - {"dimension", "lattice_basis", "phi", "gram"}
        if unknown:
            raise ValidationError(f"unknown keys: {sorted(unknown)}")
        try:
            r = d["dimension"]
            phi_raw = d["phi"]
        except KeyError as e:
            raise ValidationError(f"missing key {e}") from None
        if not isinstance(r, int) or isinstance(r, bool) or r < 1:
            raise ValidationError("dimension must be a positive integer")

        def matrix(rows, name):
            if not isinstance(rows, list) or len(rows) != r or any(not isinstance(x, list) or len(x) != r for x in rows):
                raise ValidationError(f"{name} must be a {r}x{r} matrix")
            return tuple(tuple(parse_rational(x) for x in row) for row in rows)

        basis = matrix(d.get("lattice_basis", [[int(i == j) for j in range(r)] for i in range(r)]), "lattice_basis")
        if inverse_or_none(basis) is None:
            raise ValidationError("lattice_basis is singular")
        gram = matrix(d["gram"], "gram") if d.get("gram") is not None else None
        if not isinstance(phi_raw, list) or not phi_raw:
            raise ValidationError("phi must be a non-empty list")
        entries = []
        for item in phi_raw:
            if isinstance(item, list):
                item = {"vector": item}
            if not isinstance(item, dict) or "vector" not in item:
                raise ValidationError("each phi entry needs a vector")
            vec = item["vector"]
            if not isinstance(vec, list) or len(vec) != r:
                raise ValidationError(f"vector of length {r} expected")
            vec = tuple(parse_rational(x) for x in vec)
            if not any(vec):
                raise ValidationError("zero vector in phi")
            m = item.get("multiplicity", 1)
            if not isinstance(m, int) or isinstance(m, bool) or m < 1:
                raise ValidationError("multiplicity must be an integer >= 1")
            z = item.get("z")
            entries.append(PhiEntry(vec, m, parse_rational(z) if z is not None else None))
        return cls(r, basis, tuple(entries), gram)

    def to_dict(self) -> dict:
        def mat(M):
            return [[format_rational(x) for x in row] for row in M]

        phi = []
        for e in self.phi:
            item = {"vector": [format_rational(x) for x in e.vector], "multiplicity": e.multiplicity}
            if e.z is not None:
                item["z"] = format_rational(e.z)
            phi.append(item)
        out = {"dimension": self.dimension, "lattice_basis": mat(self.lattice_basis), "phi": phi}
        if self.gram is not None:
            out["gram"] = mat(self.gram)
        return out

    @property
    def vectors(self) -> list[tuple]:
        return [e.vector for e in self.phi for _ in range(e.multiplicity)]

    @property
    def is_affine(self) -> bool:
        return any(e.z for e in self.phi)


def inverse_or_none(M):
    try:
        return inverse([list(row) for row in M])
    except (ValidationError, ZeroDivisionError):
        return None


@dataclass
class Canonical:
    """The system rewritten with the lattice basis as standard basis."""

    desc: SystemDescription
    B: list = field(repr=False)
    Binv: list = field(repr=False)
    system: System
    factor: Fraction

    @classmethod
    def build(cls, desc: SystemDescription) -> "Canonical":
        B = from_columns([list(b) for b in desc.lattice_basis])
        Binv = inverse(B)
        vecs, factor = integralize([matvec(Binv, v) for v in desc.vectors])
        return cls(desc, B, Binv, System(desc.dimension, tuple(tuple(v) for v in vecs)), factor)

    def point(self, v: Sequence) -> tuple:
        return tuple(matvec(self.Binv, v))

    def to_user(self, p: MultiPoly, scale: bool = True) -> MultiPoly:
        out = p.compose_affine(self.Binv, None, self.desc.dimension)
        return out * self.factor if scale else out

    def gram(self) -> Gram:
        G = self.desc.gram
        G = [list(row) for row in G] if G is not None else [[int(i == j) for j in range(len(self.B))] for i in range(len(self.B))]
        return Gram(tuple(tuple(row) for row in matmul(matmul(transpose(self.B), G), self.B)))


def _names(r: int) -> list[str]:
    return default_names(r)


def _load(path: str) -> SystemDescription:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed JSON: {e}") from None
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from None
    return SystemDescription.from_dict(data)


def _complex(z: complex) -> str:
    return f"{z.real:.15g}{z.imag:+.15g}j"


# ---------------------------------------------------------------------------
# commands; each returns (text lines, json payload)


def cmd_ber(desc: SystemDescription, at: str):
    can = Canonical.build(desc)
    v = parse_point(at, desc.dimension)
    w = can.point(v)
    tope = tope_of(w, can.system)
    poly = can.to_user(ber_tope_poly(can.system, tope))
    value = poly.eval(v)
    key = str(tope.key)
    names = _names(desc.dimension)
    lines = [f"tope: {key}", f"polynomial: {poly.render(names)}", f"value: {format_rational(value)}"]
    return lines, {"tope": [str(k) for k in tope.key], "polynomial": poly.render(names), "value": format_rational(value)}


def cmd_jump(desc: SystemDescription, at1: str, at2: str):
    can = Canonical.build(desc)
    r = desc.dimension
    w1, w2 = can.point(parse_point(at1, r)), can.point(parse_point(at2, r))
    j = can.to_user(jump(can.system, w1, w2))
    d = can.to_user(jump_by_difference(can.system, w1, w2))
    names = _names(r)
    ok = j == d
    lines = [f"jump: {j.render(names)}", f"difference: {d.render(names)}", f"check: {'ok' if ok else 'MISMATCH'}"]
    return lines, {"jump": j.render(names), "difference": d.render(names), "check": ok}


def cmd_decompose(desc: SystemDescription, beta: str, at: str, radius: str | None = None):
    can = Canonical.build(desc)
    r = desc.dimension
    v = parse_point(at, r)
    w = can.point(v)
    b = can.point(parse_point(beta, r))
    rad = parse_rational(radius) if radius is not None else None
    names = _names(r)
    rows = []
    total = Fraction(0)
    for term, val in decomposition_terms(can.system, b, w, rad, can.gram()):
        poly = can.to_user(term_polynomial(term, w))
        val = val * can.factor
        total += val
        rows.append((term.describe(), poly.render(names), format_rational(val)))
    ber = can.to_user(ber_tope_poly(can.system, w)).eval(v)
    lines = ["affine_subspace\tpolynomial\tvalue"] + ["\t".join(row) for row in rows]
    lines += [f"total: {format_rational(total)}", f"ber: {format_rational(ber)}",
              f"check: {'ok' if total == ber else 'MISMATCH'}"]
    payload = {
        "terms": [{"affine_subspace": a, "polynomial": p, "value": x} for a, p, x in rows],
        "total": format_rational(total), "ber": format_rational(ber), "check": total == ber,
    }
    return lines, payload


def cmd_em(desc: SystemDescription, gaussian: str, radius: int = 8, order: int = 24):
    can = Canonical.build(desc)
    r = desc.dimension
    parts = [p for p in gaussian.replace(" ", "").split(",") if p]
    if len(parts) != r + 1:
        raise ValidationError("--gaussian expects a,c1,...,cr")
    a = parse_rational(parts[0])
    c = tuple(parse_rational(x) for x in parts[1:])
    metric = tuple(tuple(row) for row in matmul(transpose(can.B), can.B))
    f = TestFunction(MultiPoly.const(1, r), can.point(c), a, metric)
    if radius < 1 or order < 1:
        raise ValidationError("radius and order must be positive")
    rep = em_verify(can.system, f, EMConfig(lattice_radius=radius, quad_order=order))
    lines = [f"lhs: {rep.lhs:.15g}", f"rhs: {rep.rhs:.15g}", f"abs_error: {rep.abs_error:.3e}"]
    return lines, {"lhs": rep.lhs, "rhs": rep.rhs, "abs_error": rep.abs_error}


def cmd_fourier(desc: SystemDescription, at: str, N: int = 50, cesaro: bool = False):
    can = Canonical.build(desc)
    v = parse_point(at, desc.dimension)
    w = can.point(v)
    tope_of(w, can.system)
    approx = fourier_partial_sum(can.system, w, N, cesaro) * float(can.factor)
    exact = can.to_user(ber_tope_poly(can.system, w)).eval(v)
    err = abs(approx - float(exact))
    lines = [f"partial_sum: {_complex(approx)}", f"ber: {format_rational(exact)}", f"abs_error: {err:.3e}"]
    return lines, {"partial_sum": [approx.real, approx.imag], "ber": format_rational(exact), "abs_error": err}


def cmd_affine(desc: SystemDescription, at: str):
    r = desc.dimension
    v = parse_point(at, r)
    pairs = [AffinePair(e.vector, e.z or 0) for e in desc.phi for _ in range(e.multiplicity)]
    val = affine_eval(pairs, v, lattice_basis=[list(b) for b in desc.lattice_basis])
    return [f"value: {_complex(val)}"], {"value": [val.real, val.imag]}


def cmd_plot1d(desc: SystemDescription, range_: str, samples: int = 201):
    if desc.dimension != 1:
        raise ValidationError("plot1d needs a one-dimensional system")
    if desc.is_affine:
        raise ValidationError("plot1d plots real Bernoulli series; drop the z entries")
    try:
        lo, hi = (parse_rational(x) for x in range_.split(".."))
    except ValueError:
        raise ValidationError("--range expects a..b") from None
    if not lo < hi or samples < 2:
        raise ValidationError("empty plotting range")
    can = Canonical.build(desc)
    lines = ["t,value"]
    cache: dict = {}
    rows = []
    for i in range(samples):
        t = lo + (hi - lo) * i / (samples - 1)
        w = can.point([t])
        try:
            tope = tope_of(w, can.system)
        except ValidationError:
            continue  # sample on a wall
        if tope not in cache:
            cache[tope] = can.to_user(ber_tope_poly(can.system, tope))
        val = cache[tope].eval([t])
        rows.append((float(t), float(val)))
        lines.append(f"{float(t):.10g},{float(val):.12g}")
    return lines, {"t": [x for x, _ in rows], "value": [y for _, y in rows]}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mbernoulli", description="Multiple Bernoulli series toolkit")
    ap.add_argument("--json", action="store_true", help="emit JSON instead of text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ber", help="tope polynomial and value at a point")
    p.add_argument("file")
    p.add_argument("--at", required=True)

    p = sub.add_parser("jump", help="jump across the wall between two adjacent topes")
    p.add_argument("file")
    p.add_argument("--at1", required=True)
    p.add_argument("--at2", required=True)

    p = sub.add_parser("decompose", help="decomposition over admissible affine subspaces")
    p.add_argument("file")
    p.add_argument("--beta", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--radius", default=None)

    p = sub.add_parser("em", help="Euler-MacLaurin check for a Gaussian")
    p.add_argument("file")
    p.add_argument("--gaussian", required=True, help="a,c1,...,cr for exp(-a|v-c|^2)")
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--order", type=int, default=24, help="Gauss points per simplex direction")

    p = sub.add_parser("fourier", help="truncated Fourier series against the exact value")
    p.add_argument("file")
    p.add_argument("--at", required=True)
    p.add_argument("--N", type=int, default=50)
    p.add_argument("--cesaro", action="store_true")

    p = sub.add_parser("affine", help="affine series value at a point")
    p.add_argument("file")
    p.add_argument("--at", required=True)

    p = sub.add_parser("plot1d", help="CSV samples of a 1-D series")
    p.add_argument("file")
    p.add_argument("--range", dest="range_", required=True, help="a..b")
    p.add_argument("--samples", type=int, default=201)
    return ap


_VALUE_FLAGS = {"--at", "--at1", "--at2", "--beta", "--gaussian", "--range", "--radius"}


def _glue_negative(argv: Sequence[str]) -> list[str]:
    """Allow ``--at -1/2`` as well as ``--at=-1/2``."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative(argv))
    try:
        desc = _load(args.file)
        if args.command == "ber":
            lines, payload = cmd_ber(desc, args.at)
        elif args.command == "jump":
            lines, payload = cmd_jump(desc, args.at1, args.at2)
        elif args.command == "decompose":
            lines, payload = cmd_decompose(desc, args.beta, args.at, args.radius)
        elif args.command == "em":
            lines, payload = cmd_em(desc, args.gaussian, args.radius, args.order)
        elif args.command == "fourier":
            lines, payload = cmd_fourier(desc, args.at, args.N, args.cesaro)
        elif args.command == "affine":
            lines, payload = cmd_affine(desc, args.at)
        else:
            lines, payload = cmd_plot1d(desc, args.range_, args.samples)
    except GenericityError as e:
        msg = f"error: {e}"
        if e.suggestion is not None:
            msg += f"\nsuggestion: {','.join(format_rational(x) for x in e.suggestion)}"
        return 3, msg
    except ValidationError as e:
        return 2, f"error: {e}"
    if args.json:
        return 0, json.dumps(payload, sort_keys=True, indent=2)
    return 0, "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    code, out = run(argv)
    print(out, file=sys.stdout if code == 0 else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
