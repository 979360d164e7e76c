"""Print the tope polynomials of A2 = [e1, e2, e1+e2] and B2 = [e1, e2, e1+e2, e1-e2]
on the topes meeting the unit square, plus every wall-crossing jump between them."""
import argparse
import itertools

from mbernoulli.arrangement import System, cell_topes, tope_of
from mbernoulli.berseries import ber_tope_poly
from mbernoulli.wallcross import jump

SYSTEMS = {
    "A2": System(2, ((1, 0), (0, 1), (1, 1))),
    "B2": System(2, ((1, 0), (0, 1), (1, 1), (1, -1))),
}


def fmt(w):
    return "(" + ", ".join(str(x) for x in w) + ")"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--system", choices=sorted(SYSTEMS), nargs="*", default=sorted(SYSTEMS))
    args = ap.parse_args()
    for name in args.system:
        s = SYSTEMS[name]
        cells = cell_topes(s)
        print(f"== {name}: {len(cells)} topes in the unit square")
        for tope, _ in cells:
            print(f"  witness {fmt(tope.witness):>12}  {ber_tope_poly(s, tope).render()}")
        print("  jumps between neighbouring topes:")
        for (t1, _), (t2, _) in itertools.combinations(cells, 2):
            if sum(a != b for a, b in zip(t1.key, t2.key)) == 1:
                print(f"    {fmt(t1.witness)} -> {fmt(t2.witness)}: {jump(s, t1, t2).render()}")


if __name__ == "__main__":
    main()
