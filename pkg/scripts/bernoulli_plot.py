"""Write CSV samples of the 1-D series B([1]*k, Z)(t) = -B(k, {t})/k! for several k."""
import argparse
import csv
import sys
from fractions import Fraction

from mbernoulli.arrangement import System, tope_of
from mbernoulli.berseries import ber_tope_poly


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="*", default=[1, 2, 3, 4])
    ap.add_argument("--lo", type=Fraction, default=Fraction(-2))
    ap.add_argument("--hi", type=Fraction, default=Fraction(2))
    ap.add_argument("--samples", type=int, default=401)
    ap.add_argument("-o", "--out", default="-")
    args = ap.parse_args()
    systems = {k: System(1, ((1,),) * k) for k in args.k}
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["t"] + [f"k={k}" for k in args.k])
    cache = {}
    for i in range(args.samples):
        t = args.lo + (args.hi - args.lo) * i / (args.samples - 1)
        if t.denominator == 1:
            continue  # jump point for k = 1
        row = [f"{float(t):.6g}"]
        for k, s in systems.items():
            tope = tope_of((t,), s)
            if (k, tope) not in cache:
                cache[k, tope] = ber_tope_poly(s, tope)
            row.append(f"{float(cache[k, tope].eval((t,))):.10g}")
        w.writerow(row)
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
