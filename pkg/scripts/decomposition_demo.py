"""Decompose the A2 Bernoulli series at a point over admissible affine subspaces
for one or more generic β, printing each term's polynomial and value."""
import argparse
from fractions import Fraction

from mbernoulli.arrangement import System
from mbernoulli.berseries import ber_eval
from mbernoulli.splines import decomposition_terms, term_polynomial

A2 = System(2, ((1, 0), (0, 1), (1, 1)))


def point(s):
    return tuple(Fraction(x) for x in s.split(","))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--at", type=point, default=point("9/5,1/4"))
    ap.add_argument("--beta", type=point, action="append")
    args = ap.parse_args()
    betas = args.beta or [point("1/2,1/5"), point("7/10,1/2")]
    for beta in betas:
        print(f"β = {tuple(map(str, beta))}")
        total = Fraction(0)
        for term, val in decomposition_terms(A2, beta, args.at):
            total += val
            print(f"  {term.describe():<16} {term_polynomial(term, args.at).render():<48} {val}")
        print(f"  total {total}   series {ber_eval(A2, args.at)}")


if __name__ == "__main__":
    main()
