"""Euler-MacLaurin check for Gaussians on a few systems, with the error
as a function of the truncation radius."""
import argparse
from fractions import Fraction

from mbernoulli.arrangement import System
from mbernoulli.eulermaclaurin import EMConfig, TestFunction, em_terms, em_verify

SYSTEMS = {
    "phi1": System(1, ((1,),)),
    "phi2": System(1, ((1,), (1,))),
    "A2": System(2, ((1, 0), (0, 1), (1, 1))),
    "B2": System(2, ((1, 0), (0, 1), (1, 1), (1, -1))),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--width", type=Fraction, default=Fraction(1, 2), help="a in exp(-a|v-c|^2)")
    ap.add_argument("--order", type=int, default=24)
    ap.add_argument("--radii", type=int, nargs="*", default=[2, 4, 6, 8])
    args = ap.parse_args()
    for name, s in SYSTEMS.items():
        f = TestFunction.gaussian(s.r, a=args.width, center=[Fraction(1, 3)] * s.r)
        print(f"== {name}: {len(em_terms(s))} admissible subspaces")
        for R in args.radii:
            rep = em_verify(s, f, EMConfig(lattice_radius=R, quad_order=args.order))
            print(f"  R={R:<3} lhs={rep.lhs:.15f} rhs={rep.rhs:.15f} err={rep.abs_error:.2e}")


if __name__ == "__main__":
    main()
