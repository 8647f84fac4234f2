"""Print the chain terms and trapezoid estimate for the 1x1 instance A = 2, B = -2.

With f(t) = t^2 and eta1, the path runs from 2 to V = 1, so every term has a
closed form; the script prints computed values next to them.
"""
from fractions import Fraction

import numpy as np

from hh_opverify import HermitianMatrix, make_eta1
from hh_opverify.functions import square
from hh_opverify.hh import corollary1_check, hh_chain, trapezoid_estimate


def closed_form_lhs(a, b):
    def Phi(t):
        return (8 - (2 - t) ** 3) / 3

    def Phi_int(t):
        return Fraction(8, 3) * t + (2 - t) ** 4 / 12

    return abs(Phi(a) / 2 + Phi(b) / 2 - (Phi_int(b) - Phi_int(a)) / (b - a))


def main():
    A, B = HermitianMatrix([[2.0]]), HermitianMatrix([[-2.0]])
    eta = make_eta1()
    rep = hh_chain(square(), eta, A, B)
    exact = [Fraction(9, 4), Fraction(37, 16), Fraction(7, 3), Fraction(19, 8), Fraction(4)]
    print(f"V = {rep.V.data[0, 0].real:g}")
    for name, T, e in zip("MQIRE", rep.terms, exact):
        print(f"{name} = {T.data[0, 0].real:.17g}   exact {e} = {float(e):.17g}")
    print("gaps", " ".join(f"{g:.6g}" for g in rep.gaps))
    cor = corollary1_check(rep)
    print(f"I - M = {cor.lower_gap:.6g}, (E - I) - (I - M) = {cor.slack:.6g}")
    est = trapezoid_estimate(square(), eta, A, B, 0.25, 0.75, np.array([1.0]))
    print(f"trapezoid lhs {est.lhs:.17g} (exact {float(closed_form_lhs(Fraction(1, 4), Fraction(3, 4))):.17g})"
          f", rhs {est.rhs:.17g}, holds {est.holds}")


if __name__ == "__main__":
    main()
