"""Symbolic light-cone bookkeeping for the chain of a continuum kernel.

The kernel near the light cone is an expansion in inverse powers of the
squared separation with scalar coefficients C0..C3 and step/theta vector
terms D0..D3.  Multiplying kernel by swapped kernel symbolically shows
which structures survive in the closed chain: the leading scalar poles,
the exact cancellation of the odd slash term, and the doubling of the
vector coefficient in the traceless gradient.

Run:  python3 demos/lightcone_coefficients.py
"""

import sympy

from dstlab.continuum.lightcone import (
    C_SYMBOLS,
    expansion_product,
    gradient_expansion,
    standard_expansion,
)

C0, C1, C2, C3 = C_SYMBOLS


def main():
    kernel = standard_expansion()
    print("kernel terms:")
    for term in kernel.terms:
        print("  ", term)

    chain = expansion_product(kernel)
    print("\nclosed chain = kernel * swapped kernel:")
    for term in chain.terms:
        print("  ", term)

    print("\nqueried coefficients:")
    print("  scalar, third-order pole :", chain.coefficient(slash=0, pole=3))
    print("  scalar, second-order pole:", sympy.expand(chain.coefficient(slash=0, pole=2)))
    print("  slash at the third pole  :", chain.coefficient(slash=1, pole=3), " (cancels)")
    vec = chain.coefficient(slash=1, pole=2, theta=1, step=1)
    print("  step*theta vector term   :", vec)

    grad = gradient_expansion(chain)
    gvec = grad.coefficient(slash=1, pole=2, theta=1, step=1)
    print("\ntraceless gradient doubles the vector term:", gvec)
    print("scalar part of the gradient:", grad.scalar_part().terms or "(empty)")

    # same algebra on a concrete rational instance
    inst = expansion_product(standard_expansion({"C0": [1, 2], "C1": [1, 3]}))
    print("\nwith C0 = 1/2, C1 = 1/3 the leading pole is",
          inst.coefficient(slash=0, pole=3))


if __name__ == "__main__":
    main()
