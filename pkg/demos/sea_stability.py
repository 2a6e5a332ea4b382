"""Momentum-space checks for occupied mass shells.

Three quick experiments in 1+1 dimensions:
  1. convolution windows -- for a total momentum q inside the lower mass
     cone, the overlap with each shell is a compact rapidity interval
     whose endpoints are null-separated from q;
  2. spectral support -- the gradient field built from a cone-supported
     profile keeps its Fourier energy inside the mass cone as the grid
     refines;
  3. state stability -- a sampled (a, b) profile is stable when a >= 0
     and a + b attains its infimum exactly on the occupied shells.

Run:  python3 demos/sea_stability.py
"""

import numpy as np

from dstlab.continuum.momentum import convolution_support, fourier_support_check
from dstlab.continuum.seas import state_stability_check


def main():
    q = (-6.0, 1.5)
    masses = (1.0, 5.0, 20.0)
    print(f"q = {q}, shells at masses {masses}")
    for shell in convolution_support(q, masses):
        lo, hi = shell.momentum_bounds()
        print(f"  m = {shell.mass:4.1f}: rapidity [{shell.rapidity_min:+.3f}, "
              f"{shell.rapidity_max:+.3f}], momenta [{lo:+.2f}, {hi:+.2f}]")
        for p in shell.endpoint_vectors():
            dq = np.subtract(q, p)
            print(f"      endpoint {np.round(p, 3)}: (q-p).(q-p) = "
                  f"{dq[0]**2 - dq[1]**2:+.2e}")

    print("\nspectral leakage outside the mass cone:")
    for n in (128, 256, 512):
        report = fourier_support_check(grid_n=n)
        print(f"  {n:4d}^2 grid: leakage = {report['leakage']:.3e}")

    print("\nstate stability on a sampled profile (shell masses 1 and 2):")
    qsq = np.round(np.arange(0.5, 5.01, 0.05), 10)
    a = np.zeros_like(qsq)
    b = (qsq - 1.0) ** 2 * (qsq - 4.0) ** 2  # minima exactly at q.q = 1, 4
    verdict = state_stability_check(qsq, a, b, masses=[1.0, 2.0])
    print(f"  shells at the two minima -> stable = {verdict['stable']}")
    verdict = state_stability_check(qsq, a, b, masses=[1.0, 1.5])
    print(f"  second shell moved off its minimum -> stable = {verdict['stable']}")
    for v in verdict["violations"]:
        print(f"      violation: {v}")


if __name__ == "__main__":
    main()
