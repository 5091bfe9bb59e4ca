#!/usr/bin/env python3
"""Sweep the diagonal orbit family across truncation dimensions.

For T_d = diag(1 - 2^-k) and generator b_k = sqrt(1 - (1 - 2^-k)^2) the
exact infinite-orbit frame operator is computed through the Stein
equation at each dimension.  The lower bound stays positive and
non-increasing while the operator norm climbs toward one, which is the
point of the experiment.
"""

import argparse

import numpy as np

from dynsamp_lab import numkit


def sweep(dims):
    rows = []
    for d in dims:
        lam = 1.0 - 2.0 ** -(np.arange(1, d + 1))
        b = np.sqrt(1.0 - lam**2)
        sol = numkit.solve_stein(np.diag(lam).astype(complex),
                                 np.outer(b, b).astype(complex))
        w = np.linalg.eigvalsh(sol.s)
        rows.append((d, float(w[0]), float(w[-1]), float(lam[-1]),
                     sol.residual))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+",
                        default=[2, 4, 8, 16, 24, 32, 48, 64])
    args = parser.parse_args()

    print(f"{'dim':>4}  {'lambda_min':>12}  {'lambda_max':>12}  "
          f"{'op_norm':>18}  {'residual':>10}")
    for d, lo, hi, norm, res in sweep(args.dims):
        print(f"{d:>4}  {lo:>12.6e}  {hi:>12.6e}  {norm:>18.16f}  {res:>10.2e}")


if __name__ == "__main__":
    main()
