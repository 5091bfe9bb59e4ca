#!/usr/bin/env python3
"""Margin sweep for the orbit perturbation certificates.

Evaluates the Riesz and weighted-frame certificates on the block
instance (two-step shift plus a contraction coordinate) over a grid of
perturbation sizes, printing the margin, the operative proof sum, and
the bounds of the perturbed system.
"""

import argparse

import numpy as np

from dynsamp_lab import perturb
from dynsamp_lab.dynsamp import WeightSpec


def block(mu):
    t = np.zeros((3, 3), dtype=complex)
    t[1, 0] = 1.0
    t[2, 2] = mu
    return t


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mu", type=float, default=0.5,
                        help="contraction factor on the invariant coordinate")
    parser.add_argument("--scales", type=float, nargs="+",
                        default=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8])
    parser.add_argument("--horizon", type=int, default=2)
    args = parser.parse_args()

    cd = perturb.contraction_data(block(args.mu), np.eye(3, dtype=complex)[:, 2:])
    phi = np.array([1.0, 0.0, 0.0], dtype=complex)
    psi_dir = np.array([0.0, 0.0, 1.0], dtype=complex)

    print("Riesz-sequence certificate")
    print(f"{'|psi|':>6}  {'margin':>9}  {'proof sum':>9}  {'verdict':>7}  "
          f"{'perturbed A':>11}")
    for s in args.scales:
        cert = perturb.riesz_perturbation_certificate(
            cd, phi, s * psi_dir, horizon=args.horizon)
        print(f"{s:>6.2f}  {cert.margin:>9.4f}  "
              f"{cert.hypothesis_values['proof_sum_total']:>9.4f}  "
              f"{str(cert.verdict):>7}  {cert.conclusion_check.a_opt:>11.5f}")

    print()
    print("Weighted-frame certificate (constant weights)")
    print(f"{'|psi|':>6}  {'margin':>9}  {'verdict':>7}  "
          f"{'ambient A':>10}  {'span A':>10}")
    w = WeightSpec.constant(1.0)
    for s in args.scales:
        cert = perturb.weighted_frame_perturbation_certificate(
            cd, phi, s * psi_dir, w, horizon=args.horizon + 3)
        print(f"{s:>6.2f}  {cert.margin:>9.4f}  {str(cert.verdict):>7}  "
              f"{cert.conclusion_check.a_opt:>10.6f}  "
              f"{cert.hypothesis_values['part_i_span_lower']:>10.6f}")


if __name__ == "__main__":
    main()
