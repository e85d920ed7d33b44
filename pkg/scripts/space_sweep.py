#!/usr/bin/env python3
"""Sweep window size and error rate; tabulate measured bits vs. bounds.

Emits TSV to stdout, one row per (n, epsilon):
    n  epsilon  measured_bits  lower_bound_bits  ratio  bits_per_element
"""

import argparse

from slidingbloom import space_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+",
                    default=[2**10, 2**12, 2**14, 2**16])
    ap.add_argument("--eps-pow", type=int, nargs="+", default=[4, 6, 8, 10, 12],
                    help="epsilon = 2**-k for each k")
    ap.add_argument("--slack", choices=("window", "one"), default="window",
                    help="m = n ('window') or m = 1 ('one')")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("n\tepsilon\tmeasured_bits\tlower_bound_bits\tratio\tbits_per_element")
    for n in args.n:
        for k in args.eps_pow:
            eps = 2.0**-k
            m = n if args.slack == "window" else 1
            rep = space_report(n, m, eps, seed=args.seed)
            print(f"{n}\t2^-{k}\t{rep.measured_bits}\t{rep.lower_bound_bits:.0f}"
                  f"\t{rep.ratio:.3f}\t{rep.measured_bits / n:.2f}")


if __name__ == "__main__":
    main()
