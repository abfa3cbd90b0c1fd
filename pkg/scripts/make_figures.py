"""Write the data behind every figure as CSV, plus a manifest, into one directory.

    python3 scripts/make_figures.py --out figures --symbols 200000 --step 0.02
"""
import argparse
import sys

from scandiction.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--symbols", type=int, default=200_000, help="Monte Carlo symbols per (pi, delta) cell")
    ap.add_argument("--step", type=float, default=0.02, help="(pi, delta) grid step for the HMM maps")
    ap.add_argument("--jobs", type=int, default=0)
    args = ap.parse_args()
    sys.exit(cli_main(["figures", "--fig", "all", "--out", args.out, "--symbols", str(args.symbols),
                       "--step", str(args.step), "--jobs", str(args.jobs)]))


if __name__ == "__main__":
    main()
