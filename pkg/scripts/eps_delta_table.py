"""Minimax fit error eps_delta across delta, with an independent linear-programming check.

    python3 scripts/eps_delta_table.py --points 4001
"""
import argparse

import numpy as np
from scipy.optimize import linprog

from scandiction import bounds as B


def lp_epsilon(delta, points):
    p = np.linspace(delta, 0.5, points)
    h = B.binary_entropy(p)
    f = np.minimum((p - delta) / (1 - 2 * delta), delta)
    one = np.ones_like(p)
    A = np.vstack([np.column_stack([h, one, -one]), np.column_stack([-h, -one, -one])])
    res = linprog([0, 0, 1], A_ub=A, b_ub=np.concatenate([f, -f]), bounds=[(None, None)] * 3, method="highs")
    return res.x[2]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--points", type=int, default=4001)
    args = ap.parse_args()
    print("delta,eps_delta,a,b,eps_lp,two_eps")
    for d in (0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.49, 0.499):
        fit = B.epsilon_delta(d)
        print(f"{d},{fit.epsilon:.6f},{fit.a:.6f},{fit.b:.6f},{lp_epsilon(d, args.points):.6f},{2 * fit.epsilon:.6f}")


if __name__ == "__main__":
    main()
