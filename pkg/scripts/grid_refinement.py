"""Unconstrained and constrained values of the cascade under grid refinement.

    python scripts/grid_refinement.py --nz 17 33 65 129 --delta 0.5

The constrained solve is skipped above ``--max-lp-nz`` nodes.
"""

import argparse
import time

import numpy as np

from alarmflag.augment import augment
from alarmflag.mdp import backward_induction
from alarmflag.plant import CascadeModel, Grid, discretize
from alarmflag.solver import ConstraintSpec, solve_constrained


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--nz", type=int, nargs="+", default=[17, 33, 65, 129])
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--horizon", type=int, default=15)
    ap.add_argument("--max-lp-nz", type=int, default=33)
    args = ap.parse_args()

    model = CascadeModel()
    values = []
    print("Nz,bi_value,constrained_value,p_ge_1,seconds")
    for nz in args.nz:
        t0 = time.perf_counter()
        dm = discretize(model, Grid(nz=nz), args.horizon)
        bi = backward_induction(dm.mdp).value
        values.append(bi)
        cv = p = ""
        if nz <= args.max_lp_nz:
            rep = solve_constrained(augment(dm.mdp, dm.alarms, 1), ConstraintSpec(args.delta))
            cv, p = f"{rep.value:.12g}", f"{rep.alarm_probabilities[0]:.12g}"
        print(f"{nz},{bi:.12g},{cv},{p},{time.perf_counter() - t0:.1f}")
    diffs = np.abs(np.diff(values))
    print("successive |differences| of the unconstrained value:",
          " ".join(f"{d:.4g}" for d in diffs))


if __name__ == "__main__":
    main()
