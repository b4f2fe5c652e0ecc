"""Last points of the problem3 orbit sampled once per period.

    python3 scripts/strobe_table.py                  # delay y(floor t)
    python3 scripts/strobe_table.py --delay-unit T   # delay y(T floor(t / T))
"""

import argparse

import numpy as np

from hbvm_fdepca.cli import parse_time
from hbvm_fdepca.diagnostics import stroboscopic_sample
from hbvm_fdepca.integrator import GeneralStep, SolveConfig, integrate
from hbvm_fdepca.problem import PROBLEM3_PERIOD as T
from hbvm_fdepca.problem import builtin


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="+", default=[2, 4, 10])
    ap.add_argument("--last", type=int, default=20)
    ap.add_argument("--steps", type=float, default=2e5)
    ap.add_argument("--delay-unit", type=parse_time, default=1.0)
    args = ap.parse_args()
    h = T / 100
    p = builtin("problem3", delay_unit=args.delay_unit)
    for k in args.k:
        traj = integrate(p, SolveConfig(k, 2, GeneralStep(h), args.steps * h, sample_every=100, keep_records=False))
        _, y = stroboscopic_sample(traj, T)
        y = y[-args.last :]
        print(f"\nHBVM({k},2), delay unit {args.delay_unit:.16g}")
        for q, pp in y:
            print(f"{q:22.15e} {pp:22.15e}")
        d = np.abs(np.diff(y, axis=0)).max(axis=0)
        print(f"max consecutive |dq| = {d[0]:.3e}, |dp| = {d[1]:.3e}")


if __name__ == "__main__":
    main()
