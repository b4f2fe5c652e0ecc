"""Long runs behind the Hamiltonian plots, written as CSV for plotting.

    python3 scripts/hamiltonian_runs.py quartic  --t-end 1e4
    python3 scripts/hamiltonian_runs.py pendulum
    python3 scripts/hamiltonian_runs.py cassini  --stride 100

``quartic``: problem1, HBVM(2,2) and HBVM(10,2), h = 1/50.
``pendulum``: problem2 on [0, 500], h = 1/2, with the relative H error
against HBVM(22,20) at the same step.
``cassini``: problem3, HBVM(k,2) for k = 2, 4, 10, h = T/100 on [0, 2e5 h].
"""

import argparse
from pathlib import Path

import numpy as np

from hbvm_fdepca.integrator import AlignedStep, GeneralStep, SolveConfig, integrate
from hbvm_fdepca.problem import PROBLEM3_PERIOD as T
from hbvm_fdepca.problem import builtin, hamiltonian


def run(problem, k, s, step, t_end, stride):
    traj = integrate(problem, SolveConfig(k, s, step, t_end, sample_every=stride, keep_records=False))
    H = hamiltonian(problem, traj.states)
    return traj.times, traj.states, H


def write(path, columns):
    names = list(columns)
    data = np.column_stack([columns[n] for n in names])
    np.savetxt(path, data, delimiter=",", header=",".join(names), comments="", fmt="%.17g")
    print(f"-> {path} ({len(data)} rows)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("experiment", choices=["quartic", "pendulum", "cassini"])
    ap.add_argument("--t-end", type=float)
    ap.add_argument("--stride", type=int, default=1, help="keep every n-th step")
    ap.add_argument("--delay-unit", type=float, default=1.0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    if args.experiment == "quartic":
        p = builtin("problem1", delay_unit=args.delay_unit)
        t_end = args.t_end or 1e4
        for k, s in [(2, 2), (10, 2)]:
            t, y, H = run(p, k, s, AlignedStep(50), t_end, args.stride)
            write(args.out / f"quartic_hbvm{k}{s}.csv", dict(t=t, q=y[:, 0], p=y[:, 1], H=H, absdH=np.r_[0.0, np.abs(np.diff(H))]))
    elif args.experiment == "pendulum":
        p = builtin("problem2", delay_unit=args.delay_unit)
        t_end = args.t_end or 500.0
        _, _, H_ref = run(p, 22, 20, GeneralStep(0.5), t_end, args.stride)
        for k, s in [(2, 2), (10, 2)]:
            t, y, H = run(p, k, s, GeneralStep(0.5), t_end, args.stride)
            write(args.out / f"pendulum_hbvm{k}{s}.csv", dict(t=t, q=y[:, 0], p=y[:, 1], H=H, relerr_H=np.abs(H - H_ref) / np.abs(H_ref)))
            print(f"HBVM({k},{s}): max H = {H.max():.6f}")
    else:
        p = builtin("problem3", delay_unit=args.delay_unit)
        h = T / 100
        t_end = args.t_end or 2e5 * h
        for k in (2, 4, 10):
            t, y, H = run(p, k, 2, GeneralStep(h), t_end, args.stride)
            write(args.out / f"cassini_hbvm{k}2.csv", dict(t=t, q=y[:, 0], p=y[:, 1], absH=np.abs(H)))


if __name__ == "__main__":
    main()
