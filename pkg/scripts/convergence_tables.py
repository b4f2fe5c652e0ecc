"""Step-halving error/order tables for the three built-in problems.

    python3 scripts/convergence_tables.py --out results/
"""

import argparse
from pathlib import Path

from hbvm_fdepca.diagnostics import convergence_table
from hbvm_fdepca.integrator import AlignedStep, GeneralStep
from hbvm_fdepca.problem import PROBLEM3_PERIOD as T
from hbvm_fdepca.problem import builtin

METHODS = [(2, 2), (10, 2), (15, 3)]
# name -> (first step, levels, horizon)
SETUPS = {
    "problem1": (AlignedStep(20), 4, 2.0),
    "problem2": (GeneralStep(0.5), 5, 2.0),
    "problem3": (GeneralStep(T / 100), 5, 35 * T / 100),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--problems", nargs="+", default=list(SETUPS))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.problems:
        h0, levels, t_end = SETUPS[name]
        tables = {ks: convergence_table(builtin(name), *ks, h0, levels, t_end) for ks in METHODS}
        path = args.out / f"convergence_{name}.csv"
        with open(path, "w") as fh:
            fh.write("h," + ",".join(f"eps_{k}_{s},p_{k}_{s}" for k, s in METHODS) + "\n")
            for i in range(levels):
                cells = [f"{tables[METHODS[0]][i].h:.17g}"]
                for ks in METHODS:
                    r = tables[ks][i]
                    cells += [f"{r.eps:.17g}", "" if r.p is None else f"{r.p:.17g}"]
                fh.write(",".join(cells) + "\n")
        print(f"\n{name}  (t_end = {t_end:.6g})")
        print(f"{'h':>12}" + "".join(f"{f'eps({k},{s})':>14}{'p':>9}" for k, s in METHODS))
        for i in range(levels):
            line = f"{tables[METHODS[0]][i].h:12.6g}"
            for ks in METHODS:
                r = tables[ks][i]
                line += f"{r.eps:14.4e}" + (f"{r.p:9.4f}" if r.p is not None else f"{'---':>9}")
            print(line)
        print(f"-> {path}")


if __name__ == "__main__":
    main()
