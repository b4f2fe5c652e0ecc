"""Command-line front end: ``tableau``, ``solve``, ``converge``, ``strobe``.

Numeric output is written with 17 significant digits so that CSV files
round-trip binary64 values exactly. Metadata lines start with ``#``.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np

from hbvm_fdepca.diagnostics import (
    ConvergenceTableError,
    convergence_table,
    stroboscopic_sample,
)
from hbvm_fdepca.errors import EvaluationError, HbvmError, InvalidParameterError, StepFailure
from hbvm_fdepca.integrator import BREAKPOINT_MODES, AlignedStep, GeneralStep, SolveConfig, integrate
from hbvm_fdepca.problem import BUILTIN_NAMES, PROBLEM3_PERIOD, builtin, hamiltonian
from hbvm_fdepca.tableau import build_tableau

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_FRACTION = re.compile(r"^\s*(?:(?P<num>[0-9.eE+-]+)\s*\*?\s*)?T\s*(?:/\s*(?P<den>[0-9.eE+-]+))?\s*$")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_time(token: str) -> float:
    """A real number, or an expression ``[a*]T[/b]`` in the problem3 period."""
    m = _FRACTION.match(token)
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        return num * PROBLEM3_PERIOD / den
    try:
        return float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or T-expression: {token!r}") from None


@dataclass
class RunManifest:
    """Parameters of a run, echoed as ``#`` header lines."""

    command: str
    params: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"# command: {self.command}"]
        for key, val in self.params.items():
            if isinstance(val, float):
                val = fmt(val)
            out.append(f"# {key}: {val}")
        out.append("# deterministic: true")
        return out

    def write(self, fh: TextIO):
        for line in self.lines():
            fh.write(line + "\n")


class UsageError(Exception):
    pass


def _open_out(path: Optional[str]) -> TextIO:
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", newline="")


def _problem(args):
    y0 = None
    if args.q0 is not None or args.p0 is not None:
        base = builtin(args.problem).y0
        y0 = (
            base[0] if args.q0 is None else args.q0,
            base[1] if args.p0 is None else args.p0,
        )
    return builtin(args.problem, alpha=args.alpha, y0=y0, delay_unit=args.delay_unit)


def _step(args):
    if args.nu is not None:
        return AlignedStep(args.nu)
    if args.h is not None:
        return GeneralStep(args.h)
    raise UsageError("one of --nu or --h is required")


def _manifest(command: str, args, problem, **extra) -> RunManifest:
    params = {
        "problem": problem.name,
        "k": args.k,
        "s": args.s,
        "step": f"nu={args.nu}" if args.nu is not None else f"h={fmt(args.h)}",
        "t_end": args.t_end,
        "alpha": problem.alpha,
        "q0": float(problem.y0[0]),
        "p0": float(problem.y0[1]),
        "delay_unit": problem.delay_unit,
        "breakpoints": args.breakpoints,
    }
    params.update(extra)
    return RunManifest(command, params)


def cmd_tableau(args, out: TextIO) -> int:
    tab = build_tableau(args.k, args.s)
    out.write(f"# HBVM({args.k},{args.s})\n")
    for name, arr in (("c", tab.c), ("b", tab.b), ("A", tab.A), ("Ps", tab.Ps), ("Is", tab.Is)):
        out.write(f"{name}:\n")
        for row in np.atleast_2d(arr):
            out.write(" ".join(fmt(x) for x in row) + "\n")
    return EXIT_OK


def _solve_rows(traj, problem):
    """One row per sampled step endpoint; the initial state is in the manifest."""
    t, y = traj.times, traj.states
    if problem.hamiltonian is None:
        header = ["t"] + [f"y{i}" for i in range(problem.m)]
        return header, [[ti, *yi] for ti, yi in zip(t[1:], y[1:])]
    H = np.asarray(hamiltonian(problem, y))
    dH = np.abs(np.diff(H))
    rows = [[ti, yi[0], yi[1], Hi, di] for ti, yi, Hi, di in zip(t[1:], y[1:], H[1:], dH)]
    return ["t", "q", "p", "H", "absdH"], rows


def _write_csv(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if x is not None else "" for x in row])


def cmd_solve(args, out: TextIO) -> int:
    problem = _problem(args)
    config = SolveConfig(
        args.k,
        args.s,
        _step(args),
        args.t_end,
        sample_every=args.sample_every,
        keep_records=False,
        breakpoints=args.breakpoints,
    )
    _manifest("solve", args, problem, sample_every=args.sample_every).write(out)
    try:
        traj = integrate(problem, config)
    except (StepFailure, EvaluationError) as exc:
        header, rows = _solve_rows(exc.trajectory, problem)
        _write_csv(out, header, rows)
        out.write(f"# ABORTED at t={fmt(exc.trajectory.t_final)}: {exc}\n")
        out.flush()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    header, rows = _solve_rows(traj, problem)
    _write_csv(out, header, rows)
    return EXIT_OK


def cmd_converge(args, out: TextIO) -> int:
    if args.levels < 2:
        raise UsageError(f"--levels must be >= 2, got {args.levels}")
    problem = _problem(args)
    _manifest("converge", args, problem, levels=args.levels).write(out)
    try:
        rows = convergence_table(
            problem, args.k, args.s, _step(args), args.levels, args.t_end, breakpoints=args.breakpoints
        )
    except ConvergenceTableError as exc:
        _write_csv(out, ["h", "eps", "p"], [[r.h, r.eps, r.p] for r in exc.rows])
        out.write(f"# ABORTED: {exc}\n")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write_csv(out, ["h", "eps", "p"], [[r.h, r.eps, r.p] for r in rows])
    return EXIT_OK


def cmd_strobe(args, out: TextIO) -> int:
    problem = _problem(args)
    period = args.period if args.period is not None else PROBLEM3_PERIOD
    if not 0 < period <= args.t_end:
        raise UsageError(f"period {period} must lie in (0, t_end={args.t_end}]")
    step = _step(args)
    h = problem.delay_unit / step.nu if isinstance(step, AlignedStep) else step.h
    ratio = period / h
    stride = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 * ratio else 1
    config = SolveConfig(
        args.k,
        args.s,
        step,
        args.t_end,
        sample_every=stride,
        keep_records=stride == 1,
        breakpoints=args.breakpoints,
    )
    _manifest("strobe", args, problem, period=period, last_n=args.last_n).write(out)
    try:
        traj = integrate(problem, config)
    except (StepFailure, EvaluationError) as exc:
        out.write(f"# ABORTED at t={fmt(exc.trajectory.t_final)}: {exc}\n")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    t, y = stroboscopic_sample(traj, period)
    if args.last_n is not None:
        t, y = t[-args.last_n :], y[-args.last_n :]
    _write_csv(out, ["t", "q", "p"], [[ti, yi[0], yi[1]] for ti, yi in zip(t, y)])
    return EXIT_OK


def _positive_int(token: str) -> int:
    v = int(token)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {token}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbvm-fdepca", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tableau", help="print c, b, A, Ps, Is")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--out")

    def run_args(p):
        p.add_argument("--problem", choices=BUILTIN_NAMES, required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--s", type=int, required=True)
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--nu", type=_positive_int, help="aligned step h = delay_unit / nu")
        g.add_argument("--h", type=parse_time, help="general step; accepts T-expressions such as T/100")
        p.add_argument("--t-end", type=parse_time, required=True, help="horizon; accepts e.g. 2e5*T/100")
        p.add_argument("--alpha", type=float)
        p.add_argument("--q0", type=float)
        p.add_argument("--p0", type=float)
        p.add_argument("--delay-unit", type=parse_time, default=1.0, help="tau in y(tau floor(t/tau)); default 1")
        p.add_argument("--breakpoints", choices=BREAKPOINT_MODES, default="split")
        p.add_argument("--out")

    p = sub.add_parser("solve", help="integrate and write sampled endpoints")
    run_args(p)
    p.add_argument("--sample-every", type=_positive_int, default=1)

    p = sub.add_parser("converge", help="last-point errors and orders under step halving")
    run_args(p)
    p.add_argument("--levels", type=int, default=4)

    p = sub.add_parser("strobe", help="sample the orbit once per period")
    run_args(p)
    p.add_argument("--period", type=parse_time, help="default: the problem3 period T")
    p.add_argument("--last-n", type=_positive_int)
    return parser


_COMMANDS = {"tableau": cmd_tableau, "solve": cmd_solve, "converge": cmd_converge, "strobe": cmd_strobe}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        out = _open_out(getattr(args, "out", None))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, out)
    except (UsageError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HbvmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
