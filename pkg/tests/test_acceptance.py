"""Acceptance criteria, one test per criterion.

Every check prints a ``[PASS]``/``[FAIL]`` line (collected again in the
terminal summary). Run directly with ``python3 tests/test_acceptance.py``
for the report without pytest.
"""

import sys
import time

import numpy as np
import pytest

from hbvm_fdepca.diagnostics import convergence_table, hamiltonian_series, stroboscopic_sample
from hbvm_fdepca.integrator import AlignedStep, GeneralStep, SolveConfig, dense_eval, integrate
from hbvm_fdepca.legendre import eval_basis
from hbvm_fdepca.problem import PROBLEM3_PERIOD, FdepcaProblem, builtin, hamiltonian
from hbvm_fdepca.quadrature import apply_rule, gauss_legendre
from hbvm_fdepca.tableau import build_tableau, gauss_collocation_matrix

T = PROBLEM3_PERIOD
REPORT: list[str] = []


def report(label: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    REPORT.append(line)
    print(line)
    return ok


def fmt(xs):
    return "[" + ", ".join(f"{x:.4f}" for x in xs) + "]"


def orders(problem, k, s, h0, levels, t_end):
    return [r.p for r in convergence_table(problem, k, s, h0, levels, t_end)[1:]]


def test_criterion_1_table1_orders():
    p = builtin("problem1")
    ok = True
    for (k, s), lo, hi in [((2, 2), 3.8, 4.3), ((10, 2), 3.8, 4.3), ((15, 3), 5.8, 6.2)]:
        ps = orders(p, k, s, AlignedStep(20), 3, 2.0)
        ok &= report(f"C1 problem1 HBVM({k},{s}) h=1/20..1/160", all(lo <= x <= hi for x in ps), f"p={fmt(ps)} in [{lo}, {hi}]")
    assert ok


def test_criterion_2_table1_errors():
    p = builtin("problem1")
    e22 = [r.eps for r in convergence_table(p, 2, 2, AlignedStep(20), 3, 2.0)]
    e102 = [r.eps for r in convergence_table(p, 10, 2, AlignedStep(20), 3, 2.0)]
    ok = report("C2 eps(1/20) HBVM(2,2) within x5 of 5.1981e-06", 5.1981e-06 / 5 <= e22[0] <= 5.1981e-06 * 5, f"eps={e22[0]:.4e}")
    ok &= report(
        "C2 HBVM(10,2) error below HBVM(2,2) at every h",
        all(a < b for a, b in zip(e102, e22)),
        "eps(10,2)=[" + ", ".join(f"{x:.3e}" for x in e102) + "] eps(2,2)=[" + ", ".join(f"{x:.3e}" for x in e22) + "]",
    )
    assert ok


def test_criterion_3_table2_orders():
    p = builtin("problem2")
    ok = True
    for k, s in [(2, 2), (10, 2)]:
        ps = orders(p, k, s, GeneralStep(0.5), 4, 2.0)
        good = 3.8 <= ps[0] <= 4.4 and all(3.8 <= x <= 4.4 for x in ps[1:])
        ok &= report(f"C3 problem2 HBVM({k},{s}) h=1/2..1/32", good, f"p={fmt(ps)} in [3.8, 4.4]")
    ps = orders(p, 15, 3, GeneralStep(0.5), 4, 2.0)
    ok &= report("C3 problem2 HBVM(15,3) h=1/2..1/32", all(5.8 <= x <= 6.1 for x in ps), f"p={fmt(ps)} in [5.8, 6.1]")
    assert ok


def test_criterion_4_hamiltonian_containment():
    p = builtin("problem2")
    ok = True
    for (k, s), above in [((2, 2), True), ((10, 2), False)]:
        t0 = time.perf_counter()
        traj = integrate(p, SolveConfig(k, s, GeneralStep(0.5), 500.0, keep_records=False))
        dt = time.perf_counter() - t0
        Hmax = float(hamiltonian(p, traj.states).max())
        good = (Hmax > 1) if above else (Hmax < 1)
        ok &= report(f"C4 problem2 HBVM({k},{s}) h=1/2 [0,500] max H {'>' if above else '<'} 1", good, f"max H={Hmax:.6f} ({dt:.2f} s)")
    assert ok


def test_criterion_5_table3_orders():
    p = builtin("problem3")
    horizon = 35 * T / 100
    ps = orders(p, 10, 2, GeneralStep(T / 100), 4, horizon)
    ok = report("C5 problem3 HBVM(10,2) h=T/100..T/1600, from second pair", all(3.8 <= x <= 4.1 for x in ps[1:]), f"p={fmt(ps)}, checked {fmt(ps[1:])} in [3.8, 4.1]")
    ps = orders(p, 15, 3, GeneralStep(T / 100), 4, horizon)
    ok &= report("C5 problem3 HBVM(15,3) h=T/100..T/1600", all(5.4 <= x <= 6.1 for x in ps), f"p={fmt(ps)} in [5.4, 6.1]")
    assert ok


def strobe_last20(problem, k, s):
    h = T / 100
    traj = integrate(problem, SolveConfig(k, s, GeneralStep(h), 2e5 * h, sample_every=100, keep_records=False))
    _, y = stroboscopic_sample(traj, T)
    return np.abs(np.diff(y[-20:], axis=0)).max(axis=0)


def periodicity_checks(problem, tag):
    ok = True
    for k, s in [(4, 2), (10, 2)]:
        dq, dp = strobe_last20(problem, k, s)
        ok &= report(f"{tag} HBVM({k},{s}) last 20 samples periodic", dq < 1e-8 and dp < 1e-8, f"max|dq|={dq:.3e} max|dp|={dp:.3e} (< 1e-8)")
    dq, dp = strobe_last20(problem, 2, 2)
    ok &= report(f"{tag} HBVM(2,2) last 20 samples not periodic", dq > 1e-6, f"max|dq|={dq:.3e} (> 1e-6)")
    return ok


def test_criterion_6_stroboscopic_periodicity():
    """Literal delay y(floor t); see the ledger for why this is expected to fail."""
    assert periodicity_checks(builtin("problem3"), "C6 problem3 h=T/100 [0,2e5 h]")


def test_criterion_6_variant_delay_unit_period():
    """Same run with the delay sampled once per period, y(T floor(t / T)).

    Not the stated criterion; reported separately as a diagnostic.
    """
    assert periodicity_checks(builtin("problem3", delay_unit=T), "C6-variant delay unit T")


def test_criterion_7_properties():
    ok = True
    worst = 0.0
    for k in range(1, 13):
        rule = gauss_legendre(k)
        worst = max(worst, max(abs(apply_rule(rule, rule.c**d) - 1 / (d + 1)) for d in range(2 * k)))
    ok &= report("C7 Gauss exactness to degree 2k-1, k<=12", worst < 1e-14, f"max err={worst:.2e}")

    rule = gauss_legendre(32)
    P = eval_basis(30, rule.c)
    err = np.abs(P * rule.b @ P.T - np.eye(31)).max()
    ok &= report("C7 basis orthonormality, degree<=30", err < 1e-13, f"max err={err:.2e}")

    err = max(np.abs(build_tableau(s, s).A - gauss_collocation_matrix(s)).max() for s in range(1, 9))
    ok &= report("C7 HBVM(s,s) equals Gauss collocation, s<=8", err < 1e-12, f"max err={err:.2e}")

    err = max(np.abs(build_tableau(k, s).A.sum(1) - gauss_legendre(k).c).max() for k in range(1, 17) for s in range(1, k + 1))
    ok &= report("C7 tableau row sums equal c", err < 1e-12, f"max err={err:.2e}")

    lin = FdepcaProblem("floor_linear", 1, lambda y, yd: np.broadcast_to(yd, np.shape(y)).copy(), [1.0])
    traj = integrate(lin, SolveConfig(3, 2, AlignedStep(4), 2.0))
    e1, e2 = abs(traj.delay_cache[1][0] - 2), abs(traj.y_final[0] - 4)
    ok &= report("C7 y'=y(floor t): y(1)=2, y(2)=4", max(e1, e2) < 1e-13, f"errs={e1:.1e}, {e2:.1e}")

    p = builtin("problem1", alpha=0.0)
    traj = integrate(p, SolveConfig(4, 2, AlignedStep(10), 10.0))
    H = hamiltonian(p, traj.states)
    err = np.abs(H - H[0]).max()
    ok &= report("C7 alpha=0 quartic Hamiltonian conserved by HBVM(4,2) on [0,10]", err < 1e-12, f"max|H-H0|={err:.2e}")

    err = max(np.abs(dense_eval(r, 1.0) - r.y_right).max() for r in traj.records)
    ok &= report("C7 dense output endpoint consistency", err < 1e-14, f"max err={err:.2e}")

    cfg = SolveConfig(10, 2, GeneralStep(T / 100), 3.0)
    a, b = integrate(builtin("problem3"), cfg), integrate(builtin("problem3"), cfg)
    same = a.gammas.tobytes() == b.gammas.tobytes() and a.states.tobytes() == b.states.tobytes()
    ok &= report("C7 bit-identical repeated runs", same, "gammas and states compared bytewise")
    assert ok


def test_figure1_drift_band_truncated():
    """problem1, h=1/50 on [0, 1e4] in place of [0, 1e5]: |dH| within [0, 1e-2]."""
    p = builtin("problem1")
    ok = True
    for k, s in [(2, 2), (10, 2)]:
        traj = integrate(p, SolveConfig(k, s, AlignedStep(50), 1e4, keep_records=False))
        d = hamiltonian_series(traj, p)
        ok &= report(f"Fig1 problem1 HBVM({k},{s}) h=1/50 [0,1e4] |dH| <= 1e-2", d.max_dH <= 1e-2, f"max|dH|={d.max_dH:.3e}, H in [{d.H.min():.4f}, {d.H.max():.4f}]")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
