"""Acceptance checks, one per criterion.

Each check returns (passed, detail) and enforces its own runtime budget.
Under pytest every check prints one PASS/FAIL line; run this file directly
to get just those lines.
"""
import math
import os
import sys
import tempfile
import time

import numpy as np
import pytest

from radplan import bspso, cli, econ, netmodel, planner
from radplan.bspso import SwarmConfig, VariableSpec
from radplan.netmodel import Design, to_per_unit
from radplan.planner import Evaluator, Scenario
from radplan.powerflow import branch_loss_pu, nodal_mismatch, solve, year_injections


def _timed(budget_s):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            elapsed = time.perf_counter() - t0
            if elapsed >= budget_s:
                ok = False
            return ok, f"{detail}; {elapsed:.1f} s (budget {budget_s:g} s)"
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1)
def criterion_1():
    """Formula exactness"""
    case = netmodel.builtin_case_26bus()
    values = {
        "loss_factor(0.25)": (econ.loss_factor(0.25), 0.1),
        "escalate(168, 0.05, 1)": (econ.escalate(168.0, 0.05, 1), 176.4),
        "capacitor_cost(1, 2, 2)": (econ.capacitor_cost(Design({}, {5: 1, 6: 2, 7: 2}), case), 4980.0),
        "dg_cost(2 units)": (econ.dg_cost(Design({}, {}, {9: 1, 25: 1}), case.dg_type), 8000.0),
    }
    bad = [k for k, (got, want) in values.items() if abs(got - want) > 1e-9]
    return not bad, "all four values exact" if not bad else f"mismatch in {bad}"


@_timed(1)
def criterion_2():
    """Power-flow integrity"""
    case = netmodel.builtin_case_26bus()
    pu = to_per_unit(case)
    design = Design.uniform(case, 1)
    sol = solve(pu, design, 0)
    resid = nodal_mismatch(sol, pu, design, year_injections(pu, design, 0))
    loss_gap = abs(sol.ploss_kw / pu.s_base_kva - branch_loss_pu(sol))
    ok = sol.converged and sol.iterations <= 50 and resid <= 1e-8 and loss_gap <= 1e-6
    return ok, f"{sol.iterations} iterations, nodal residual {resid:.2e}, loss gap {loss_gap:.2e} p.u."


@_timed(1)
def criterion_3():
    """Two-bus analytic oracle"""
    # 2 km of 0.5 + j0.4 ohm/km at 11 kV / 1 MVA feeding 500 kVA at pf 0.8
    text = """{"base_mva": 1.0, "base_kv": 11.0,
      "buses": [{"id": 0, "s_load_kva": 0, "power_factor": 1.0}, {"id": 1, "s_load_kva": 500, "power_factor": 0.8}],
      "sections": [{"id": 1, "from": 0, "to": 1, "length_km": 2.0}],
      "conductor_catalog": [{"id": 1, "r_per_km": 0.5, "x_per_km": 0.4, "price_per_km": 1, "i_max": 100}],
      "capacitor_catalog": [{"id": 1, "q_kvar": 0, "capital_cost": 0, "install_cost": 0}],
      "dg_type": {"p_rated_kw": 1, "q_rated_kvar": 0, "total_cost": 1},
      "economics": {"cp0": 1, "ce0": 1, "inflation": 0, "load_growth": 0, "load_factor": 0.5, "horizon_years": 1,
                    "v_min": 0.9, "v_max": 1.0, "cap_budget": 0, "dg_budget": 0}}"""
    case = netmodel.parse_case(text)
    sol = solve(to_per_unit(case), Design({1: 1}), 0)

    # by hand: I = conj(S / V) upstream, V = 1 - z I downstream, until V settles
    z = complex(1.0, 0.8) / 121.0
    s = complex(0.4, 0.3)
    v = 1.0 + 0j
    for _ in range(100):
        i = (s / v).conjugate()
        v_next = 1.0 - z * i
        if abs(v_next - v) < 1e-14:
            break
        v = v_next
    i = (s / v_next).conjugate()
    loss_hand = abs(i) ** 2 * z.real
    du = abs(sol.u[1] - abs(v_next))
    dl = abs(sol.ploss_kw / 1000.0 - loss_hand) / loss_hand
    return du <= 1e-8 and dl <= 1e-6, f"|dU| = {du:.1e} p.u., loss rel. error {dl:.1e}"


@_timed(60)
def criterion_4():
    """Oracle equivalence at desk scale"""
    case = netmodel.builtin_case_toy5()
    ev = Evaluator(case)
    sc = Scenario("full")
    oracle = planner.exhaustive_oracle(case, sc, ev)
    best = oracle.report.total_objective
    hits = 0
    for seed in range(10):
        res = planner.optimize(case, sc, SwarmConfig(n_particles=30, it_max=100, seed=seed), ev)
        if res.report.feasible and res.report.total_objective <= best * 1.001:
            hits += 1
    return hits >= 8, f"{hits}/10 seeds within 0.1% of the optimum {best:.2f} over {oracle.evaluations} designs"


@_timed(30)
def criterion_5():
    """Weight-sweep trends (exact)"""
    case = netmodel.builtin_case_toy5()
    rows = planner.omega_sweep(case, SwarmConfig(), [0.0, 0.25, 0.5, 0.75, 1.0], exact=True)
    cond = [r.cond_cost for r in rows]
    loss = [r.loss_cost for r in rows]
    ok = (
        all(r.feasible for r in rows)
        and all(b <= a for a, b in zip(cond, cond[1:]))
        and all(b >= a for a, b in zip(loss, loss[1:]))
        and rows[0].profile == (1,) * len(rows[0].profile)
    )
    return ok, f"cond {[round(c) for c in cond]}, loss {[round(c) for c in loss]}, profile at 0: {rows[0].profile}"


@_timed(600)
def criterion_6():
    """Scenario structure on the 26-bus feeder"""
    case = netmodel.builtin_case_26bus()
    ev = Evaluator(case)
    baseline = ev.evaluate(Design.uniform(case, 1), Scenario()).total_objective
    a_runs = [planner.optimize(case, Scenario("conductors_only"), SwarmConfig(seed=s), ev) for s in range(5)]
    b_runs = [planner.optimize(case, Scenario("full"), SwarmConfig(seed=s), ev) for s in range(5)]

    a_ok = all(r.report.feasible and r.report.total_objective <= baseline for r in a_runs)
    b_feasible = [r for r in b_runs if r.report.feasible]
    budgets_ok = all(
        r.report.breakdown.cap_cost <= 5000 and r.report.breakdown.dg_cost <= 10000 for r in b_runs
    )
    best_a = min(r.report.total_objective for r in a_runs if r.report.feasible)
    best_b = min((r.report.total_objective for r in b_feasible), default=math.inf)
    ok = a_ok and budgets_ok and bool(b_feasible) and best_b <= best_a
    detail = (f"baseline {baseline:.0f}, best A {best_a:.0f}, best B {best_b:.0f}, "
              f"B feasible {len(b_feasible)}/5, budgets respected: {budgets_ok}")
    return ok, detail


@_timed(5)
def criterion_7():
    """Selective-rule monotonicity and fallback"""
    rng = np.random.default_rng(2024)
    failures = 0
    for n in (2, 4, 5):
        spec = VariableSpec.selective(n)
        for _ in range(10_000):
            rd = rng.random()
            v1, v2 = sorted(rng.uniform(-8.0, 8.0, 2))
            i_lo = bspso.selective_position_update(v1, spec, rd)
            i_hi = bspso.selective_position_update(v2, spec, rd)
            if i_hi > i_lo:
                failures += 1
            sig = bspso.sigmoid(v1)
            if all(rd + a >= sig for a in spec.thresholds) and i_lo != n:
                failures += 1
        if bspso.selective_position_update(-50.0, spec, 0.5) != n:
            failures += 1
    return failures == 0, f"30000 trials, {failures} violations"


@_timed(600)
def criterion_8():
    """CLI determinism"""
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in ("a", "b"):
            out = os.path.join(tmp, run)
            code = cli.run_cli(["plan", "builtin:26bus", "--seed", "7", "--out", out])
            if code != 0:
                return False, f"plan exited with {code}"
            blobs.append(tuple(open(os.path.join(out, f), "rb").read() for f in ("result.json", "table.txt")))
    return blobs[0] == blobs[1], "result.json and table.txt byte-identical" if blobs[0] == blobs[1] else "outputs differ"


CHECKS = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def _line(n, check, ok, detail):
    return f"criterion {n} [{check.__doc__}]: {'PASS' if ok else 'FAIL'} ({detail})"


@pytest.mark.parametrize("n", range(1, len(CHECKS) + 1))
def test_criterion(n, capsys):
    check = CHECKS[n - 1]
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(n, check, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, check in enumerate(CHECKS, start=1):
        ok, detail = check()
        results.append(ok)
        print(_line(n, check, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
