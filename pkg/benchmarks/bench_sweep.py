"""Compare the compiled sweep kernel with the pure-Python fallback.

    python benchmarks/bench_sweep.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from radplan import netmodel, powerflow
from radplan._sweep_py import sweep as sweep_py
from radplan.netmodel import Design

try:
    from radplan._sweep import sweep as sweep_c
except ImportError:
    sweep_c = None


def sweep_inputs(case, design, year):
    pu = netmodel.to_per_unit(case)
    zr, zx, _ = powerflow.branch_impedances(pu, design)
    inj = powerflow.year_injections(pu, design, year)
    p = np.bincount(pu.bus_node, weights=inj.p_net, minlength=pu.n_nodes)
    q = np.bincount(pu.bus_node, weights=inj.q_net, minlength=pu.n_nodes)
    return pu.node_parent, zr, zx, p, q, powerflow.TOLERANCE, powerflow.MAX_ITER


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    case = netmodel.builtin_case_26bus()
    rows = []
    for label, design in [("type 1", Design.uniform(case, 1)), ("type 4", Design.uniform(case, 4))]:
        inputs = sweep_inputs(case, design, case.economics.horizon_years)
        iters = sweep_py(*inputs)[4]
        t_py = best_of(lambda: sweep_py(*inputs), args.repeat, 200)
        t_c = best_of(lambda: sweep_c(*inputs), args.repeat, 2000) if sweep_c else float("nan")
        rows.append((label, iters, t_py, t_c))

    print(f"26-bus feeder, year 10 loads, kernel in use: {powerflow.KERNEL}")
    print(f"{'design':<8} {'iters':>5} {'python us':>10} {'cython us':>10} {'speedup':>8}")
    for label, iters, t_py, t_c in rows:
        print(f"{label:<8} {iters:>5} {t_py * 1e6:>10.1f} {t_c * 1e6:>10.1f} {t_py / t_c:>8.1f}")
    if sweep_c is None:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
