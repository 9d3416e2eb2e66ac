"""Radial AC power flow, nodal-balance residual and limit checks.

The sweep itself lives in a compiled kernel (``radplan._sweep``) with a
pure-Python fallback; set ``RADPLAN_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .netmodel import ConductorType, Design, Economics, PerUnitCase

if os.environ.get("RADPLAN_PURE_PYTHON"):
    from ._sweep_py import sweep as _sweep

    KERNEL = "python"
else:
    try:
        from ._sweep import sweep as _sweep

        KERNEL = "cython"
    except ImportError:
        from ._sweep_py import sweep as _sweep

        KERNEL = "python"

TOLERANCE = 1e-8
MAX_ITER = 50


class Violation(NamedTuple):
    kind: str  # undervoltage | overvoltage | overcurrent | divergence | capacitor budget | dg budget
    location: int | None  # bus or section id
    value: float
    limit: float
    year: int | None = None


@dataclass(frozen=True)
class YearInjections:
    """Per-bus injections for one year, p.u., aligned with ``PerUnitCase.bus_ids``."""

    p_demand: np.ndarray
    q_demand: np.ndarray
    p_dg: np.ndarray
    q_dg: np.ndarray
    q_cap: np.ndarray

    @property
    def p_net(self) -> np.ndarray:
        return self.p_demand - self.p_dg

    @property
    def q_net(self) -> np.ndarray:
        return self.q_demand - self.q_dg - self.q_cap


@dataclass(frozen=True)
class PowerFlowSolution:
    bus_ids: tuple[int, ...]
    v: np.ndarray  # complex, per bus
    section_ids: tuple[int, ...]
    i_pu: np.ndarray  # per sizable section
    i_amp: np.ndarray
    i_max_amp: np.ndarray
    r_pu: np.ndarray  # branch resistance, p.u.
    p_slack: float
    q_slack: float
    ploss_kw: float
    converged: bool
    iterations: int
    max_mismatch: float

    @property
    def u(self) -> np.ndarray:
        return np.abs(self.v)

    @property
    def delta(self) -> np.ndarray:
        return np.angle(self.v)

    def voltage(self, bus: int) -> float:
        return float(abs(self.v[self.bus_ids.index(bus)]))


def branch_admittance(conductor: ConductorType, length_km: float) -> tuple[float, float]:
    """Series conductance and susceptance (S) of a section."""
    if length_km <= 0:
        raise ValueError("zero-length section has no finite admittance")
    y = 1.0 / (length_km * complex(conductor.r_per_km, conductor.x_per_km))
    return y.real, y.imag


def equipment_injections(pu: PerUnitCase, design: Design) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-bus DG P, DG Q and capacitor Q (p.u.); constant over the horizon."""
    n = len(pu.bus_ids)
    p_dg = np.zeros(n)
    q_dg = np.zeros(n)
    q_cap = np.zeros(n)
    dg = pu.case.dg_type
    for idx, bus in enumerate(pu.bus_ids):
        if design.dg.get(bus, 0):
            p_dg[idx] = dg.p_rated_kw / pu.s_base_kva
            q_dg[idx] = dg.q_rated_kvar / pu.s_base_kva
        cap_id = design.capacitor.get(bus)
        if cap_id is not None:
            q_cap[idx] = pu.case.capacitor(cap_id).q_kvar / pu.s_base_kva
    return p_dg, q_dg, q_cap


def year_injections(pu: PerUnitCase, design: Design, year: int, equipment=None) -> YearInjections:
    growth = (1.0 + pu.case.economics.load_growth) ** year
    p_dg, q_dg, q_cap = equipment if equipment is not None else equipment_injections(pu, design)
    return YearInjections(pu.p_load * growth, pu.q_load * growth, p_dg, q_dg, q_cap)


def branch_impedances(pu: PerUnitCase, design: Design) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-node branch (r, x) in p.u. and per-node ampacity for the design."""
    n = pu.n_nodes
    zr = np.zeros(n)
    zx = np.zeros(n)
    imax = np.zeros(n)
    for k in range(1, n):
        sec = pu.node_section[k]
        try:
            t = design.conductor[sec] - 1
        except KeyError:
            raise ValueError(f"section {sec} has no conductor assigned") from None
        if not 0 <= t < len(pu.cond_r_pu):
            raise ValueError(f"section {sec}: unknown conductor type {t + 1}")
        length = pu.section_length[sec]
        zr[k] = pu.cond_r_pu[t] * length
        zx[k] = pu.cond_x_pu[t] * length
        imax[k] = pu.cond_imax[t]
    return zr, zx, imax


def solve_injections(pu: PerUnitCase, zr, zx, imax, inj: YearInjections) -> PowerFlowSolution:
    """Run the sweep for precomputed branch data and injections."""
    n = pu.n_nodes
    p = np.bincount(pu.bus_node, weights=inj.p_net, minlength=n)
    q = np.bincount(pu.bus_node, weights=inj.q_net, minlength=n)
    vr, vi, ir, ii, iters, worst = _sweep(pu.node_parent, zr, zx, p, q, TOLERANCE, MAX_ITER)
    v_node = vr + 1j * vi
    i_node = ir + 1j * ii

    root_out = i_node[pu.node_parent == 0].sum()
    s_slack = v_node[0] * np.conj(root_out) + complex(p[0], q[0])
    p_gen = float(inj.p_dg.sum())
    p_dem = float(inj.p_demand.sum())
    ploss_pu = s_slack.real + p_gen - p_dem

    i_abs = np.abs(i_node[1:])
    return PowerFlowSolution(
        bus_ids=pu.bus_ids,
        v=v_node[pu.bus_node],
        section_ids=pu.node_section[1:],
        i_pu=i_abs,
        i_amp=i_abs * pu.i_base_amp,
        i_max_amp=imax[1:],
        r_pu=zr[1:],
        p_slack=float(s_slack.real),
        q_slack=float(s_slack.imag),
        ploss_kw=float(ploss_pu * pu.s_base_kva),
        converged=bool(worst <= TOLERANCE),
        iterations=int(iters),
        max_mismatch=float(worst),
    )


def solve(pu: PerUnitCase, design: Design, year: int) -> PowerFlowSolution:
    """Solve the design's power flow with demand escalated to ``year``."""
    if not 0 <= year <= pu.case.economics.horizon_years:
        raise ValueError(f"year {year} outside 0..{pu.case.economics.horizon_years}")
    zr, zx, imax = branch_impedances(pu, design)
    return solve_injections(pu, zr, zx, imax, year_injections(pu, design, year))


def admittance_matrix(pu: PerUnitCase, design: Design) -> np.ndarray:
    """Dense nodal admittance (p.u.) over electrical nodes, from per-section G, B."""
    n = pu.n_nodes
    ybus = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        sec = pu.node_section[k]
        g, b = branch_admittance(pu.case.conductor(design.conductor[sec]), pu.section_length[sec])
        y = complex(g, b) * pu.z_base
        m = pu.node_parent[k]
        ybus[k, k] += y
        ybus[m, m] += y
        ybus[k, m] -= y
        ybus[m, k] -= y
    return ybus


def nodal_mismatch(solution: PowerFlowSolution, pu: PerUnitCase, design: Design, inj: YearInjections) -> float:
    """Largest active/reactive balance residual over non-slack nodes.

    Uses the polar form P_j = U_j sum_m U_m (G cos + B sin),
    Q_j = U_j sum_m U_m (G sin - B cos) on the nodal admittance matrix,
    independently of the sweep.
    """
    ybus = admittance_matrix(pu, design)
    n = pu.n_nodes
    node_idx = [pu.bus_ids.index(b) for b in pu.node_bus]
    u = np.abs(solution.v[node_idx])
    d = np.angle(solution.v[node_idx])
    g, b = ybus.real, ybus.imag
    dd = d[:, None] - d[None, :]
    p_calc = u * ((g * np.cos(dd) + b * np.sin(dd)) @ u)
    q_calc = u * ((g * np.sin(dd) - b * np.cos(dd)) @ u)
    p_spec = -np.bincount(pu.bus_node, weights=inj.p_net, minlength=n)
    q_spec = -np.bincount(pu.bus_node, weights=inj.q_net, minlength=n)
    resid = np.concatenate([np.abs(p_calc - p_spec)[1:], np.abs(q_calc - q_spec)[1:]])
    return float(resid.max()) if resid.size else 0.0


def total_loss(solution: PowerFlowSolution, inj: YearInjections, s_base_kva: float) -> float:
    """Generation minus demand, kW."""
    return (solution.p_slack + float(inj.p_dg.sum()) - float(inj.p_demand.sum())) * s_base_kva


def branch_loss_pu(solution: PowerFlowSolution) -> float:
    return float(np.sum(solution.i_pu**2 * solution.r_pu))


def check_limits(solution: PowerFlowSolution, econ: Economics, year: int | None = None) -> list[Violation]:
    """Voltage-band and ampacity violations; an empty list means the year is feasible."""
    out: list[Violation] = []
    if not solution.converged:
        out.append(Violation("divergence", None, solution.max_mismatch, TOLERANCE, year))
    u = solution.u
    for bus, ub in zip(solution.bus_ids, u):
        if ub < econ.v_min:
            out.append(Violation("undervoltage", bus, float(ub), econ.v_min, year))
        elif ub > econ.v_max:
            out.append(Violation("overvoltage", bus, float(ub), econ.v_max, year))
    for sec, ia, imax in zip(solution.section_ids, solution.i_amp, solution.i_max_amp):
        if ia > imax:
            out.append(Violation("overcurrent", sec, float(ia), float(imax), year))
    return out


def violation_size(v: Violation) -> float:
    """Relative magnitude of a violation, used to rank infeasible candidates."""
    if v.kind == "divergence":
        return 1.0
    if v.limit == 0:
        return abs(v.value)
    return abs(v.value - v.limit) / abs(v.limit)


def dump_csv(solution: PowerFlowSolution) -> tuple[str, str]:
    """Bus and section diagnostic tables as CSV text."""
    bus_lines = ["bus,u_pu,delta_rad"]
    for bus, vb in zip(solution.bus_ids, solution.v):
        bus_lines.append(f"{bus},{abs(vb):.10f},{math.atan2(vb.imag, vb.real):.10f}")
    sec_lines = ["section,i_amp,i_max_amp"]
    for sec, ia, imax in zip(solution.section_ids, solution.i_amp, solution.i_max_amp):
        sec_lines.append(f"{sec},{ia:.6f},{imax:.6f}")
    return "\n".join(bus_lines) + "\n", "\n".join(sec_lines) + "\n"
