"""Cost components, escalation and the scalarized planning objective."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .netmodel import DGType, Design, Economics, NetworkCase

HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class CostBreakdown:
    cond_cost: float
    loss_cost: float
    cap_cost: float
    dg_cost: float
    per_year_ploss: tuple[float, ...]
    per_year_loss_cost: tuple[float, ...]

    @property
    def obj(self) -> float:
        """Unweighted conductor-plus-loss cost."""
        return self.cond_cost + self.loss_cost


def loss_factor(lf: float) -> float:
    """Loss factor from load factor (empirical quadratic fit)."""
    if not 0 < lf <= 1:
        raise ValueError(f"load factor {lf} outside (0, 1]")
    return 0.2 * lf + 0.8 * lf * lf


def escalate(base: float, rate: float, t: float) -> float:
    if t < 0:
        raise ValueError("year must be non-negative")
    return base * (1.0 + rate) ** t


def demand_at_year(d0: float, growth: float, t: float) -> float:
    return escalate(d0, growth, t)


def conductor_capital(design: Design, case: NetworkCase) -> float:
    total = 0.0
    for s in case.sections:
        if s.length_km == 0:
            continue
        if s.id not in design.conductor:
            raise ValueError(f"section {s.id} has no conductor assigned")
        total += case.conductor(design.conductor[s.id]).price_per_km * s.length_km
    return total


def loss_cost_horizon(per_year_ploss: Sequence[float], econ: Economics) -> tuple[float, list[float]]:
    """Cost of lost power and energy for years 1..T; returns (total, per-year)."""
    if len(per_year_ploss) != econ.horizon_years:
        raise ValueError(f"expected {econ.horizon_years} yearly losses, got {len(per_year_ploss)}")
    lsf = loss_factor(econ.load_factor)
    per_year = []
    for t, ploss in enumerate(per_year_ploss, start=1):
        cp = escalate(econ.cp0, econ.inflation, t)
        ce = escalate(econ.ce0, econ.inflation, t)
        per_year.append(ploss * (cp + ce * lsf * HOURS_PER_YEAR))
    return float(sum(per_year)), per_year


def capacitor_cost(design: Design, case: NetworkCase) -> float:
    total = 0.0
    n = len(case.capacitor_catalog)
    for bus, cap_id in design.capacitor.items():
        if not 1 <= cap_id <= n:
            raise ValueError(f"bus {bus}: unknown capacitor type {cap_id}")
        total += case.capacitor(cap_id).total_cost
    return total


def dg_cost(design: Design, dg: DGType) -> float:
    return sum(1 for flag in design.dg.values() if flag) * dg.total_cost


def voltage_index(u: Sequence[float]) -> float:
    """Sum of absolute deviations from 1 p.u."""
    arr = np.asarray(u, dtype=float)
    if arr.size == 0:
        raise ValueError("empty voltage list")
    return float(np.sum(np.abs(1.0 - arr)))


def objective(cond_cost: float, loss_cost: float, omega: float = 0.5) -> float:
    """Weighted sum of conductor and loss cost."""
    if not 0 <= omega <= 1:
        raise ValueError(f"omega {omega} outside [0, 1]")
    return omega * cond_cost + (1.0 - omega) * loss_cost
