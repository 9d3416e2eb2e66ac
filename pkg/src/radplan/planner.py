"""Planning problem: design encoding, horizon evaluation, swarm and oracle drivers."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bspso
from .bspso import BestRecord, Infeasible, SwarmConfig, VariableSpec
from .econ import (
    CostBreakdown,
    capacitor_cost,
    conductor_capital,
    dg_cost,
    loss_cost_horizon,
    objective,
    voltage_index,
)
from .netmodel import Design, NetworkCase, PerUnitCase, to_per_unit
from .powerflow import (
    Violation,
    branch_impedances,
    check_limits,
    equipment_injections,
    solve_injections,
    violation_size,
    year_injections,
)

ORACLE_LIMIT = 10**6


@dataclass(frozen=True)
class Scenario:
    mode: str = "conductors_only"  # or "full"
    omega: float = 0.5

    def __post_init__(self):
        if self.mode not in ("conductors_only", "full"):
            raise ValueError(f"unknown scenario mode {self.mode!r}")
        if not 0 <= self.omega <= 1:
            raise ValueError("omega must lie in [0, 1]")


@dataclass(frozen=True)
class YearSummary:
    year: int
    ploss_kw: float
    u_min: float
    u_max: float
    max_loading: float  # max I / I_max over sections
    iterations: int
    converged: bool


@dataclass(frozen=True)
class EvaluationReport:
    breakdown: CostBreakdown
    u_ind: float
    feasible: bool
    violations: tuple[Violation, ...]
    total_objective: float
    per_year: tuple[YearSummary, ...]
    u_final: tuple[float, ...] = ()  # per bus, year T

    def violation_measure(self) -> float:
        return sum(violation_size(v) for v in self.violations)


@dataclass
class PlanResult:
    best_design: Design | None
    report: EvaluationReport | None
    swarm_history: list[float]
    seed: int
    particles: int
    iterations: int
    feasible_found: bool
    scenario: Scenario = field(default_factory=Scenario)
    evaluations: int = 0


def candidate_buses(case: NetworkCase) -> list[int]:
    return sorted(b.id for b in case.buses if b.id != 0)


def sizable_sections(case: NetworkCase) -> list[int]:
    return sorted(s.id for s in case.sections if s.length_km > 0)


def encode_specs(case: NetworkCase, scenario: Scenario) -> list[VariableSpec]:
    """Conductor variables first, then capacitor and DG variables per candidate bus."""
    specs = [VariableSpec.selective(len(case.conductor_catalog)) for _ in sizable_sections(case)]
    if scenario.mode == "full":
        buses = candidate_buses(case)
        n_cap = len(case.capacitor_catalog)
        if n_cap >= 2:
            specs += [VariableSpec.selective(n_cap) for _ in buses]
        specs += [VariableSpec.binary() for _ in buses]
    return specs


def decode(position: Sequence[int], case: NetworkCase, scenario: Scenario) -> Design:
    secs = sizable_sections(case)
    pos = [int(x) for x in position]
    n_expected = len(encode_specs(case, scenario))
    if len(pos) != n_expected:
        raise ValueError(f"position has {len(pos)} entries, layout needs {n_expected}")
    conductor = dict(zip(secs, pos[: len(secs)]))
    if scenario.mode == "conductors_only":
        return Design(conductor)
    buses = candidate_buses(case)
    rest = pos[len(secs):]
    none_id = case.no_capacitor_id
    if len(case.capacitor_catalog) >= 2:
        caps, rest = rest[: len(buses)], rest[len(buses):]
    else:
        caps = [none_id] * len(buses)
    capacitor = {b: c for b, c in zip(buses, caps) if c != none_id}
    dg = {b: 1 for b, flag in zip(buses, rest) if flag}
    return Design(conductor, capacitor, dg)


def encode(design: Design, case: NetworkCase, scenario: Scenario) -> list[int]:
    pos = [design.conductor[s] for s in sizable_sections(case)]
    if scenario.mode == "full":
        buses = candidate_buses(case)
        if len(case.capacitor_catalog) >= 2:
            pos += [design.capacitor.get(b, case.no_capacitor_id) for b in buses]
        pos += [int(bool(design.dg.get(b, 0))) for b in buses]
    return pos


class Evaluator:
    """Evaluates designs on one case, holding the per-unit data between calls."""

    def __init__(self, case: NetworkCase, pu: PerUnitCase | None = None):
        self.case = case
        self.pu = pu or to_per_unit(case)

    def evaluate(self, design: Design, scenario: Scenario, *, fast: bool = False) -> EvaluationReport:
        """Full-horizon evaluation.

        With ``fast=True`` evaluation stops at the first failed constraint
        group (budgets, then the first violating year); the verdict is the
        same but the report is partial.
        """
        case, pu = self.case, self.pu
        e = case.economics
        T = e.horizon_years
        violations: list[Violation] = []

        cond = conductor_capital(design, case)
        cap = capacitor_cost(design, case)
        dgc = dg_cost(design, case.dg_type)
        if cap > e.cap_budget:
            violations.append(Violation("capacitor budget", None, cap, e.cap_budget))
        if dgc > e.dg_budget:
            violations.append(Violation("dg budget", None, dgc, e.dg_budget))
        if fast and violations:
            return self._partial(cond, cap, dgc, violations)

        zr, zx, imax = branch_impedances(pu, design)
        equipment = equipment_injections(pu, design)
        # heaviest year first: most undervoltage/overcurrent failures show up there
        years = [T] + list(range(1, T)) if fast else list(range(1, T + 1))
        ploss = {}
        summaries = {}
        u_final: np.ndarray | None = None
        for t in years:
            sol = solve_injections(pu, zr, zx, imax, year_injections(pu, design, t, equipment))
            year_viol = check_limits(sol, e, year=t)
            violations.extend(year_viol)
            u = sol.u
            ploss[t] = sol.ploss_kw
            summaries[t] = YearSummary(
                t, sol.ploss_kw, float(u.min()), float(u.max()),
                float(np.max(sol.i_amp / sol.i_max_amp)) if len(sol.i_amp) else 0.0,
                sol.iterations, sol.converged,
            )
            if t == T:
                u_final = u
            if fast and year_viol:
                return self._partial(cond, cap, dgc, violations)

        per_year = [ploss[t] for t in range(1, T + 1)]
        loss, per_year_cost = loss_cost_horizon(per_year, e)
        breakdown = CostBreakdown(cond, loss, cap, dgc, tuple(per_year), tuple(per_year_cost))
        return EvaluationReport(
            breakdown=breakdown,
            u_ind=voltage_index(u_final),
            feasible=not violations,
            violations=tuple(violations),
            total_objective=objective(cond, loss, scenario.omega),
            per_year=tuple(summaries[t] for t in range(1, T + 1)),
            u_final=tuple(float(x) for x in u_final),
        )

    @staticmethod
    def _partial(cond, cap, dgc, violations) -> EvaluationReport:
        breakdown = CostBreakdown(cond, math.nan, cap, dgc, (), ())
        return EvaluationReport(breakdown, math.nan, False, tuple(violations), math.nan, ())

    def problem(self, scenario: Scenario):
        """Memoized swarm objective over position vectors."""
        cache: dict[tuple[int, ...], float | Infeasible] = {}

        def score(position: np.ndarray) -> float | Infeasible:
            key = tuple(int(x) for x in position)
            hit = cache.get(key)
            if hit is not None:
                return hit
            rep = self.evaluate(decode(key, self.case, scenario), scenario, fast=True)
            if rep.feasible:
                res: float | Infeasible = rep.total_objective
            else:
                res = Infeasible(_rank_violations(rep.violations))
            cache[key] = res
            return res

        return score


def _rank_violations(violations: Sequence[Violation]) -> float:
    # budget overruns rank behind any network-limit violation
    budget = sum(violation_size(v) for v in violations if v.kind.endswith("budget"))
    network = sum(violation_size(v) for v in violations if not v.kind.endswith("budget"))
    if budget > 0:
        return 1.0 + budget
    return network / (1.0 + network)


def evaluate(design: Design, case: NetworkCase, scenario: Scenario = Scenario()) -> EvaluationReport:
    return Evaluator(case).evaluate(design, scenario)


def optimize(case: NetworkCase, scenario: Scenario = Scenario(), cfg: SwarmConfig = SwarmConfig(),
             evaluator: Evaluator | None = None) -> PlanResult:
    ev = evaluator or Evaluator(case)
    specs = encode_specs(case, scenario)
    record: BestRecord = bspso.run(ev.problem(scenario), specs, cfg)
    design = decode(record.gbest_position, case, scenario)
    return PlanResult(
        best_design=design,
        report=ev.evaluate(design, scenario),
        swarm_history=list(record.objective_history),
        seed=cfg.seed,
        particles=cfg.n_particles,
        iterations=cfg.it_max,
        feasible_found=record.feasible_found,
        scenario=scenario,
        evaluations=record.evaluations,
    )


def exhaustive_oracle(case: NetworkCase, scenario: Scenario = Scenario(),
                      evaluator: Evaluator | None = None) -> PlanResult:
    """Enumerate every design; ties go to the lexicographically smallest position."""
    ev = evaluator or Evaluator(case)
    specs = encode_specs(case, scenario)
    size = math.prod(len(s.domain) for s in specs)
    if size > ORACLE_LIMIT:
        raise ValueError(f"search space too large ({size} designs > {ORACLE_LIMIT})")
    score = ev.problem(scenario)
    best_pos, best_obj = None, math.inf
    for pos in itertools.product(*(s.domain for s in specs)):
        res = score(np.array(pos))
        if not isinstance(res, Infeasible) and res < best_obj:
            best_pos, best_obj = pos, res
    if best_pos is None:
        return PlanResult(None, None, [], 0, 0, 0, False, scenario, size)
    design = decode(best_pos, case, scenario)
    return PlanResult(design, ev.evaluate(design, scenario), [best_obj], 0, 0, 0, True, scenario, size)


@dataclass(frozen=True)
class SweepRow:
    omega: float
    cond_cost: float
    loss_cost: float
    total_ploss_kw: float
    u_ind: float
    profile: tuple[int, ...]
    feasible: bool


def _sweep_row(omega: float, result: PlanResult, case: NetworkCase) -> SweepRow:
    rep = result.report
    if rep is None or not rep.feasible:
        nan = math.nan
        return SweepRow(omega, nan, nan, nan, nan, (), False)
    b = rep.breakdown
    profile = tuple(result.best_design.conductor[s] for s in sizable_sections(case))
    return SweepRow(omega, b.cond_cost, b.loss_cost, float(sum(b.per_year_ploss)), rep.u_ind, profile, True)


def omega_sweep(case: NetworkCase, cfg: SwarmConfig, grid: Sequence[float], *, exact: bool = False) -> list[SweepRow]:
    """Conductor-only plans over a grid of weights.

    ``exact=True`` uses the exhaustive oracle instead of the swarm.
    """
    ev = Evaluator(case)
    rows = []
    for omega in grid:
        scenario = Scenario("conductors_only", float(omega))
        res = exhaustive_oracle(case, scenario, ev) if exact else optimize(case, scenario, cfg, ev)
        rows.append(_sweep_row(float(omega), res, case))
    return rows
