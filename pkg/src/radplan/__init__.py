"""Radial distribution network planning: conductor sizing with capacitor and DG placement.

``radplan.powerflow.KERNEL`` tells whether the compiled sweep kernel or the
pure-Python fallback is in use.
"""
from .bspso import Infeasible, SwarmConfig, VariableSpec
from .netmodel import CaseError, Design, NetworkCase, load_case, parse_case, to_per_unit
from .planner import EvaluationReport, PlanResult, Scenario, evaluate, exhaustive_oracle, omega_sweep, optimize
from .powerflow import KERNEL, PowerFlowSolution, solve

__all__ = [
    "KERNEL",
    "CaseError",
    "Design",
    "EvaluationReport",
    "Infeasible",
    "NetworkCase",
    "PlanResult",
    "PowerFlowSolution",
    "Scenario",
    "SwarmConfig",
    "VariableSpec",
    "evaluate",
    "exhaustive_oracle",
    "load_case",
    "omega_sweep",
    "optimize",
    "parse_case",
    "solve",
    "to_per_unit",
]
