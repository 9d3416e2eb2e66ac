"""Result and sweep files, plus the plain-text arrangement table."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

from .netmodel import Design, NetworkCase
from .planner import PlanResult, SweepRow

SWEEP_HEADER = ["omega", "cond_cost", "loss_cost", "total_ploss_kw", "u_ind", "profile"]


def _num(x: float) -> float | None:
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def result_document(result: PlanResult, case_label: str, penalty: float) -> dict[str, Any]:
    rep = result.report
    doc: dict[str, Any] = {
        "case": case_label,
        "scenario": {"mode": result.scenario.mode, "omega": result.scenario.omega},
        "config": {"seed": result.seed, "particles": result.particles, "iterations": result.iterations},
        "best_design": result.best_design.to_json() if result.best_design else None,
        "feasible": bool(rep is not None and rep.feasible),
        # penalized (infeasible) iterations are reported as null, never as a cost
        "history": [None if h >= penalty else _num(h) for h in result.swarm_history],
    }
    if rep is None:
        doc.update(costs=None, u_ind=None, violations=[])
        return doc
    b = rep.breakdown
    doc["costs"] = {
        "cond_cost": _num(b.cond_cost),
        "loss_cost": _num(b.loss_cost),
        "cap_cost": _num(b.cap_cost),
        "dg_cost": _num(b.dg_cost),
        "obj": _num(b.obj),
        "total_objective": _num(rep.total_objective),
        "total_ploss_kw": _num(sum(b.per_year_ploss)),
        "per_year_ploss_kw": [_num(x) for x in b.per_year_ploss],
        "per_year_loss_cost": [_num(x) for x in b.per_year_loss_cost],
    }
    doc["u_ind"] = _num(rep.u_ind)
    doc["violations"] = [
        {"kind": v.kind, "location": v.location, "value": _num(v.value), "limit": _num(v.limit), "year": v.year}
        for v in rep.violations
    ]
    return doc


def dumps_result(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def read_result(path: str) -> dict[str, Any]:
    """Load a result file; ``best_design`` comes back as a :class:`Design`."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("best_design") is not None:
        doc["best_design"] = Design.from_json(doc["best_design"])
    return doc


def read_design(path: str) -> Design:
    """A design file, or the best design inside a result file."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "best_design" in doc:
        doc = doc["best_design"]
        if doc is None:
            raise ValueError(f"{path}: result holds no design")
    return Design.from_json(doc)


def format_table(result: PlanResult, case: NetworkCase) -> str:
    """Arrangement table: conductor and end-bus voltage per section, then equipment and costs."""
    rep = result.report
    design = result.best_design
    lines = []
    if design is None or rep is None:
        return "no feasible design found\n"
    sec_by_id = {s.id: s for s in case.sections}
    bus_index = {b.id: i for i, b in enumerate(case.buses)}
    lines.append(f"{'Section':>7}  {'Cond.':>5}  {'U (p.u.)':>8}")
    for s in sorted(sec_by_id):
        cond = design.conductor.get(s, "-") if sec_by_id[s].length_km > 0 else "-"
        u = rep.u_final[bus_index[sec_by_id[s].to_bus]] if rep.u_final else float("nan")
        lines.append(f"{s:>7}  {cond!s:>5}  {u:8.4f}")
    lines.append("")
    if design.capacitor:
        lines.append("Capacitors:")
        for bus, cap in sorted(design.capacitor.items()):
            lines.append(f"  bus {bus}: type {cap} ({case.capacitor(cap).q_kvar:g} kVAr)")
    if design.dg_buses():
        lines.append("DG units:")
        dg = case.dg_type
        for bus in design.dg_buses():
            lines.append(f"  bus {bus}: {dg.p_rated_kw:g} kW - {dg.q_rated_kvar:g} kVAr")
    b = rep.breakdown
    lines += [
        f"Conductor Cost = {b.cond_cost:.2f}",
        f"Loss Cost = {b.loss_cost:.2f}",
        f"Capacitor Cost = {b.cap_cost:.2f}",
        f"DG Cost = {b.dg_cost:.2f}",
        f"Sum of yearly Ploss = {sum(b.per_year_ploss):.2f} kW",
        f"U_ind = {rep.u_ind:.4f}",
        f"Total_Cost = {b.obj:.2f}",
        f"Weighted objective (omega={result.scenario.omega:g}) = {rep.total_objective:.2f}",
        f"Feasible = {'yes' if rep.feasible else 'no'}",
        f"Seed = {result.seed}, particles = {result.particles}, iterations = {result.iterations}",
    ]
    return "\n".join(lines) + "\n"


def sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([repr(r.omega), repr(r.cond_cost), repr(r.loss_cost), repr(r.total_ploss_kw),
                         repr(r.u_ind), "|".join(str(c) for c in r.profile)])
    return buf.getvalue()


def read_sweep(path: str) -> list[SweepRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SWEEP_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for rec in reader:
            profile = tuple(int(x) for x in rec["profile"].split("|")) if rec["profile"] else ()
            cond = float(rec["cond_cost"])
            rows.append(SweepRow(float(rec["omega"]), cond, float(rec["loss_cost"]),
                                 float(rec["total_ploss_kw"]), float(rec["u_ind"]), profile,
                                 not math.isnan(cond)))
    return rows
