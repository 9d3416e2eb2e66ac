"""Planning-problem data model: catalogs, buses, sections, economics.

Cases are plain frozen dataclasses.  ``parse_case``/``serialize_case`` handle
the JSON case-file format, ``radial_topology`` recovers the feeder tree and
``to_per_unit`` produces the arrays consumed by the power-flow kernel.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, fields
from typing import Any, Mapping

import numpy as np

__all__ = [
    "CaseError",
    "ConductorType",
    "CapacitorType",
    "DGType",
    "Bus",
    "Section",
    "Economics",
    "NetworkCase",
    "Topology",
    "PerUnitCase",
    "Design",
    "parse_case",
    "serialize_case",
    "load_case",
    "validate_case",
    "builtin_case_26bus",
    "builtin_case_toy5",
    "radial_topology",
    "to_per_unit",
]


class CaseError(ValueError):
    """Raised for malformed or inconsistent case data."""


@dataclass(frozen=True)
class ConductorType:
    id: int
    r_per_km: float
    x_per_km: float
    price_per_km: float
    i_max: float


@dataclass(frozen=True)
class CapacitorType:
    id: int
    q_kvar: float
    capital_cost: float
    install_cost: float

    @property
    def total_cost(self) -> float:
        return self.capital_cost + self.install_cost


@dataclass(frozen=True)
class DGType:
    p_rated_kw: float
    q_rated_kvar: float
    total_cost: float


@dataclass(frozen=True)
class Bus:
    id: int
    s_load_kva: float
    power_factor: float = 0.85

    @property
    def p_kw(self) -> float:
        return self.s_load_kva * self.power_factor

    @property
    def q_kvar(self) -> float:
        # lagging load
        return self.s_load_kva * math.sqrt(max(0.0, 1.0 - self.power_factor**2))


@dataclass(frozen=True)
class Section:
    id: int
    from_bus: int
    to_bus: int
    length_km: float


@dataclass(frozen=True)
class Economics:
    cp0: float
    ce0: float
    inflation: float
    load_growth: float
    load_factor: float
    horizon_years: int
    v_min: float
    v_max: float
    cap_budget: float
    dg_budget: float
    base_mva: float
    base_kv: float


@dataclass(frozen=True)
class NetworkCase:
    buses: tuple[Bus, ...]
    sections: tuple[Section, ...]
    conductor_catalog: tuple[ConductorType, ...]
    capacitor_catalog: tuple[CapacitorType, ...]
    dg_type: DGType
    economics: Economics

    def conductor(self, type_id: int) -> ConductorType:
        return self.conductor_catalog[type_id - 1]

    def capacitor(self, type_id: int) -> CapacitorType:
        return self.capacitor_catalog[type_id - 1]

    @property
    def no_capacitor_id(self) -> int:
        return len(self.capacitor_catalog)


@dataclass(frozen=True)
class Design:
    """A concrete plan.

    ``conductor`` maps sizable section id -> conductor type id,
    ``capacitor`` maps bus id -> capacitor type id (buses absent from the
    mapping carry no capacitor) and ``dg`` maps bus id -> 0/1.
    """

    conductor: Mapping[int, int]
    capacitor: Mapping[int, int] = field(default_factory=dict)
    dg: Mapping[int, int] = field(default_factory=dict)

    def dg_buses(self) -> list[int]:
        return sorted(b for b, flag in self.dg.items() if flag)

    def to_json(self) -> dict[str, dict[str, int]]:
        return {
            "conductor": {str(k): int(v) for k, v in sorted(self.conductor.items())},
            "capacitor": {str(k): int(v) for k, v in sorted(self.capacitor.items())},
            "dg": {str(k): int(v) for k, v in sorted(self.dg.items())},
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "Design":
        def _ints(m: Mapping[str, Any] | None) -> dict[int, int]:
            return {int(k): int(v) for k, v in (m or {}).items()}

        return cls(_ints(obj.get("conductor")), _ints(obj.get("capacitor")), _ints(obj.get("dg")))

    @classmethod
    def uniform(cls, case: NetworkCase, conductor_id: int = 1) -> "Design":
        topo = radial_topology(case)
        return cls({k: conductor_id for k in topo.sizable_sections})


# ---------------------------------------------------------------------------
# parsing / serialization


def _reject_constant(name: str) -> float:
    raise CaseError(f"syntax error: non-finite number {name!r} not permitted")


def _require(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(obj, Mapping):
        raise CaseError(f"syntax error: {where} must be an object")
    if key not in obj:
        raise CaseError(f"missing field: {where}.{key}")
    return obj[key]


def _number(obj: Mapping[str, Any], key: str, where: str) -> float:
    value = _require(obj, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CaseError(f"syntax error: {where}.{key} must be a number")
    return float(value)


def _integer(obj: Mapping[str, Any], key: str, where: str) -> int:
    value = _require(obj, key, where)
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise CaseError(f"syntax error: {where}.{key} must be an integer")
    return value


def _array(obj: Mapping[str, Any], key: str) -> list:
    value = _require(obj, key, "case")
    if not isinstance(value, list):
        raise CaseError(f"syntax error: case.{key} must be an array")
    return value


def parse_case(text: str) -> NetworkCase:
    """Parse and validate JSON case-file text."""
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise CaseError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise CaseError("syntax error: top level must be an object")

    buses = tuple(
        Bus(
            _integer(b, "id", f"buses[{i}]"),
            _number(b, "s_load_kva", f"buses[{i}]"),
            _number(b, "power_factor", f"buses[{i}]"),
        )
        for i, b in enumerate(_array(raw, "buses"))
    )
    sections = tuple(
        Section(
            _integer(s, "id", f"sections[{i}]"),
            _integer(s, "from", f"sections[{i}]"),
            _integer(s, "to", f"sections[{i}]"),
            _number(s, "length_km", f"sections[{i}]"),
        )
        for i, s in enumerate(_array(raw, "sections"))
    )
    conductors = tuple(
        ConductorType(
            _integer(c, "id", f"conductor_catalog[{i}]"),
            *(_number(c, k, f"conductor_catalog[{i}]") for k in ("r_per_km", "x_per_km", "price_per_km", "i_max")),
        )
        for i, c in enumerate(_array(raw, "conductor_catalog"))
    )
    capacitors = tuple(
        CapacitorType(
            _integer(c, "id", f"capacitor_catalog[{i}]"),
            *(_number(c, k, f"capacitor_catalog[{i}]") for k in ("q_kvar", "capital_cost", "install_cost")),
        )
        for i, c in enumerate(_array(raw, "capacitor_catalog"))
    )
    dg_raw = _require(raw, "dg_type", "case")
    dg = DGType(*(_number(dg_raw, k, "dg_type") for k in ("p_rated_kw", "q_rated_kvar", "total_cost")))

    econ_raw = _require(raw, "economics", "case")
    econ_kwargs: dict[str, Any] = {}
    for f in fields(Economics):
        if f.name in ("base_mva", "base_kv"):
            econ_kwargs[f.name] = _number(raw, f.name, "case")
        elif f.name == "horizon_years":
            econ_kwargs[f.name] = _integer(econ_raw, f.name, "economics")
        else:
            econ_kwargs[f.name] = _number(econ_raw, f.name, "economics")

    case = NetworkCase(buses, sections, conductors, capacitors, dg, Economics(**econ_kwargs))
    validate_case(case)
    return case


def load_case(path: str) -> NetworkCase:
    """Load ``builtin:26bus``/``builtin:toy5`` or a case file from disk."""
    if path.startswith("builtin:"):
        name = path.split(":", 1)[1]
        builtins = {"26bus": builtin_case_26bus, "toy5": builtin_case_toy5}
        if name not in builtins:
            raise CaseError(f"unknown builtin case {name!r}")
        return builtins[name]()
    with open(path, encoding="utf-8") as fh:
        return parse_case(fh.read())


def serialize_case(case: NetworkCase) -> str:
    e = case.economics
    doc = {
        "base_mva": e.base_mva,
        "base_kv": e.base_kv,
        "buses": [{"id": b.id, "s_load_kva": b.s_load_kva, "power_factor": b.power_factor} for b in case.buses],
        "sections": [
            {"id": s.id, "from": s.from_bus, "to": s.to_bus, "length_km": s.length_km} for s in case.sections
        ],
        "conductor_catalog": [
            {"id": c.id, "r_per_km": c.r_per_km, "x_per_km": c.x_per_km, "price_per_km": c.price_per_km,
             "i_max": c.i_max}
            for c in case.conductor_catalog
        ],
        "capacitor_catalog": [
            {"id": c.id, "q_kvar": c.q_kvar, "capital_cost": c.capital_cost, "install_cost": c.install_cost}
            for c in case.capacitor_catalog
        ],
        "dg_type": {
            "p_rated_kw": case.dg_type.p_rated_kw,
            "q_rated_kvar": case.dg_type.q_rated_kvar,
            "total_cost": case.dg_type.total_cost,
        },
        "economics": {f.name: getattr(e, f.name) for f in fields(Economics) if f.name not in ("base_mva", "base_kv")},
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# validation


def _invariant(cond: bool, msg: str) -> None:
    if not cond:
        raise CaseError(f"invariant violation: {msg}")


def _check_ids(ids: list[int], what: str) -> None:
    _invariant(ids == list(range(1, len(ids) + 1)), f"{what} catalog ids not contiguous from 1")


def validate_case(case: NetworkCase) -> None:
    """Check every NetworkCase invariant; raises CaseError on the first failure."""
    bus_ids = [b.id for b in case.buses]
    _invariant(len(set(bus_ids)) == len(bus_ids), "duplicate bus id")
    for b in case.buses:
        _invariant(b.s_load_kva >= 0, f"bus {b.id} has negative load")
        _invariant(0 < b.power_factor <= 1, f"bus {b.id} power factor outside (0, 1]")
    roots = [b for b in case.buses if b.id == 0]
    _invariant(len(roots) == 1, "root not found (bus 0)")
    _invariant(roots[0].s_load_kva == 0, "bus 0 must carry no load")

    sec_ids = [s.id for s in case.sections]
    _invariant(len(set(sec_ids)) == len(sec_ids), "duplicate section id")
    known = set(bus_ids)
    for s in case.sections:
        _invariant(s.from_bus != s.to_bus, f"section {s.id} is a self loop")
        _invariant(s.from_bus in known and s.to_bus in known, f"section {s.id} references an unknown bus")
        _invariant(s.length_km >= 0, f"section {s.id} has negative length")

    _invariant(len(case.conductor_catalog) > 0, "empty conductor catalog")
    _invariant(len(case.capacitor_catalog) > 0, "empty capacitor catalog")
    _check_ids([c.id for c in case.conductor_catalog], "conductor")
    _check_ids([c.id for c in case.capacitor_catalog], "capacitor")
    for c in case.conductor_catalog:
        _invariant(
            c.r_per_km > 0 and c.x_per_km > 0 and c.price_per_km > 0 and c.i_max > 0,
            f"conductor type {c.id} has non-positive data",
        )
    for a, b in zip(case.conductor_catalog, case.conductor_catalog[1:]):
        _invariant(
            a.r_per_km <= b.r_per_km and a.i_max >= b.i_max,
            "conductor catalog not sorted largest to smallest",
        )
    for c in case.capacitor_catalog:
        _invariant(c.q_kvar >= 0 and c.capital_cost >= 0 and c.install_cost >= 0,
                   f"capacitor type {c.id} has negative data")
    for a, b in zip(case.capacitor_catalog, case.capacitor_catalog[1:]):
        _invariant(a.q_kvar > b.q_kvar, "capacitor catalog not sorted largest to smallest")
    last = case.capacitor_catalog[-1]
    _invariant(last.q_kvar == 0 and last.total_cost == 0, "last capacitor type must be the empty (0 kVAr) entry")

    dg = case.dg_type
    _invariant(dg.p_rated_kw > 0 and dg.q_rated_kvar >= 0 and dg.total_cost >= 0, "invalid DG type")

    e = case.economics
    _invariant(e.cp0 >= 0 and e.ce0 >= 0, "negative energy prices")
    _invariant(0 < e.load_factor <= 1, "load factor outside (0, 1]")
    _invariant(e.horizon_years >= 1, "horizon must be at least one year")
    _invariant(e.v_min < e.v_max, "v_min must be below v_max")
    _invariant(e.cap_budget >= 0 and e.dg_budget >= 0, "negative budget")
    _invariant(e.base_mva > 0 and e.base_kv > 0, "base quantities must be positive")

    try:
        radial_topology(case)
    except CaseError as exc:
        raise CaseError(f"invariant violation: {exc}") from None
    _invariant(len(case.sections) == len(case.buses) - 1, "section count must equal bus count - 1")


# ---------------------------------------------------------------------------
# topology


@dataclass(frozen=True)
class Topology:
    """Feeder tree rooted at bus 0.

    ``node_of`` maps each bus to the bus that represents its electrical
    node: buses joined by zero-length sections collapse onto the upstream one.
    """

    root: int
    parent: Mapping[int, tuple[int, int]]
    order: tuple[int, ...]
    sizable_sections: tuple[int, ...]
    node_of: Mapping[int, int]

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(b for b in self.order if self.node_of[b] == b)


def radial_topology(case: NetworkCase) -> Topology:
    bus_ids = [b.id for b in case.buses]
    if 0 not in bus_ids:
        raise CaseError("root not found")
    adj: dict[int, list[tuple[int, Section]]] = {b: [] for b in bus_ids}
    for s in case.sections:
        if s.from_bus not in adj or s.to_bus not in adj:
            raise CaseError(f"section {s.id} references an unknown bus")
        adj[s.from_bus].append((s.to_bus, s))
        adj[s.to_bus].append((s.from_bus, s))

    parent: dict[int, tuple[int, int]] = {}
    order = [0]
    seen = {0}
    queue = deque([0])
    while queue:
        bus = queue.popleft()
        up_section = parent[bus][1] if bus in parent else None
        for nbr, sec in adj[bus]:
            if sec.id == up_section and nbr == parent[bus][0]:
                continue
            if nbr in seen:
                raise CaseError(f"cycle detected through section {sec.id}")
            seen.add(nbr)
            parent[nbr] = (bus, sec.id)
            order.append(nbr)
            queue.append(nbr)
    missing = [b for b in bus_ids if b not in seen]
    if missing:
        raise CaseError(f"disconnected bus {missing[0]}")

    lengths = {s.id: s.length_km for s in case.sections}
    node_of = {0: 0}
    for bus in order[1:]:
        up, sec = parent[bus]
        node_of[bus] = node_of[up] if lengths[sec] == 0 else bus
    sizable = tuple(sorted(s.id for s in case.sections if s.length_km > 0))
    return Topology(0, parent, tuple(order), sizable, node_of)


# ---------------------------------------------------------------------------
# per-unit


@dataclass(frozen=True, eq=False)
class PerUnitCase:
    """Per-unit arrays for the sweep kernel.

    Electrical nodes are numbered 0..N-1 in breadth-first order with node 0
    the slack; ``node_parent[k] < k`` and the branch feeding node ``k`` is
    section ``node_section[k]``.
    """

    case: NetworkCase
    topology: Topology
    z_base: float
    i_base_amp: float
    s_base_kva: float
    bus_ids: tuple[int, ...]
    p_load: np.ndarray  # per bus, p.u., year 0
    q_load: np.ndarray
    bus_node: np.ndarray  # bus index -> node index
    node_bus: tuple[int, ...]
    node_parent: np.ndarray
    node_section: tuple[int, ...]  # -1 for the slack
    section_node: Mapping[int, int]
    section_length: Mapping[int, float]
    cond_r_pu: np.ndarray  # per catalog index (0-based), p.u. per km
    cond_x_pu: np.ndarray
    cond_imax: np.ndarray  # A

    @property
    def n_nodes(self) -> int:
        return len(self.node_bus)

    def kw(self, p_pu: float) -> float:
        return p_pu * self.s_base_kva

    def ohms(self, z_pu: complex) -> complex:
        return z_pu * self.z_base

    def amps(self, i_pu: float) -> float:
        return i_pu * self.i_base_amp


def to_per_unit(case: NetworkCase) -> PerUnitCase:
    topo = radial_topology(case)
    e = case.economics
    s_base_kva = e.base_mva * 1000.0
    z_base = e.base_kv**2 / e.base_mva
    i_base = e.base_mva * 1e6 / (math.sqrt(3.0) * e.base_kv * 1e3)

    bus_ids = tuple(b.id for b in case.buses)
    p_load = np.array([b.p_kw / s_base_kva for b in case.buses])
    q_load = np.array([b.q_kvar / s_base_kva for b in case.buses])

    node_bus = topo.nodes
    node_index = {bus: k for k, bus in enumerate(node_bus)}
    bus_node = np.array([node_index[topo.node_of[b]] for b in bus_ids], dtype=np.intp)
    node_parent = np.full(len(node_bus), -1, dtype=np.intp)
    node_section = [-1] * len(node_bus)
    for k, bus in enumerate(node_bus[1:], start=1):
        up, sec = topo.parent[bus]
        node_parent[k] = node_index[topo.node_of[up]]
        node_section[k] = sec
    section_node = {sec: k for k, sec in enumerate(node_section) if sec >= 0}

    cat = case.conductor_catalog
    return PerUnitCase(
        case=case,
        topology=topo,
        z_base=z_base,
        i_base_amp=i_base,
        s_base_kva=s_base_kva,
        bus_ids=bus_ids,
        p_load=p_load,
        q_load=q_load,
        bus_node=bus_node,
        node_bus=node_bus,
        node_parent=node_parent,
        node_section=tuple(node_section),
        section_node=section_node,
        section_length={s.id: s.length_km for s in case.sections},
        cond_r_pu=np.array([c.r_per_km for c in cat]) / z_base,
        cond_x_pu=np.array([c.x_per_km for c in cat]) / z_base,
        cond_imax=np.array([c.i_max for c in cat]),
    )


# ---------------------------------------------------------------------------
# built-in cases

# (section, from, to, length km, load kVA at the to-bus)
_TABLE_26BUS = [
    (1, 0, 1, 0.000, 0), (2, 1, 2, 1.175, 0), (3, 2, 3, 0.625, 950), (4, 3, 4, 1.825, 0),
    (5, 4, 5, 0.850, 0), (6, 5, 6, 1.125, 850), (7, 6, 7, 2.625, 0), (8, 7, 8, 2.925, 640),
    (9, 8, 9, 1.175, 813), (10, 1, 10, 0.650, 800), (11, 10, 11, 1.825, 400),
    (12, 11, 12, 0.825, 950), (13, 12, 13, 1.125, 825), (14, 13, 14, 2.625, 725),
    (15, 14, 15, 2.925, 900), (16, 2, 16, 1.175, 300), (17, 16, 17, 0.650, 750),
    (18, 17, 18, 1.825, 350), (19, 18, 19, 0.825, 400), (20, 19, 20, 1.125, 700),
    (21, 3, 21, 2.625, 125), (22, 4, 22, 2.925, 565), (23, 5, 23, 1.175, 682),
    (24, 7, 24, 0.650, 900), (25, 7, 25, 1.825, 575), (26, 25, 26, 0.825, 200),
]


def builtin_case_26bus() -> NetworkCase:
    """The 26-bus, 20 kV / 1 MVA test feeder with its equipment catalogs."""
    pf = 0.85
    buses = [Bus(0, 0.0, pf)] + [Bus(to, float(kva), pf) for _, _, to, _, kva in _TABLE_26BUS]
    buses.sort(key=lambda b: b.id)
    sections = tuple(Section(k, fr, to, length) for k, fr, to, length, _ in _TABLE_26BUS)
    conductors = (
        ConductorType(1, 0.158, 0.23, 151.0, 520.0),
        ConductorType(2, 0.271, 0.25, 81.0, 310.0),
        ConductorType(3, 0.455, 0.26, 48.0, 212.0),
        ConductorType(4, 0.782, 0.28, 31.0, 150.0),
        ConductorType(5, 1.374, 0.39, 15.0, 107.0),
    )
    capacitors = (
        CapacitorType(1, 1200.0, 2040.0, 100.0),
        CapacitorType(2, 600.0, 1320.0, 100.0),
        CapacitorType(3, 300.0, 975.0, 100.0),
        CapacitorType(4, 0.0, 0.0, 0.0),
    )
    econ = Economics(
        cp0=168.0, ce0=0.06, inflation=0.05, load_growth=0.02, load_factor=0.25, horizon_years=10,
        v_min=0.95, v_max=1.0, cap_budget=5000.0, dg_budget=10000.0, base_mva=1.0, base_kv=20.0,
    )
    case = NetworkCase(tuple(buses), sections, conductors, capacitors, DGType(500.0, 300.0, 4000.0), econ)
    validate_case(case)
    return case


def builtin_case_toy5() -> NetworkCase:
    """Five-bus test case small enough for exhaustive enumeration.

    Two conductor types, one capacitor size plus the empty entry, and a DG
    budget that admits at most two units.
    """
    pf = 0.85
    buses = (Bus(0, 0.0, pf), Bus(1, 300.0, pf), Bus(2, 500.0, pf), Bus(3, 600.0, pf), Bus(4, 700.0, pf))
    sections = (Section(1, 0, 1, 1.0), Section(2, 1, 2, 1.5), Section(3, 2, 3, 2.0), Section(4, 1, 4, 2.5))
    conductors = (ConductorType(1, 0.30, 0.30, 2500.0, 160.0), ConductorType(2, 0.80, 0.35, 800.0, 75.0))
    capacitors = (CapacitorType(1, 300.0, 900.0, 100.0), CapacitorType(2, 0.0, 0.0, 0.0))
    econ = Economics(
        cp0=168.0, ce0=0.06, inflation=0.05, load_growth=0.02, load_factor=0.25, horizon_years=5,
        v_min=0.95, v_max=1.0, cap_budget=2000.0, dg_budget=6000.0, base_mva=1.0, base_kv=11.0,
    )
    case = NetworkCase(buses, sections, conductors, capacitors, DGType(300.0, 150.0, 3000.0), econ)
    validate_case(case)
    return case
