"""Binary-selective particle swarm over mixed binary / categorical variables.

Velocities are real-valued.  A binary variable becomes 1 with probability
``sigmoid(v)``; a selective variable with ``n`` ordered choices (index 1 is
the largest) picks the first index ``i`` with ``rd + a_i < sigmoid(v)`` for
strictly decreasing thresholds ``a_1 > ... > a_n`` in ``[-0.5, 0.5]``,
falling back to ``n``.

The default thresholds sit in a narrow band around zero.  Spread over the
whole interval they would cap the chance of picking choice 1 at
``sigmoid(v) - 0.5`` and make interior choices nearly unreachable, so the
swarm could never settle on them.

Positions enter the velocity update on a normalized scale: bits as 0/1 and a
selective index ``idx`` as ``(n - idx) / (n - 1)``, multiplied by
``position_scale``.  The scale turns a unit disagreement with pbest/gbest
into a velocity step large enough to move the sigmoid decisively.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

PENALTY = 1e18


class Infeasible(NamedTuple):
    """Returned by an objective callback for a constraint-violating position.

    ``violation`` (>= 0) ranks infeasible positions among themselves; the
    engine scores them ``penalty * (1 + violation)``, which stays above any
    feasible objective.
    """

    violation: float = 0.0


Objective = Callable[[np.ndarray], Union[float, Infeasible]]


@dataclass(frozen=True)
class VariableSpec:
    kind: str  # "binary" or "selective"
    n: int = 2
    thresholds: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "binary":
            if self.thresholds:
                raise ValueError("binary variables take no thresholds")
            object.__setattr__(self, "n", 2)
        elif self.kind == "selective":
            if self.n < 2:
                raise ValueError("selective variables need at least two choices")
            if not self.thresholds:
                object.__setattr__(self, "thresholds", default_thresholds(self.n))
            th = self.thresholds
            if len(th) != self.n:
                raise ValueError("need one threshold per choice")
            if any(a <= b for a, b in zip(th, th[1:])):
                raise ValueError("thresholds must be strictly decreasing")
            if th[0] > 0.5 or th[-1] < -0.5:
                raise ValueError("thresholds must lie in [-0.5, 0.5]")
        else:
            raise ValueError(f"unknown variable kind {self.kind!r}")

    @classmethod
    def binary(cls) -> "VariableSpec":
        return cls("binary")

    @classmethod
    def selective(cls, n: int, thresholds: Sequence[float] = ()) -> "VariableSpec":
        return cls("selective", n, tuple(thresholds))

    @property
    def domain(self) -> range:
        return range(0, 2) if self.kind == "binary" else range(1, self.n + 1)


THRESHOLD_HALF_WIDTH = 0.05


def default_thresholds(n: int, half_width: float = THRESHOLD_HALF_WIDTH) -> tuple[float, ...]:
    """Evenly spaced, strictly decreasing thresholds in ``[-half_width, half_width]``."""
    return tuple(half_width * (1.0 - 2.0 * i / (n - 1)) for i in range(n))


@dataclass(frozen=True)
class SwarmConfig:
    n_particles: int = 50
    it_max: int = 1000
    c1: float = 2.0
    c2: float = 2.0
    w_max: float = 0.9
    w_min: float = 0.4
    v_max: float = 6.0
    seed: int = 0
    penalty: float = PENALTY
    position_scale: float = 6.0
    n_workers: int = 1

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("need at least two particles")
        if self.it_max < 1:
            raise ValueError("need at least one iteration")
        if self.w_min > self.w_max:
            raise ValueError("w_min must not exceed w_max")
        if self.v_max <= 0:
            raise ValueError("v_max must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.position_scale <= 0:
            raise ValueError("position_scale must be positive")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray | None = None
    pbest_objective: float = math.inf


@dataclass
class BestRecord:
    gbest_position: np.ndarray | None
    gbest_objective: float
    objective_history: list[float] = field(default_factory=list)
    feasible_found: bool = False
    evaluations: int = 0


def sigmoid(v):
    """Logistic function; accepts scalars or arrays."""
    if np.isscalar(v):
        # split form keeps exp() from overflowing
        if v >= 0:
            return 1.0 / (1.0 + math.exp(-v))
        ev = math.exp(v)
        return ev / (1.0 + ev)
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out


def inertia(it: int, cfg: SwarmConfig) -> float:
    """Linearly decreasing inertia weight."""
    return cfg.w_max - (cfg.w_max - cfg.w_min) / cfg.it_max * it


def velocity_update(v, s_norm, pbest_norm, gbest_norm, w, rng, cfg: SwarmConfig, r1=None, r2=None):
    v = np.asarray(v, dtype=float)
    if r1 is None:
        r1 = rng.random(v.shape)
    if r2 is None:
        r2 = rng.random(v.shape)
    new = w * v + cfg.c1 * r1 * (pbest_norm - s_norm) + cfg.c2 * r2 * (gbest_norm - s_norm)
    return np.clip(new, -cfg.v_max, cfg.v_max)


def binary_position_update(v: float, rand: float) -> int:
    return 1 if rand < sigmoid(v) else 0


def selective_position_update(v: float, spec: VariableSpec, rd: float) -> int:
    sig = sigmoid(v)
    for i, a in enumerate(spec.thresholds, start=1):
        if rd + a < sig:
            return i
    return spec.n


class _Layout:
    """Vectorized view of a spec list."""

    def __init__(self, specs: Sequence[VariableSpec]):
        self.specs = list(specs)
        self.n_vars = len(specs)
        self.is_binary = np.array([s.kind == "binary" for s in specs], dtype=bool)
        self.n = np.array([s.n for s in specs], dtype=np.int64)
        width = max((s.n for s in specs if s.kind == "selective"), default=1)
        th = np.full((self.n_vars, width), np.inf)
        for j, s in enumerate(specs):
            if s.kind == "selective":
                th[j, : s.n] = s.thresholds
        self.thresholds = th
        self.low = np.where(self.is_binary, 0, 1)

    def normalize(self, pos: np.ndarray, scale: float = 1.0) -> np.ndarray:
        sel = np.where(self.is_binary, 0.0, (self.n - pos) / np.maximum(self.n - 1, 1))
        return scale * np.where(self.is_binary, pos.astype(float), sel)

    def positions_from(self, v: np.ndarray, draws: np.ndarray) -> np.ndarray:
        sig = sigmoid(v)
        bits = (draws < sig).astype(np.int64)
        hit = draws[:, None] + self.thresholds < sig[:, None]
        first = np.argmax(hit, axis=1) + 1
        chosen = np.where(hit.any(axis=1), first, self.n)
        return np.where(self.is_binary, bits, chosen)

    def random_positions(self, rng: np.random.Generator) -> np.ndarray:
        # uniform over each domain: bits in {0, 1}, indices in 1..n
        return rng.integers(self.low, np.where(self.is_binary, 2, self.n + 1))


def _stream(seed: int, it: int, particle: int) -> np.random.Generator:
    return np.random.default_rng([seed, it, particle])


def run(problem: Objective, specs: Sequence[VariableSpec], cfg: SwarmConfig = SwarmConfig()) -> BestRecord:
    """Minimize ``problem`` over the mixed domain described by ``specs``.

    Evaluations within an iteration may run on a thread pool
    (``cfg.n_workers > 1``); updates are applied in particle order afterwards,
    and every particle draws from its own (seed, iteration, index) stream, so
    results do not depend on the worker count.
    """
    layout = _Layout(specs)
    particles = []
    for i in range(cfg.n_particles):
        rng = _stream(cfg.seed, 0, i)
        pos = layout.random_positions(rng)
        vel = rng.uniform(-1.0, 1.0, layout.n_vars)
        particles.append(Particle(pos, vel))

    record = BestRecord(None, math.inf)
    pool = ThreadPoolExecutor(cfg.n_workers) if cfg.n_workers > 1 else None

    def score(pos: np.ndarray) -> tuple[float, bool]:
        res = problem(pos)
        if isinstance(res, Infeasible):
            return cfg.penalty * (1.0 + max(0.0, float(res.violation))), False
        return float(res), True

    def evaluate_all() -> None:
        positions = [p.position for p in particles]
        results = list(pool.map(score, positions) if pool else map(score, positions))
        record.evaluations += len(results)
        for p, (obj, feasible) in zip(particles, results):
            if feasible and obj < p.pbest_objective:
                p.pbest_objective = obj
                p.pbest_position = p.position.copy()
            if obj < record.gbest_objective:
                record.gbest_objective = obj
                record.gbest_position = p.position.copy()
                record.feasible_found = record.feasible_found or feasible
        record.objective_history.append(record.gbest_objective)

    try:
        evaluate_all()
        for it in range(cfg.it_max):
            w = inertia(it, cfg)
            g_norm = layout.normalize(record.gbest_position, cfg.position_scale)
            for i, p in enumerate(particles):
                rng = _stream(cfg.seed, it + 1, i)
                s_norm = layout.normalize(p.position, cfg.position_scale)
                p_norm = g_norm if p.pbest_position is None else layout.normalize(p.pbest_position, cfg.position_scale)
                p.velocity = velocity_update(p.velocity, s_norm, p_norm, g_norm, w, rng, cfg)
                p.position = layout.positions_from(p.velocity, rng.random(layout.n_vars))
            evaluate_all()
    finally:
        if pool:
            pool.shutdown()
    return record
