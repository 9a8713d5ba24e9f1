"""The random growth process.

Each step is a node event with probability p (a new degree-1 node joined to
a sampled existing node) or otherwise an edge event (an edge between two
independently sampled existing nodes). Endpoints are drawn with
probability proportional to f(degree). The graph is a multigraph.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .errors import DeadStartError, DomainError, InvalidParameterError, SamplerExhaustedError
from .inversion import AttachmentFunction
from .sampler import N_NODES, DegreeClassSampler, _add_node, _pick, _promote

SELF_LOOP_POLICIES = ("resample", "allow")
DEFAULT_RESAMPLE_LIMIT = 16
UNIFORM_CHUNK = 1 << 18

# Counter slots returned by the kernel.
FORCED = 0
SELF_LOOPS = 1

_OK = 0
_EXHAUSTED = 1


@dataclass(frozen=True)
class SimulationConfig:
    p: float
    steps: int
    seed: int
    self_loop_policy: str = "resample"
    resample_limit: int = DEFAULT_RESAMPLE_LIMIT
    multi_edge_policy: str = "allow"
    g0: Sequence[tuple[int, int]] | None = None

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise InvalidParameterError(f"p must lie in (0, 1], got {self.p!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise InvalidParameterError(f"steps must be a positive integer, got {self.steps!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidParameterError("seed must be an integer in [0, 2**64)")
        if self.self_loop_policy not in SELF_LOOP_POLICIES:
            raise InvalidParameterError(f"self_loop_policy must be one of {SELF_LOOP_POLICIES}")
        if self.resample_limit < 0:
            raise InvalidParameterError("resample_limit must be non-negative")
        if self.multi_edge_policy != "allow":
            raise InvalidParameterError("only multi_edge_policy='allow' is supported")


@dataclass
class GrowthGraph:
    """Multigraph produced by a run. ``degree_counts[i]`` is N(i, t)."""

    node_count: int
    edges: np.ndarray
    degree: np.ndarray
    degree_counts: np.ndarray
    forced_node_events: int = 0
    self_loops: int = 0
    seed: int | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.node_count else 0

    def check_invariants(self):
        assert int(self.degree_counts.sum()) == self.node_count
        weighted = int(np.dot(np.arange(self.degree_counts.size), self.degree_counts))
        assert weighted == 2 * self.edge_count
        assert self.node_count == 0 or int(self.degree.min()) >= 1
        recount = np.bincount(self.edges.ravel(), minlength=self.node_count)
        assert np.array_equal(recount, self.degree)


@njit(cache=True)
def _run_steps(
    steps, p, resample_limit, allow_loops, uniforms, upos,
    fw, count, tree, start, order, pos, deg, istate, fstate,
    eu, ev, m, counters,
):
    d_max = fw.size - 1
    need = 1 + 2 * (2 + resample_limit)
    done = 0
    while done < steps and upos + need <= uniforms.size:
        total = fstate[0]
        if total <= 0.0:
            return done, upos, m, _EXHAUSTED
        e = uniforms[upos]
        upos += 1
        if e < p:
            v = _pick(uniforms[upos], uniforms[upos + 1], fw, count, tree, start, order, istate, total)
            upos += 2
            x = _add_node(fw, count, tree, start, order, pos, deg, istate, fstate)
            _promote(v, fw, count, tree, start, order, pos, deg, istate, fstate)
            eu[m] = x
            ev[m] = v
        else:
            u = _pick(uniforms[upos], uniforms[upos + 1], fw, count, tree, start, order, istate, total)
            v = _pick(uniforms[upos + 2], uniforms[upos + 3], fw, count, tree, start, order, istate, total)
            upos += 4
            if not allow_loops:
                tries = 0
                while v == u and tries < resample_limit:
                    v = _pick(uniforms[upos], uniforms[upos + 1], fw, count, tree, start, order, istate, total)
                    upos += 2
                    tries += 1
            if v == u and deg[u] + 2 > d_max:
                # A loop would push u past the ceiling: attach a new node instead.
                counters[FORCED] += 1
                x = _add_node(fw, count, tree, start, order, pos, deg, istate, fstate)
                _promote(u, fw, count, tree, start, order, pos, deg, istate, fstate)
                eu[m] = x
                ev[m] = u
            else:
                if v == u:
                    counters[SELF_LOOPS] += 1
                _promote(u, fw, count, tree, start, order, pos, deg, istate, fstate)
                _promote(v, fw, count, tree, start, order, pos, deg, istate, fstate)
                eu[m] = u
                ev[m] = v
        m += 1
        done += 1
    return done, upos, m, _OK


def _initial_edges(config: SimulationConfig) -> np.ndarray:
    if config.g0 is None:
        return np.array([[0, 1]], dtype=np.int64)
    edges = np.asarray(config.g0, dtype=np.int64).reshape(-1, 2)
    if edges.size == 0:
        raise InvalidParameterError("initial graph needs at least one edge")
    if edges.min() < 0:
        raise InvalidParameterError("node ids must be non-negative")
    n = int(edges.max()) + 1
    present = np.zeros(n, dtype=bool)
    present[edges.ravel()] = True
    if not present.all():
        raise InvalidParameterError("initial graph node ids must be dense 0..n-1 with no isolated nodes")
    return edges


class GrowthSimulator:
    """Stateful runner: build with ``(f, config)``, then ``step`` or ``run``."""

    def __init__(self, f: AttachmentFunction, config: SimulationConfig):
        self.f = f
        self.config = config
        edges0 = _initial_edges(config)
        n0 = int(edges0.max()) + 1
        deg0 = np.bincount(edges0.ravel(), minlength=n0)
        if deg0.max() > f.d_max:
            raise DomainError(
                f"initial graph has degree {int(deg0.max())} above the attachment table's d_max={f.d_max}"
            )
        self.sampler = DegreeClassSampler(f.values, deg0, capacity=n0 + config.steps)
        if self.sampler.total_weight <= 0:
            raise DeadStartError(
                "every initial node has zero attachment weight (f(1) = 0?); no endpoint can be sampled"
            )
        self._rng = np.random.Generator(np.random.PCG64(config.seed))
        self._uniforms = np.empty(0)
        self._upos = 0
        cap = edges0.shape[0] + config.steps
        self._eu = np.zeros(cap, dtype=np.int64)
        self._ev = np.zeros(cap, dtype=np.int64)
        m0 = edges0.shape[0]
        self._eu[:m0] = edges0[:, 0]
        self._ev[:m0] = edges0[:, 1]
        self._m = m0
        self._counters = np.zeros(2, dtype=np.int64)
        self.steps_done = 0
        self.wall_time = 0.0

    @property
    def node_count(self) -> int:
        return self.sampler.node_count

    @property
    def forced_node_events(self) -> int:
        return int(self._counters[FORCED])

    @property
    def self_loops(self) -> int:
        return int(self._counters[SELF_LOOPS])

    def _reserve(self, steps: int):
        self.sampler.ensure_capacity(self.sampler.node_count + steps)
        need = self._m + steps
        if need > self._eu.size:
            size = max(need, 2 * self._eu.size)
            self._eu = np.concatenate([self._eu, np.zeros(size - self._eu.size, dtype=np.int64)])
            self._ev = np.concatenate([self._ev, np.zeros(size - self._ev.size, dtype=np.int64)])

    def _refill(self):
        rest = self._uniforms[self._upos :]
        self._uniforms = np.concatenate([rest, self._rng.random(UNIFORM_CHUNK)])
        self._upos = 0

    def advance(self, steps: int) -> "GrowthSimulator":
        """Apply ``steps`` more steps."""
        self._reserve(steps)
        cfg = self.config
        allow = cfg.self_loop_policy == "allow"
        t0 = time.perf_counter()
        remaining = steps
        while remaining > 0:
            if self._uniforms.size - self._upos < 1 + 2 * (2 + cfg.resample_limit):
                self._refill()
            done, self._upos, self._m, status = _run_steps(
                remaining, cfg.p, cfg.resample_limit, allow, self._uniforms, self._upos,
                *self.sampler.arrays(), self._eu, self._ev, self._m, self._counters,
            )
            remaining -= done
            self.steps_done += done
            if status != _OK:
                raise SamplerExhaustedError(
                    f"all nodes have zero attachment weight after {self.steps_done} steps; "
                    "no endpoint can be sampled"
                )
        self.wall_time += time.perf_counter() - t0
        return self

    def step(self) -> "GrowthSimulator":
        return self.advance(1)

    def run(self) -> GrowthGraph:
        """Finish the configured step budget and return the graph."""
        left = self.config.steps - self.steps_done
        if left > 0:
            self.advance(left)
        return self.graph()

    def graph(self) -> GrowthGraph:
        n = self.sampler.node_count
        edges = np.stack([self._eu[: self._m], self._ev[: self._m]], axis=1)
        return GrowthGraph(
            node_count=n,
            edges=edges,
            degree=self.sampler.deg[:n].copy(),
            degree_counts=self.sampler.count[: self.f.d_max + 1].copy(),
            forced_node_events=self.forced_node_events,
            self_loops=self.self_loops,
            seed=self.config.seed,
            wall_time=self.wall_time,
        )


def init(f: AttachmentFunction, config: SimulationConfig) -> GrowthSimulator:
    return GrowthSimulator(f, config)


def run(f: AttachmentFunction, config: SimulationConfig) -> GrowthGraph:
    return GrowthSimulator(f, config).run()
