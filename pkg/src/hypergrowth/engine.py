"""Growth process driver: initial hypergraph, Poisson batch arrivals, edge formation."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import TextIO

from .attachment import SamplerStrategy, form_batch_edges, make_sampler
from .errors import InvalidArgument
from .hypergraph import Hypergraph
from .stochastic import (
    ArrivalClock,
    AttractivenessSpec,
    BatchSizeSpec,
    DiscreteUniform,
    RngStreams,
    UniformAttractiveness,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TargetNodeCount:
    n: int


@dataclass(frozen=True)
class MaxTime:
    t: float


StopRule = TargetNodeCount | MaxTime


@dataclass
class ModelParams:
    """Generative parameters. Defaults reproduce the headline experiment configuration."""

    lam: float = 1.0
    m: int = 2
    m2: int = 6
    m0: int = 20
    alpha: float = 0.5
    batch: BatchSizeSpec = field(default_factory=lambda: DiscreteUniform(1, 5))
    attractiveness: AttractivenessSpec = field(default_factory=lambda: UniformAttractiveness(0.0, 1.0))
    stop: StopRule = field(default_factory=lambda: TargetNodeCount(100_000))
    seed: int = 20160101
    sampler: str = "bucketed"
    bucket_ratio: float = 2.0
    per_node_attractiveness: bool = False
    disjoint_batch_targets: bool = False

    def validate(self) -> "ModelParams":
        if not self.lam > 0:
            raise InvalidArgument(f"lam must be positive, got {self.lam}")
        for name in ("m", "m2", "m0"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise InvalidArgument(f"{name} must be a positive integer, got {v!r}")
        if self.m0 < self.m2:
            raise InvalidArgument(f"m0={self.m0} must be at least m2={self.m2}")
        if self.m * self.m2 > self.m0:
            raise InvalidArgument(f"m*m2 = {self.m * self.m2} exceeds m0 = {self.m0}")
        if not self.alpha >= 0:
            raise InvalidArgument(f"alpha must be nonnegative, got {self.alpha}")
        if isinstance(self.stop, TargetNodeCount):
            if self.stop.n < self.m0:
                raise InvalidArgument(f"target node count {self.stop.n} is below m0={self.m0}")
        elif isinstance(self.stop, MaxTime):
            if not self.stop.t > 0:
                raise InvalidArgument("max time must be positive")
        else:
            raise InvalidArgument(f"unknown stop rule {self.stop!r}")
        make_sampler(self.sampler, self.bucket_ratio)
        return self


@dataclass(frozen=True)
class GrowthEvent:
    batch_index: int
    event_time: float
    eta: int
    y: float
    new_nodes: tuple[int, ...]
    edge_ids: tuple[int, ...]


@dataclass(frozen=True)
class Snapshot:
    time: float
    n_nodes: int
    n_edges: int
    hyperdegrees: tuple[int, ...]


EVENT_HEADER = ("batch", "time", "eta", "y", "new_nodes", "edge_ids")


def event_row(ev: GrowthEvent) -> list[str]:
    return [
        str(ev.batch_index),
        repr(ev.event_time),
        str(ev.eta),
        repr(ev.y),
        ";".join(map(str, ev.new_nodes)),
        ";".join(map(str, ev.edge_ids)),
    ]


def init_graph(params: ModelParams, rng: RngStreams) -> Hypergraph:
    """m0 initial nodes at times -m0/lam, ..., -1/lam joined by one hyperedge."""
    params.validate()
    cap = params.stop.n + 16 if isinstance(params.stop, TargetNodeCount) else 1024
    g = Hypergraph(capacity=cap)
    m0 = params.m0
    for j in range(m0):
        y = params.attractiveness.sample(rng.init)
        g.add_node(-(m0 - j) / params.lam, y, 0)
    g.add_hyperedge(range(m0), created_at=0.0)
    return g


@dataclass
class Simulation:
    """Owns one replica's graph, clock, random streams and sampler."""

    params: ModelParams
    replica: int = 0
    event_sink: TextIO | None = None
    keep_events: bool = True
    snapshot_every: int = 0
    graph: Hypergraph = field(init=False)
    clock: ArrivalClock = field(init=False)
    rng: RngStreams = field(init=False)
    sampler: SamplerStrategy = field(init=False)
    events: list[GrowthEvent] = field(default_factory=list, init=False)
    snapshots: list[Snapshot] = field(default_factory=list, init=False)

    def __post_init__(self):
        self.params.validate()
        self.rng = RngStreams(self.params.seed, self.replica)
        self.graph = init_graph(self.params, self.rng)
        self.clock = ArrivalClock(self.params.lam)
        self.sampler = make_sampler(self.params.sampler, self.params.bucket_ratio)
        self._writer = None
        if self.event_sink is not None:
            self._writer = csv.writer(self.event_sink, lineterminator="\n")
            self._writer.writerow(EVENT_HEADER)

    def _apply_batch(self, now: float) -> GrowthEvent:
        p, g, rng = self.params, self.graph, self.rng
        b = self.clock.batch_counter
        eta = p.batch.sample(rng.batch)
        if p.per_node_attractiveness:
            ys = [p.attractiveness.sample(rng.attractiveness) for _ in range(eta)]
        else:
            ys = [p.attractiveness.sample(rng.attractiveness)] * eta
        new = tuple(g.add_node(now, y, b) for y in ys)
        members = form_batch_edges(g, now, new, p.m, p.m2, p.alpha, rng.selection, self.sampler,
                                   disjoint=p.disjoint_batch_targets)
        edge_ids = tuple(g.add_hyperedge(mem, now) for mem in members)
        ev = GrowthEvent(b, now, eta, ys[0], new, edge_ids)
        if self.keep_events:
            self.events.append(ev)
        if self._writer is not None:
            self._writer.writerow(event_row(ev))
        if self.snapshot_every and b % self.snapshot_every == 0:
            self.snapshots.append(self.snapshot())
        return ev

    def step(self) -> GrowthEvent:
        return self._apply_batch(self.clock.next_arrival(self.rng.arrivals))

    def snapshot(self) -> Snapshot:
        g = self.graph
        return Snapshot(self.clock.current_time, g.n_nodes, g.n_edges, tuple(g.hyperdegrees.tolist()))

    def run(self) -> "Simulation":
        stop = self.params.stop
        if isinstance(stop, TargetNodeCount):
            while self.graph.n_nodes < stop.n:
                self.step()
        else:
            while True:
                t = self.clock.next_arrival(self.rng.arrivals)
                if t > stop.t:
                    break
                self._apply_batch(t)
        log.debug("replica %d finished: %d nodes, %d edges, %d batches",
                  self.replica, self.graph.n_nodes, self.graph.n_edges, self.clock.batch_counter)
        return self


def step(sim: Simulation) -> GrowthEvent:
    return sim.step()


def run(params: ModelParams, replica: int = 0, **kwargs) -> tuple[Hypergraph, list[GrowthEvent], list[Snapshot]]:
    sim = Simulation(params, replica=replica, **kwargs).run()
    return sim.graph, sim.events, sim.snapshots
