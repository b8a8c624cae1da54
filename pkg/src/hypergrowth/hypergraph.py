"""Append-only hypergraph with incremental hyperdegree bookkeeping.

Node ids are dense and follow insertion order. Per-node data lives in
growable numpy arrays so samplers can take zero-copy views.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class NodeRecord:
    id: int
    arrival_time: float
    attractiveness: float
    hyperdegree: int
    batch_index: int


@dataclass(frozen=True)
class HyperEdge:
    edge_id: int
    members: tuple[int, ...]
    created_at: float


class Hypergraph:
    def __init__(self, capacity: int = 1024):
        capacity = max(int(capacity), 16)
        self._t = np.empty(capacity, dtype=np.float64)
        self._y = np.empty(capacity, dtype=np.float64)
        self._k = np.zeros(capacity, dtype=np.int64)
        self._batch = np.empty(capacity, dtype=np.int64)
        self._n = 0
        self.edges: list[HyperEdge] = []
        self.edge_key_set: set[tuple[int, ...]] = set()
        self._last_batch = -1
        self._max_time = -np.inf
        # latest arrival among batches before the current one
        self._earlier_max = -np.inf

    # -- sizes / views -------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return self._n

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return self._n

    @property
    def arrival_times(self) -> np.ndarray:
        return self._t[: self._n]

    @property
    def attractiveness(self) -> np.ndarray:
        return self._y[: self._n]

    @property
    def hyperdegrees(self) -> np.ndarray:
        return self._k[: self._n]

    @property
    def batch_indices(self) -> np.ndarray:
        return self._batch[: self._n]

    def node(self, node_id: int) -> NodeRecord:
        if not 0 <= node_id < self._n:
            raise InvalidArgument(f"unknown node id {node_id}")
        return NodeRecord(
            id=node_id,
            arrival_time=float(self._t[node_id]),
            attractiveness=float(self._y[node_id]),
            hyperdegree=int(self._k[node_id]),
            batch_index=int(self._batch[node_id]),
        )

    @property
    def nodes(self) -> list[NodeRecord]:
        return [self.node(i) for i in range(self._n)]

    # -- mutation ------------------------------------------------------

    def _grow(self) -> None:
        cap = 2 * len(self._t)
        for name in ("_t", "_y", "_k", "_batch"):
            old = getattr(self, name)
            new = np.zeros(cap, dtype=old.dtype)
            new[: self._n] = old[: self._n]
            setattr(self, name, new)

    def add_node(self, arrival_time: float, attractiveness: float, batch_index: int) -> int:
        if not attractiveness >= 0:
            raise InvalidArgument(f"attractiveness must be >= 0, got {attractiveness}")
        if batch_index < 0:
            raise InvalidArgument("batch_index must be nonnegative")
        if batch_index < self._last_batch:
            raise InvalidArgument("batch indices must be nondecreasing")
        if batch_index > self._last_batch:
            self._earlier_max = self._max_time
            self._last_batch = batch_index
        if arrival_time < self._earlier_max or (batch_index > 0 and arrival_time == self._earlier_max):
            raise InvalidArgument(
                f"batch {batch_index} arrives at {arrival_time}, not after earlier batches "
                f"(latest {self._earlier_max})"
            )
        if self._n == len(self._t):
            self._grow()
        i = self._n
        self._t[i] = arrival_time
        self._y[i] = attractiveness
        self._k[i] = 0
        self._batch[i] = batch_index
        self._n += 1
        self._max_time = max(self._max_time, arrival_time)
        return i

    def add_hyperedge(self, members: Iterable[int], created_at: float) -> int | None:
        """Insert a hyperedge; return its id, or None if the member set already exists.

        A rejected duplicate leaves the graph untouched.
        """
        key = canonical_key(members)
        if not key:
            raise InvalidArgument("hyperedge must be nonempty")
        if key[0] < 0 or key[-1] >= self._n:
            raise InvalidArgument(f"hyperedge references unknown node ids: {key}")
        if key in self.edge_key_set:
            return None
        edge_id = len(self.edges)
        self.edges.append(HyperEdge(edge_id, key, float(created_at)))
        self.edge_key_set.add(key)
        self._k[list(key)] += 1
        return edge_id

    def has_edge(self, members: Iterable[int]) -> bool:
        return canonical_key(members) in self.edge_key_set

    # -- queries / export ----------------------------------------------

    def hyperdegree_sequence(self) -> list[tuple[int, int]]:
        return [(i, int(k)) for i, k in enumerate(self.hyperdegrees)]

    def recount_hyperdegrees(self) -> np.ndarray:
        """Brute-force hyperdegrees from the edge list (for consistency checks)."""
        k = np.zeros(self._n, dtype=np.int64)
        for e in self.edges:
            for v in e.members:
                k[v] += 1
        return k

    def write_edges(self, fh: TextIO) -> None:
        for e in self.edges:
            fh.write(f"{e.edge_id}\t{','.join(map(str, e.members))}\n")

    def write_bipartite(self, fh: TextIO) -> None:
        for e in self.edges:
            for v in e.members:
                fh.write(f"E{e.edge_id}\tv{v}\n")


def canonical_key(members: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted({int(v) for v in members}))


def read_edges(fh: TextIO) -> list[tuple[int, tuple[int, ...]]]:
    out = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        eid, members = line.split("\t")
        out.append((int(eid), tuple(int(v) for v in members.split(","))))
    return out
