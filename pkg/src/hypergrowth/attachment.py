"""Aging-preferential target selection.

A node i that arrived at t_i carries weight (k_i + y_i) * (t - t_i)**(-alpha)
at time t. Targets for one hyperedge are drawn sequentially without
replacement, each draw proportional to the weights of the not-yet-chosen
eligible nodes.

Two samplers target exactly this law:

* ``ExactScan`` recomputes all weights with numpy: O(N) per draw.
* ``AgeBucketed`` groups nodes into geometric age buckets, picks a bucket
  by an upper bound on its weight, a node inside it by (k + y), and accepts
  with probability age_factor / bucket_max_factor.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Collection, Sequence

import numpy as np

from .errors import EdgeCollisionExhausted, InfeasibleSelection, InvalidArgument
from .hypergraph import Hypergraph, NodeRecord

EDGE_RETRY_CAP = 1000
# consecutive duplicate proposals before a bucketed draw falls back to an exact scan
_DUPLICATE_FALLBACK = 64


def weight(node: NodeRecord, now: float, alpha: float) -> float:
    age = now - node.arrival_time
    if not age > 0:
        raise InvalidArgument(f"node {node.id} has nonpositive age {age} at t={now}")
    if alpha < 0:
        raise InvalidArgument("aging exponent must be nonnegative")
    return (node.hyperdegree + node.attractiveness) * age ** (-alpha)


def _n_eligible(graph: Hypergraph, now: float) -> int:
    # node ids are in arrival order, so nodes strictly older than `now` form a prefix
    return int(np.searchsorted(graph.arrival_times, now, side="left"))


def _exact_draw(w: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(w)
    total = cum[-1]
    if not total > 0:
        raise InfeasibleSelection("no positive-weight node left to draw")
    i = int(np.searchsorted(cum, rng.random() * total, side="right"))
    return min(i, len(w) - 1)


def exact_weights(graph: Hypergraph, now: float, alpha: float, n: int | None = None) -> np.ndarray:
    n = _n_eligible(graph, now) if n is None else n
    age = now - graph.arrival_times[:n]
    base = graph.hyperdegrees[:n] + graph.attractiveness[:n]
    if alpha == 0:
        return base.astype(np.float64)
    return base * age ** (-alpha)


@dataclass
class ExactScan:
    """Reference sampler: full weight vector, cumulative sums, renormalized draws."""

    name = "exact"

    def select(self, graph, now, m2, alpha, rng, excluded=()):
        n = _n_eligible(graph, now)
        w = exact_weights(graph, now, alpha, n)
        for v in excluded:
            if v < n:
                w[v] = 0.0
        eligible = int(np.count_nonzero(w > 0))
        if eligible < m2:
            raise InfeasibleSelection(f"need {m2} targets, only {eligible} eligible old nodes")
        chosen = []
        for _ in range(m2):
            i = _exact_draw(w, rng)
            chosen.append(i)
            w[i] = 0.0
        return chosen

    def draw_single(self, graph, now, alpha, rng, size):
        """``size`` independent single-target draws (batched cumulative-sum search)."""
        w = exact_weights(graph, now, alpha)
        cum = np.cumsum(w)
        idx = np.searchsorted(cum, rng.random(size) * cum[-1], side="right")
        return np.minimum(idx, len(w) - 1)


class Fenwick:
    """Binary indexed tree of floats supporting append, point add, prefix sum, search."""

    def __init__(self):
        self.tree = [0.0]  # 1-based

    def __len__(self):
        return len(self.tree) - 1

    def prefix(self, i: int) -> float:
        """Sum of the first i values."""
        s = 0.0
        tree = self.tree
        while i > 0:
            s += tree[i]
            i &= i - 1
        return s

    def append(self, value: float) -> None:
        i = len(self.tree)
        low = i & -i
        self.tree.append(value + self.prefix(i - 1) - self.prefix(i - low))

    def add(self, idx: int, delta: float) -> None:
        i = idx + 1
        tree = self.tree
        n = len(tree)
        while i < n:
            tree[i] += delta
            i += i & -i

    def search(self, target: float) -> int:
        """Smallest 0-based index whose inclusive prefix sum exceeds target."""
        tree = self.tree
        n = len(tree) - 1
        pos = 0
        step = 1 << n.bit_length()
        while step:
            nxt = pos + step
            if nxt <= n and tree[nxt] <= target:
                pos = nxt
                target -= tree[nxt]
            step >>= 1
        return pos


@dataclass
class _Buckets:
    key: tuple
    lo: list[int]
    hi: list[int]
    max_factor: list[float]
    base_total: list[float]
    cum: list[float]


@dataclass
class AgeBucketed:
    """Exact rejection sampler over geometric age buckets.

    The (k + y) values live in one Fenwick tree indexed by node id. Since ids
    follow arrival order, every age bucket is a contiguous id range and its
    (k + y) total is a difference of two prefix sums. The tree is kept in sync
    with the graph by replaying nodes and edges appended since the last call.
    """

    ratio: float = 2.0
    name = "bucketed"
    _graph: Hypergraph | None = field(default=None, init=False, repr=False)
    _tree: Fenwick = field(default_factory=Fenwick, init=False, repr=False)
    _synced_nodes: int = field(default=0, init=False, repr=False)
    _synced_edges: int = field(default=0, init=False, repr=False)
    _times: list[float] = field(default_factory=list, init=False, repr=False)
    _buckets: _Buckets | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if not self.ratio > 1:
            raise InvalidArgument(f"bucket ratio must exceed 1, got {self.ratio}")

    def _sync(self, graph: Hypergraph) -> None:
        if graph is not self._graph or graph.n_nodes < self._synced_nodes:
            self._graph = graph
            self._tree = Fenwick()
            self._times = []
            self._synced_nodes = 0
            self._synced_edges = 0
            self._buckets = None
        tree = self._tree
        n = graph.n_nodes
        if n > self._synced_nodes:
            # base weight y; hyperdegree contributions arrive via edge replay
            for y in graph.attractiveness[self._synced_nodes:n].tolist():
                tree.append(y)
            self._times.extend(graph.arrival_times[self._synced_nodes:n].tolist())
            self._synced_nodes = n
        edges = graph.edges
        for e in edges[self._synced_edges:]:
            for v in e.members:
                tree.add(v, 1.0)
        self._synced_edges = len(edges)

    def _build(self, now: float, alpha: float) -> _Buckets:
        key = (now, alpha, self._synced_nodes, self._synced_edges)
        if self._buckets is not None and self._buckets.key == key:
            return self._buckets
        times = self._times
        n = bisect_left(times, now)
        lo_list, hi_list, fac, tot, cum = [], [], [], [], []
        running = 0.0
        hi = n
        tree = self._tree
        p_hi = tree.prefix(hi)
        while hi > 0:
            youngest_age = now - times[hi - 1]
            lo = bisect_right(times, now - youngest_age * self.ratio, 0, hi)
            p_lo = tree.prefix(lo)
            total = p_hi - p_lo
            max_factor = youngest_age ** (-alpha)
            if total > 0:
                lo_list.append(lo)
                hi_list.append(hi)
                fac.append(max_factor)
                tot.append(total)
                running += total * max_factor
                cum.append(running)
            hi, p_hi = lo, p_lo
        self._buckets = _Buckets(key, lo_list, hi_list, fac, tot, cum)
        return self._buckets

    def _propose(self, b: _Buckets, now: float, alpha: float, rng: np.random.Generator) -> int:
        """One accepted draw from the full (non-excluded) weight law."""
        times = self._times
        tree = self._tree
        total = b.cum[-1]
        nb = len(b.cum)
        while True:
            j = bisect_right(b.cum, rng.random() * total)
            if j >= nb:
                continue
            lo, hi = b.lo[j], b.hi[j]
            i = tree.search(tree.prefix(lo) + rng.random() * b.base_total[j])
            if not lo <= i < hi:
                continue  # float round-off at a bucket edge
            if alpha == 0:
                return i
            if rng.random() * b.max_factor[j] < (now - times[i]) ** (-alpha):
                return i

    def draw_single(self, graph, now, alpha, rng, size):
        self._sync(graph)
        b = self._build(now, alpha)
        return np.fromiter((self._propose(b, now, alpha, rng) for _ in range(size)), dtype=np.int64, count=size)

    def select(self, graph, now, m2, alpha, rng, excluded=()):
        self._sync(graph)
        b = self._build(now, alpha)
        n = b.hi[0] if b.hi else 0
        excluded = set(excluded)
        eligible = n - sum(1 for v in excluded if v < n)
        if eligible < m2:
            raise InfeasibleSelection(f"need {m2} targets, only {eligible} eligible old nodes")
        chosen: list[int] = []
        taken = set(excluded)
        for _ in range(m2):
            for _attempt in range(_DUPLICATE_FALLBACK):
                i = self._propose(b, now, alpha, rng)
                if i not in taken:
                    break
            else:
                w = exact_weights(graph, now, alpha, n)
                w[[v for v in taken if v < n]] = 0.0
                i = _exact_draw(w, rng)
            chosen.append(i)
            taken.add(i)
        return chosen


SamplerStrategy = ExactScan | AgeBucketed


def make_sampler(name: str, bucket_ratio: float = 2.0) -> SamplerStrategy:
    if name == "exact":
        return ExactScan()
    if name == "bucketed":
        return AgeBucketed(ratio=bucket_ratio)
    raise InvalidArgument(f"unknown sampler {name!r}; expected 'exact' or 'bucketed'")


def select_targets(
    graph: Hypergraph,
    now: float,
    m2: int,
    alpha: float,
    rng: np.random.Generator,
    excluded: Collection[int] = (),
    strategy: SamplerStrategy | None = None,
) -> list[int]:
    """Draw ``m2`` distinct old nodes by sequential weighted draws without replacement."""
    if m2 < 1:
        raise InvalidArgument("m2 must be at least 1")
    if alpha < 0:
        raise InvalidArgument("aging exponent must be nonnegative")
    strategy = ExactScan() if strategy is None else strategy
    return strategy.select(graph, now, m2, alpha, rng, excluded)


def form_batch_edges(
    graph: Hypergraph,
    now: float,
    new_nodes: Sequence[int],
    m: int,
    m2: int,
    alpha: float,
    rng: np.random.Generator,
    strategy: SamplerStrategy | None = None,
    retry_cap: int = EDGE_RETRY_CAP,
    disjoint: bool = False,
) -> list[tuple[int, ...]]:
    """Member sets for the ``m`` hyperedges spanned by one arriving batch.

    Every edge holds the whole batch plus an independent draw of ``m2`` old
    nodes; a draw that reproduces an existing or sibling edge is redrawn.
    Nothing is inserted here, so all ``m`` draws see the same weights.
    With ``disjoint`` the old-node sets of sibling edges do not overlap.
    """
    if not new_nodes:
        raise InvalidArgument("a batch needs at least one new node")
    strategy = ExactScan() if strategy is None else strategy
    excluded = set(new_nodes)
    out: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for _ in range(m):
        for _attempt in range(retry_cap + 1):
            targets = select_targets(graph, now, m2, alpha, rng, excluded, strategy)
            key = tuple(sorted((*new_nodes, *targets)))
            if key not in seen and key not in graph.edge_key_set:
                break
        else:
            raise EdgeCollisionExhausted(
                f"could not draw {m} distinct hyperedges after {retry_cap} retries "
                f"(old-node pool too small for m={m}, m2={m2})"
            )
        seen.add(key)
        out.append(key)
        if disjoint:
            excluded.update(targets)
    return out
