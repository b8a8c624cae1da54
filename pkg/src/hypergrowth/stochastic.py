"""Randomness sources: Poisson arrival clock, batch-size law, attractiveness law.

Every concern draws from its own substream of one master seed, so changing,
say, the attractiveness law leaves arrival times untouched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar

import numpy as np
from scipy import integrate

from .errors import InvalidArgument

MIN_GAP = 1e-12

STREAMS = ("arrivals", "batch", "attractiveness", "selection", "init")


@dataclass
class RngStreams:
    seed: int
    replica: int = 0
    arrivals: np.random.Generator = field(init=False, repr=False)
    batch: np.random.Generator = field(init=False, repr=False)
    attractiveness: np.random.Generator = field(init=False, repr=False)
    selection: np.random.Generator = field(init=False, repr=False)
    init: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidArgument("seed must fit in an unsigned 64-bit integer")
        root = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.replica),))
        for name, child in zip(STREAMS, root.spawn(len(STREAMS))):
            setattr(self, name, np.random.default_rng(child))


# ---------------------------------------------------------------------------
# batch sizes


class BatchSizeSpec:
    kind: ClassVar[str]

    def sample(self, rng: np.random.Generator) -> int:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class DiscreteUniform(BatchSizeSpec):
    lo: int
    hi: int
    kind: ClassVar[str] = "uniform_int"

    def __post_init__(self):
        if not (isinstance(self.lo, int) and isinstance(self.hi, int)) or self.lo < 1 or self.hi < self.lo:
            raise InvalidArgument(f"uniform_int needs integers 1 <= lo <= hi, got {self.lo}, {self.hi}")

    def sample(self, rng):
        return int(rng.integers(self.lo, self.hi + 1))

    @property
    def mean(self):
        return (self.lo + self.hi) / 2

    def to_dict(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class ConstantBatch(BatchSizeSpec):
    n: int
    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidArgument(f"constant batch size must be a positive integer, got {self.n}")

    def sample(self, rng):
        return self.n

    @property
    def mean(self):
        return float(self.n)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class TablePmf(BatchSizeSpec):
    values: tuple[int, ...]
    probs: tuple[float, ...]
    kind: ClassVar[str] = "table"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if not self.values or len(self.values) != len(self.probs):
            raise InvalidArgument("table pmf needs matching, nonempty values and probs")
        if any(not isinstance(v, int) or v < 1 for v in self.values):
            raise InvalidArgument("table pmf values must be positive integers")
        if len(set(self.values)) != len(self.values):
            raise InvalidArgument("table pmf values must be distinct")
        if any(p < 0 for p in self.probs) or abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise InvalidArgument("table pmf probabilities must be nonnegative and sum to 1")

    def sample(self, rng):
        return int(self.values[rng.choice(len(self.values), p=self.probs)])

    @property
    def mean(self):
        return math.fsum(v * p for v, p in zip(self.values, self.probs))

    def to_dict(self):
        return {"kind": self.kind, "values": list(self.values), "probs": list(self.probs)}


def sample_batch_size(spec: BatchSizeSpec, rng: np.random.Generator) -> int:
    return spec.sample(rng)


def mean_batch_size(spec: BatchSizeSpec) -> float:
    return spec.mean


# ---------------------------------------------------------------------------
# attractiveness


class AttractivenessSpec:
    kind: ClassVar[str]

    def sample(self, rng: np.random.Generator) -> float:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    def expect(self, fn: Callable[[float], float], epsabs: float = 1e-12, epsrel: float = 1e-10) -> float:
        """E[fn(Y)] under this law, by adaptive quadrature (exact for point masses)."""
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


def _quad(fn, lo, hi, epsabs, epsrel, weight=1.0):
    val, _ = integrate.quad(lambda y: fn(y) * weight, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200)
    return val


@dataclass(frozen=True)
class UniformAttractiveness(AttractivenessSpec):
    lo: float
    hi: float
    kind: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not (0 <= self.lo < self.hi < math.inf):
            raise InvalidArgument(f"uniform attractiveness needs 0 <= lo < hi, got [{self.lo}, {self.hi}]")

    def sample(self, rng):
        return float(rng.uniform(self.lo, self.hi))

    @property
    def mean(self):
        return (self.lo + self.hi) / 2

    def expect(self, fn, epsabs=1e-12, epsrel=1e-10):
        return _quad(fn, self.lo, self.hi, epsabs, epsrel, 1.0 / (self.hi - self.lo))

    def to_dict(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class ExponentialAttractiveness(AttractivenessSpec):
    rate: float
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        if not 0 < self.rate < math.inf:
            raise InvalidArgument(f"exponential rate must be positive, got {self.rate}")

    def sample(self, rng):
        return float(rng.exponential(1.0 / self.rate))

    @property
    def mean(self):
        return 1.0 / self.rate

    def expect(self, fn, epsabs=1e-12, epsrel=1e-10):
        r = self.rate
        val, _ = integrate.quad(lambda y: fn(y) * r * math.exp(-r * y), 0, math.inf,
                                epsabs=epsabs, epsrel=epsrel, limit=200)
        return val

    def to_dict(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class ConstantAttractiveness(AttractivenessSpec):
    y: float
    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        if not 0 <= self.y < math.inf:
            raise InvalidArgument(f"constant attractiveness must be >= 0, got {self.y}")

    def sample(self, rng):
        return float(self.y)

    @property
    def mean(self):
        return float(self.y)

    def expect(self, fn, epsabs=1e-12, epsrel=1e-10):
        return float(fn(self.y))

    def to_dict(self):
        return {"kind": self.kind, "y": self.y}


@dataclass(frozen=True)
class TablePdf(AttractivenessSpec):
    """Piecewise-constant density: ``weights[i]`` is the mass on ``[edges[i], edges[i+1])``."""

    edges: tuple[float, ...]
    weights: tuple[float, ...]
    kind: ClassVar[str] = "table"

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(float(e) for e in self.edges))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        e, w = self.edges, self.weights
        if len(e) < 2 or len(w) != len(e) - 1:
            raise InvalidArgument("table pdf needs len(weights) == len(edges) - 1 >= 1")
        if e[0] < 0:
            raise InvalidArgument("attractiveness support must be nonnegative")
        if any(b <= a for a, b in zip(e, e[1:])):
            raise InvalidArgument("table pdf edges must be strictly increasing")
        if any(x < 0 for x in w) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise InvalidArgument("table pdf bin masses must be nonnegative and sum to 1")

    def sample(self, rng):
        i = int(rng.choice(len(self.weights), p=self.weights))
        return float(rng.uniform(self.edges[i], self.edges[i + 1]))

    @property
    def mean(self):
        return math.fsum(w * (a + b) / 2 for w, a, b in zip(self.weights, self.edges, self.edges[1:]))

    def expect(self, fn, epsabs=1e-12, epsrel=1e-10):
        return math.fsum(
            _quad(fn, a, b, epsabs, epsrel, w / (b - a))
            for w, a, b in zip(self.weights, self.edges, self.edges[1:])
            if w > 0
        )

    def to_dict(self):
        return {"kind": self.kind, "edges": list(self.edges), "weights": list(self.weights)}


def sample_attractiveness(spec: AttractivenessSpec, rng: np.random.Generator) -> float:
    return spec.sample(rng)


def mean_attractiveness(spec: AttractivenessSpec) -> float:
    return spec.mean


_BATCH_KINDS = {
    "uniform_int": lambda d: DiscreteUniform(int(d["lo"]), int(d["hi"])),
    "constant": lambda d: ConstantBatch(int(d["n"])),
    "table": lambda d: TablePmf(tuple(int(v) for v in d["values"]), tuple(d["probs"])),
}
_ATTR_KINDS = {
    "uniform": lambda d: UniformAttractiveness(float(d["lo"]), float(d["hi"])),
    "exponential": lambda d: ExponentialAttractiveness(float(d["rate"])),
    "constant": lambda d: ConstantAttractiveness(float(d["y"])),
    "table": lambda d: TablePdf(tuple(d["edges"]), tuple(d["weights"])),
}


def _from_record(table, what, record):
    if isinstance(record, (BatchSizeSpec, AttractivenessSpec)):
        return record
    try:
        build = table[record["kind"]]
    except (KeyError, TypeError):
        raise InvalidArgument(f"{what} needs a 'kind' in {sorted(table)}, got {record!r}") from None
    try:
        return build(record)
    except KeyError as exc:
        raise InvalidArgument(f"{what} of kind {record['kind']!r} is missing field {exc}") from None


def batch_spec_from_dict(record) -> BatchSizeSpec:
    return _from_record(_BATCH_KINDS, "batch", record)


def attractiveness_spec_from_dict(record) -> AttractivenessSpec:
    return _from_record(_ATTR_KINDS, "attractiveness", record)


# ---------------------------------------------------------------------------
# arrivals


@dataclass
class ArrivalClock:
    """Poisson process of batch arrivals with intensity ``lam``."""

    lam: float
    current_time: float = 0.0
    batch_counter: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidArgument(f"arrival intensity must be positive, got {self.lam}")

    def next_arrival(self, rng: np.random.Generator) -> float:
        gap = max(float(rng.exponential(1.0 / self.lam)), MIN_GAP)
        self.current_time += gap
        self.batch_counter += 1
        return self.current_time


def next_arrival(clock: ArrivalClock, rng: np.random.Generator) -> float:
    return clock.next_arrival(rng)
