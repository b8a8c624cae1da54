"""Run configuration: flat TOML keys with inline tables for the distributions.

Example::

    nodes = 50000
    alpha = 0.5
    batch = {kind = "uniform_int", lo = 1, hi = 5}
    attractiveness = {kind = "uniform", lo = 0.0, hi = 1.0}
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import MaxTime, ModelParams, TargetNodeCount
from .errors import InvalidArgument
from .stochastic import attractiveness_spec_from_dict, batch_spec_from_dict


@dataclass
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    out: str = "runs/default"
    replicas: int = 1
    snapshot_every_batches: int = 0
    export_edges: bool = True
    export_bipartite: bool = False
    export_events: bool = False
    alphas: tuple[float, ...] = (0.1, 0.5, 0.9)
    logbin_ratio: float = 1.25
    ks_threshold: float = 0.05

    def validate(self) -> "RunConfig":
        self.params.validate()
        if not isinstance(self.replicas, int) or self.replicas < 1:
            raise InvalidArgument("replicas must be a positive integer")
        if self.snapshot_every_batches < 0:
            raise InvalidArgument("snapshot_every_batches must be nonnegative")
        if not self.alphas or any(a < 0 for a in self.alphas):
            raise InvalidArgument("alphas must be a nonempty list of nonnegative values")
        if not self.logbin_ratio > 1:
            raise InvalidArgument("logbin_ratio must exceed 1")
        return self

    def to_dict(self) -> dict[str, Any]:
        p = self.params
        d: dict[str, Any] = {
            "lam": p.lam, "m": p.m, "m2": p.m2, "m0": p.m0, "alpha": p.alpha,
            "batch": p.batch.to_dict(), "attractiveness": p.attractiveness.to_dict(),
            "seed": p.seed, "sampler": p.sampler, "bucket_ratio": p.bucket_ratio,
            "per_node_attractiveness": p.per_node_attractiveness,
            "disjoint_batch_targets": p.disjoint_batch_targets,
            "replicas": self.replicas, "snapshot_every_batches": self.snapshot_every_batches,
            "export_edges": self.export_edges, "export_bipartite": self.export_bipartite,
            "export_events": self.export_events, "alphas": list(self.alphas),
            "logbin_ratio": self.logbin_ratio, "ks_threshold": self.ks_threshold,
        }
        if isinstance(p.stop, TargetNodeCount):
            d["nodes"] = p.stop.n
        else:
            d["max_time"] = p.stop.t
        return d

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_alpha(self, alpha: float) -> "RunConfig":
        return dataclasses.replace(self, params=dataclasses.replace(self.params, alpha=alpha))


_PARAM_KEYS = {
    "lam": float, "m": int, "m2": int, "m0": int, "alpha": float, "seed": int,
    "sampler": str, "bucket_ratio": float, "per_node_attractiveness": bool,
    "disjoint_batch_targets": bool,
}
_RUN_KEYS = {
    "replicas": int, "snapshot_every_batches": int, "export_edges": bool,
    "export_bipartite": bool, "export_events": bool, "logbin_ratio": float,
    "ks_threshold": float, "out": str,
}
KNOWN_KEYS = set(_PARAM_KEYS) | set(_RUN_KEYS) | {"batch", "attractiveness", "nodes", "max_time", "alphas"}


def _coerce(key, typ, value):
    if typ is bool:
        if not isinstance(value, bool):
            raise InvalidArgument(f"{key} must be true or false")
        return value
    if typ is int and (isinstance(value, bool) or (isinstance(value, float) and not value.is_integer())):
        raise InvalidArgument(f"{key} must be an integer, got {value!r}")
    try:
        return typ(value)
    except (TypeError, ValueError):
        raise InvalidArgument(f"{key}: cannot interpret {value!r} as {typ.__name__}") from None


def config_from_mapping(data: dict[str, Any], base: RunConfig | None = None) -> RunConfig:
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise InvalidArgument(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "nodes" in data and "max_time" in data:
        raise InvalidArgument("give either nodes or max_time, not both")
    cfg = base or RunConfig()
    p = cfg.params
    pkw = {k: _coerce(k, t, data[k]) for k, t in _PARAM_KEYS.items() if k in data}
    if "batch" in data:
        pkw["batch"] = batch_spec_from_dict(data["batch"])
    if "attractiveness" in data:
        pkw["attractiveness"] = attractiveness_spec_from_dict(data["attractiveness"])
    if "nodes" in data:
        pkw["stop"] = TargetNodeCount(_coerce("nodes", int, data["nodes"]))
    if "max_time" in data:
        pkw["stop"] = MaxTime(_coerce("max_time", float, data["max_time"]))
    rkw = {k: _coerce(k, t, data[k]) for k, t in _RUN_KEYS.items() if k in data}
    if "alphas" in data:
        alphas = data["alphas"]
        if isinstance(alphas, (int, float)):
            alphas = [alphas]
        rkw["alphas"] = tuple(_coerce("alphas", float, a) for a in alphas)
    params = dataclasses.replace(p, **pkw)
    return dataclasses.replace(cfg, params=params, **rkw).validate()


def load_config(path: str | Path | None, overrides: dict[str, Any] | None = None) -> RunConfig:
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidArgument(f"{path}: {exc}") from None
        except OSError as exc:
            raise InvalidArgument(f"cannot read config {path}: {exc}") from None
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_mapping(data)
