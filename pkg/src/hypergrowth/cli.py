"""Command-line front end: simulate, theory, compare, sweep-alpha."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    THEORY_ALPHA,
    EmpiricalDistribution,
    TheoryParams,
    binned_theory_pdf,
    empirical_distribution,
    fit_tail,
    ks_distance,
    mixture_ccdf,
    printed_form_residual,
    solve_theta,
    theoretical_pk,
)
from .config import RunConfig, load_config
from .engine import Simulation
from .errors import HypergrowthError, InvalidArgument

log = logging.getLogger("hypergrowth")


@dataclass
class ReportBundle:
    out: Path
    command: str
    config: RunConfig
    files: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def path(self, name: str) -> Path:
        p = self.out / name
        p.parent.mkdir(parents=True, exist_ok=True)
        if name not in self.files:
            self.files.append(name)
        return p

    def write_manifest(self) -> Path:
        digests = {}
        for name in sorted(self.files):
            digests[name] = hashlib.sha256((self.out / name).read_bytes()).hexdigest()
        manifest = {
            "command": self.command,
            "version": version_string(),
            "seed": self.config.params.seed,
            "config_hash": self.config.hash(),
            "config": self.config.to_dict(),
            "files": digests,
            "summary": self.summary,
        }
        p = self.out / "manifest.json"
        p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return p


def version_string() -> str:
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--tags"], cwd=Path(__file__).parent,
            capture_output=True, text=True, timeout=5,
        )
        if desc.returncode == 0 and desc.stdout.strip():
            return f"{__version__}+g{desc.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# building blocks


def _simulate_into(bundle: ReportBundle, cfg: RunConfig, prefix: str = "") -> np.ndarray:
    """Run all replicas, write per-replica exports, return pooled hyperdegrees."""
    pooled = []
    rows = []
    for r in range(cfg.replicas):
        t0 = time.perf_counter()
        sink = open(bundle.path(f"{prefix}events_r{r}.csv"), "w", newline="") if cfg.export_events else None
        try:
            sim = Simulation(cfg.params, replica=r, event_sink=sink, keep_events=False,
                             snapshot_every=cfg.snapshot_every_batches)
            try:
                sim.run()
            except HypergrowthError as exc:
                raise type(exc)(f"replica {r}, batch {sim.clock.batch_counter}: {exc}") from exc
        finally:
            if sink is not None:
                sink.close()
        g = sim.graph
        log.info("replica %d: %d nodes, %d hyperedges, %d batches (%.1f s)",
                 r, g.n_nodes, g.n_edges, sim.clock.batch_counter, time.perf_counter() - t0)
        if cfg.export_edges:
            with open(bundle.path(f"{prefix}edges_r{r}.tsv"), "w") as fh:
                g.write_edges(fh)
        if cfg.export_bipartite:
            with open(bundle.path(f"{prefix}bipartite_r{r}.tsv"), "w") as fh:
                g.write_bipartite(fh)
        if sim.snapshots:
            _write_csv(bundle.path(f"{prefix}snapshots_r{r}.csv"), ("time", "nodes", "edges", "mean_k", "max_k"),
                       [(_fmt(s.time), s.n_nodes, s.n_edges, _fmt(np.mean(s.hyperdegrees)), max(s.hyperdegrees))
                        for s in sim.snapshots])
        rows.extend(
            (r, i, _fmt(t), _fmt(y), int(k))
            for i, (t, y, k) in enumerate(zip(g.arrival_times.tolist(), g.attractiveness.tolist(),
                                              g.hyperdegrees.tolist()))
        )
        pooled.append(g.hyperdegrees.copy())
    _write_csv(bundle.path(f"{prefix}hyperdegrees.csv"),
               ("replica", "node_id", "arrival_time", "attractiveness", "hyperdegree"), rows)
    return np.concatenate(pooled)


def _write_distribution(bundle: ReportBundle, emp: EmpiricalDistribution, prefix: str = "") -> None:
    _write_csv(bundle.path(f"{prefix}distribution.csv"), ("k", "count", "pdf", "ccdf"),
               [(int(k), int(c), _fmt(p), _fmt(cc)) for k, c, p, cc in zip(emp.ks, emp.counts, emp.pdf, emp.ccdf)])
    _write_csv(bundle.path(f"{prefix}logbinned.csv"), ("k_lo", "k_hi", "center", "count", "pdf"),
               [(int(lo), int(hi) - 1, _fmt(c), int(n), _fmt(v)) for lo, hi, c, n, v in
                zip(emp.bin_edges[:-1], emp.bin_edges[1:], emp.bin_centers, emp.bin_counts, emp.logbinned_pdf)])


def _theory(cfg: RunConfig) -> TheoryParams:
    p = cfg.params
    return solve_theta(p.m, p.m2, p.batch.mean, p.attractiveness.mean)


def _theory_json(tp: TheoryParams) -> dict:
    return {"theta": tp.theta, "g": tp.g, "c": tp.c, "pdf_exponent": tp.g + 1,
            "m": tp.m, "m2": tp.m2, "m1": tp.m1, "a": tp.a, "residual": tp.residual}


def _tail_fit_dict(emp: EmpiricalDistribution, m: int) -> dict:
    try:
        return fit_tail(emp, 5 * m).as_dict()
    except HypergrowthError as exc:
        return {"error": str(exc)}


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(cfg: RunConfig, out: Path) -> ReportBundle:
    bundle = ReportBundle(out, "simulate", cfg)
    k = _simulate_into(bundle, cfg)
    emp = empirical_distribution(k, cfg.logbin_ratio)
    _write_distribution(bundle, emp)
    bundle.summary = {"nodes": int(k.size), "replicas": cfg.replicas, "max_k": int(k.max())}
    bundle.write_manifest()
    return bundle


def cmd_theory(cfg: RunConfig, out: Path, printed_form: bool = False, force_g: float | None = None,
               k_max: float = 1e6, n_grid: int = 241) -> ReportBundle:
    p = cfg.params
    if p.alpha != THEORY_ALPHA:
        raise InvalidArgument(
            f"the mean-field theory is derived for aging exponent 1/2 only; alpha = {p.alpha} "
            "has no analytic hyperdegree law (use sweep-alpha for simulations)"
        )
    bundle = ReportBundle(out, "theory", cfg)
    if force_g is not None:
        tp = TheoryParams.with_exponent(p.m, force_g, p.m2, p.batch.mean, p.attractiveness.mean)
        log.warning("exponent forced to g = %s; theta is not solved", force_g)
    else:
        tp = _theory(cfg)
    info = _theory_json(tp)
    if printed_form:
        r = printed_form_residual(tp)
        info["printed_form_residual"] = r
        level = logging.WARNING if abs(r) > 1e-8 else logging.INFO
        log.log(level, "printed-form characteristic residual at theta: %.3e", r)
    ks = np.unique(np.concatenate([np.arange(p.m, p.m + 10), np.geomspace(p.m, k_max, n_grid)]))
    f = p.attractiveness
    _write_csv(bundle.path("theory.csv"), ("k", "pk_theory", "ccdf_theory"),
               [(_fmt(k), _fmt(theoretical_pk(k, tp, f)), _fmt(mixture_ccdf(k, tp, f))) for k in ks])
    bundle.path("theory.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")
    bundle.summary = info
    bundle.write_manifest()
    return bundle


PLOT_COMPARE = '''"""Log-log overlay of simulated and theoretical hyperdegree distributions."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent


def cols(name):
    with open(here / name) as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


lb = cols("logbin_compare.csv")
th = cols("theory.csv")
fig, ax = plt.subplots(1, 2, figsize=(10, 4))
ax[0].loglog(lb["center"], lb["pdf_emp"], "+", label="simulation (log-binned)")
ax[0].loglog(th["k"], th["pk_theory"], "-", label="mean-field theory")
ax[0].set_xlabel("hyperdegree k")
ax[0].set_ylabel("P(k)")
ax[0].legend()
cmp_ = cols("compare.csv")
ax[1].loglog(cmp_["k"], cmp_["ccdf_emp"], "+", label="simulation")
ax[1].loglog(cmp_["k"], cmp_["ccdf_theory"], "-", label="theory")
ax[1].set_xlabel("hyperdegree k")
ax[1].set_ylabel("P(K >= k)")
ax[1].legend()
fig.tight_layout()
fig.savefig(here / "compare.png", dpi=150)
'''


def cmd_compare(cfg: RunConfig, out: Path) -> ReportBundle:
    p = cfg.params
    bundle = ReportBundle(out, "compare", cfg)
    k = _simulate_into(bundle, cfg)
    emp = empirical_distribution(k, cfg.logbin_ratio)
    _write_distribution(bundle, emp)
    report: dict = {"nodes_pooled": int(k.size), "replicas": cfg.replicas,
                    "tail_fit": _tail_fit_dict(emp, p.m)}
    if p.alpha != THEORY_ALPHA:
        log.warning("alpha = %s: no analytic theory exists, skipping theory overlay", p.alpha)
        report["theory"] = None
    else:
        tp = _theory(cfg)
        f = p.attractiveness
        cc_th = {int(kk): mixture_ccdf(kk, tp, f) for kk in emp.ks}
        _write_csv(bundle.path("compare.csv"), ("k", "pdf_emp", "pdf_theory", "ccdf_emp", "ccdf_theory"),
                   [(int(kk), _fmt(pe), _fmt(theoretical_pk(kk, tp, f)), _fmt(ce), _fmt(cc_th[int(kk)]))
                    for kk, pe, ce in zip(emp.ks, emp.pdf, emp.ccdf)])
        binned = binned_theory_pdf(emp, tp, f)
        _write_csv(bundle.path("logbin_compare.csv"), ("k_lo", "k_hi", "center", "count", "pdf_emp", "pdf_theory"),
                   [(int(lo), int(hi) - 1, _fmt(c), int(n), _fmt(v), _fmt(t)) for lo, hi, c, n, v, t in
                    zip(emp.bin_edges[:-1], emp.bin_edges[1:], emp.bin_centers, emp.bin_counts,
                        emp.logbinned_pdf, binned)])
        ks_grid = np.geomspace(p.m, max(10.0 * emp.ks[-1], 10.0 * p.m), 161)
        _write_csv(bundle.path("theory.csv"), ("k", "pk_theory", "ccdf_theory"),
                   [(_fmt(kk), _fmt(theoretical_pk(kk, tp, f)), _fmt(mixture_ccdf(kk, tp, f))) for kk in ks_grid])
        ks_d = ks_distance(emp, lambda kk: cc_th[kk])
        dense = emp.bin_counts >= 50
        ratios = emp.logbinned_pdf[dense] / binned[dense]
        report["theory"] = _theory_json(tp)
        report["ks_distance"] = ks_d
        report["ks_threshold"] = cfg.ks_threshold
        report["ks_pass"] = bool(ks_d < cfg.ks_threshold)
        report["logbin_ratio_range"] = [float(ratios.min()), float(ratios.max())] if ratios.size else None
        report["logbin_within_factor_2"] = bool(np.all((ratios <= 2) & (ratios >= 0.5)))
        bundle.path("plot_compare.py").write_text(PLOT_COMPARE)
    bundle.path("fit.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    bundle.summary = {k_: v for k_, v in report.items() if k_ != "theory"}
    bundle.write_manifest()
    return bundle


PLOT_SWEEP = '''"""CCDF overlay across aging exponents."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
fig, ax = plt.subplots(figsize=(6, 4.5))
with open(here / "tail_fits.csv") as fh:
    fits = list(csv.DictReader(fh))
for row in fits:
    if row["status"] != "ok":
        continue
    with open(here / row["distribution"]) as fh:
        d = list(csv.DictReader(fh))
    ax.loglog([float(r["k"]) for r in d], [float(r["ccdf"]) for r in d], ".", ms=3,
              label=f"alpha = {row['alpha']}")
ax.set_xlabel("hyperdegree k")
ax.set_ylabel("P(K >= k)")
ax.legend()
fig.tight_layout()
fig.savefig(here / "sweep.png", dpi=150)
'''

SWEEP_HEADER = ("alpha", "status", "distribution", "k_lo", "k_hi", "power_slope", "power_r2",
                "pdf_exponent", "exp_rate", "exp_r2", "preferred")


def cmd_sweep_alpha(cfg: RunConfig, out: Path) -> ReportBundle:
    bundle = ReportBundle(out, "sweep-alpha", cfg)
    rows = []
    for alpha in cfg.alphas:
        sub = cfg.with_alpha(alpha)
        prefix = f"alpha_{alpha:g}/"
        try:
            k = _simulate_into(bundle, sub, prefix)
            emp = empirical_distribution(k, cfg.logbin_ratio)
            _write_distribution(bundle, emp, prefix)
            fit = fit_tail(emp, 5 * cfg.params.m)
        except HypergrowthError as exc:
            log.error("alpha = %s failed: %s", alpha, exc)
            rows.append((_fmt(alpha), f"error: {exc}", "", "", "", "", "", "", "", "", ""))
            continue
        d = fit.as_dict()
        rows.append((_fmt(alpha), "ok", f"{prefix}distribution.csv", d["k_lo"], d["k_hi"],
                     _fmt(d["power_slope"]), _fmt(d["power_r2"]), _fmt(d["pdf_exponent"]),
                     _fmt(d["exp_rate"]), _fmt(d["exp_r2"]), d["preferred"]))
    _write_csv(bundle.path("tail_fits.csv"), SWEEP_HEADER, rows)
    bundle.path("plot_sweep.py").write_text(PLOT_SWEEP)
    bundle.summary = {"alphas": list(cfg.alphas), "failed": sum(1 for r in rows if r[1] != "ok")}
    bundle.write_manifest()
    return bundle


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML run configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--nodes", type=int, help="stop once the network has at least this many nodes")
    p.add_argument("--alpha", type=float, help="aging exponent")
    p.add_argument("--out", type=Path, help="output directory (default runs/<command>)")
    p.add_argument("--sampler", choices=("exact", "bucketed"))
    p.add_argument("--replicas", type=int)
    p.add_argument("--m", type=int, dest="m")
    p.add_argument("--m2", type=int, dest="m2")
    p.add_argument("--m0", type=int, dest="m0")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("-q", "--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypergrowth", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "grow networks and write hyperdegree data"),
        ("theory", "solve the characteristic equation and tabulate the stationary law"),
        ("compare", "simulate and compare against the mean-field law"),
        ("sweep-alpha", "simulate over a list of aging exponents and fit tails"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "theory":
            p.add_argument("--paper-form", action="store_true",
                           help="also report the residual of the printed characteristic equation")
            p.add_argument("--force-g", type=float, help="debug: pin the exponent g instead of solving")
        if name == "sweep-alpha":
            p.add_argument("--alphas", type=float, nargs="+")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s", stream=sys.stderr,
    )
    overrides = {"seed": args.seed, "nodes": args.nodes, "alpha": args.alpha, "sampler": args.sampler,
                 "replicas": args.replicas, "m": args.m, "m2": args.m2, "m0": args.m0}
    if getattr(args, "alphas", None):
        overrides["alphas"] = args.alphas
    try:
        cfg = load_config(args.config, overrides)
        out = args.out or Path(cfg.out if args.config else f"runs/{args.command}")
        if args.command == "simulate":
            bundle = cmd_simulate(cfg, out)
        elif args.command == "theory":
            bundle = cmd_theory(cfg, out, printed_form=args.paper_form, force_g=args.force_g)
        elif args.command == "compare":
            bundle = cmd_compare(cfg, out)
        else:
            bundle = cmd_sweep_alpha(cfg, out)
    except HypergrowthError as exc:
        print(f"hypergrowth {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    print(json.dumps(bundle.summary, sort_keys=True))
    print(f"wrote {len(bundle.files) + 1} files to {bundle.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
