"""Tail exponent and tail shape across aging exponents.

    python scripts/aging_sweep.py [--nodes 50000] [--alphas 0 0.1 0.5 0.9 1.0]
"""
import argparse
import csv
from pathlib import Path

from hypergrowth.cli import cmd_sweep_alpha
from hypergrowth.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.0, 0.1, 0.5, 0.9, 1.0])
    ap.add_argument("--out", type=Path, default=Path("runs/sweep"))
    args = ap.parse_args()
    cfg = load_config(Path(__file__).parent.parent / "configs" / "sweep.toml",
                      {"nodes": args.nodes, "alphas": args.alphas})
    bundle = cmd_sweep_alpha(cfg, args.out)
    with open(bundle.out / "tail_fits.csv") as fh:
        for row in csv.DictReader(fh):
            if row["status"] != "ok":
                print(f"alpha={row['alpha']:>4}  {row['status']}")
                continue
            print(f"alpha={row['alpha']:>4}  pdf exponent {float(row['pdf_exponent']):.3f}  "
                  f"R2 power {float(row['power_r2']):.4f}  exp {float(row['exp_r2']):.4f}  -> {row['preferred']}")


if __name__ == "__main__":
    main()
