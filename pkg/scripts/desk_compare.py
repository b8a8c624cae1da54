"""Simulate the headline configuration and compare it with the mean-field law.

    python scripts/desk_compare.py [--nodes 50000] [--replicas 3] [--out runs/desk]
"""
import argparse
import json
import sys
from pathlib import Path

from hypergrowth.cli import cmd_compare
from hypergrowth.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--replicas", type=int, default=3)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", type=Path, default=Path("runs/desk"))
    args = ap.parse_args()
    cfg = load_config(Path(__file__).parent.parent / "configs" / "desk.toml",
                      {"nodes": args.nodes, "replicas": args.replicas, "seed": args.seed})
    bundle = cmd_compare(cfg, args.out)
    json.dump(bundle.summary, sys.stdout, indent=2, sort_keys=True)
    print(f"\nplot with: python {args.out / 'plot_compare.py'}")


if __name__ == "__main__":
    main()
