"""Total-variation distances between single-target frequency vectors on a frozen graph.

Two independent empirical vectors over n cells differ by roughly
sum(sqrt(p)) / sqrt(pi * N) in TV even when drawn from the same law, so
exact-vs-exact sets the floor against which exact-vs-bucketed is read.
"""
import argparse
import math

import numpy as np

from hypergrowth.attachment import AgeBucketed, ExactScan, exact_weights
from hypergrowth.engine import ModelParams, Simulation, TargetNodeCount


def tv(p, q):
    return 0.5 * float(np.abs(p - q).sum())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=1000)
    ap.add_argument("--draws", type=int, nargs="+", default=[10**5, 10**6, 10**7])
    ap.add_argument("--alpha", type=float, default=0.5)
    args = ap.parse_args()
    sim = Simulation(ModelParams(stop=TargetNodeCount(args.nodes))).run()
    g, now = sim.graph, sim.clock.current_time + 0.5
    p = exact_weights(g, now, args.alpha)
    p /= p.sum()
    root = float(np.sqrt(p).sum())
    print(f"{g.n_nodes} nodes, sum sqrt(p) = {root:.1f}")
    print("draws      predicted  exact-exact  exact-bucketed  bucketed-truth")
    for n in args.draws:
        freq = [np.bincount(s.draw_single(g, now, args.alpha, np.random.default_rng(i), n), minlength=g.n_nodes) / n
                for i, s in enumerate((ExactScan(), ExactScan(), AgeBucketed()))]
        print(f"{n:<10} {root / math.sqrt(math.pi * n):>9.4f} {tv(freq[0], freq[1]):>12.4f} "
              f"{tv(freq[0], freq[2]):>15.4f} {tv(freq[2], p):>15.4f}")


if __name__ == "__main__":
    main()
