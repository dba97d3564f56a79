#!/usr/bin/env python3
"""Generate a synthetic dataset (edge list, node weights, profiles) for the CLI.

Example:
    python scripts/make_dataset.py --nodes 1000 --arcs 4 --seed 7 --out data/
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from divtim.graph import save_graph, synth_graph
from divtim.profiles import save_profiles, synth_profiles


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=1000)
    ap.add_argument("--arcs", type=int, default=4, help="arcs drawn into each node")
    ap.add_argument("--m", type=int, default=10, help="number of attributes")
    ap.add_argument("--domain-size", type=int, default=10)
    ap.add_argument("--distribution", choices=("uniform", "exponential"),
                    default="exponential")
    ap.add_argument("--score-mode", choices=("uniform", "ones"), default="uniform")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True, help="output directory")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    g = synth_graph(args.nodes, args.arcs, seed=args.seed, score_mode=args.score_mode)
    save_graph(g, os.path.join(args.out, "edges.txt"),
               os.path.join(args.out, "node_weights.txt"))
    ps = synth_profiles(args.nodes, m=args.m, domain_sizes=args.domain_size,
                        distribution=args.distribution, seed=args.seed)
    save_profiles(ps, os.path.join(args.out, "profiles.csv"))
    print(f"wrote edges.txt ({g.edge_count} edges), node_weights.txt, "
          f"profiles.csv ({args.nodes} x {args.m}) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
