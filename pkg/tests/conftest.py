import io

import numpy as np
import pytest

from divtim.graph import DiffusionGraph, load_graph
from divtim.profiles import MISSING, ProfileSet, Schema


def make_graph(edges, mode="explicit", t=None) -> DiffusionGraph:
    """Build a graph from (src, dst[, prob]) tuples; labels are str(node)."""
    lines = []
    for e in edges:
        if mode == "explicit" or mode == "interaction":
            lines.append(f"{e[0]} {e[1]} {e[2]}")
        else:
            lines.append(f"{e[0]} {e[1]}")
    g = load_graph(io.StringIO("\n".join(lines) + "\n"), mode)
    if t is not None:
        scores = np.ones(g.node_count)
        for label, val in t.items():
            scores[g.label_ids[str(label)]] = val
        g = g.with_target_scores(scores)
    return g


def make_profiles(rows, domain_sizes=None) -> ProfileSet:
    """Profiles from integer rows; None marks a missing value.

    Domains are 0..max observed (or explicit sizes), stringified.
    """
    m = len(rows[0])
    cols = list(zip(*rows))
    if domain_sizes is None:
        domain_sizes = [max((x for x in col if x is not None), default=-1) + 1
                        for col in cols]
        domain_sizes = [max(d, 1) for d in domain_sizes]
    schema = Schema(attributes=[f"A{j + 1}" for j in range(m)],
                    domains=[[str(i) for i in range(d)] for d in domain_sizes])
    codes = np.full((len(rows), m), MISSING, dtype=np.int32)
    for i, row in enumerate(rows):
        for j, val in enumerate(row):
            if val is not None:
                codes[i, j] = val
    return ProfileSet(schema=schema, codes=codes)


def random_profiles(rng, n, m, domain_size, missing_prob=0.0) -> ProfileSet:
    rows = []
    for _ in range(n):
        row = []
        for _ in range(m):
            if missing_prob and rng.random() < missing_prob:
                row.append(None)
            else:
                row.append(int(rng.integers(0, domain_size)))
        rows.append(tuple(row))
    return make_profiles(rows, [domain_size] * m)


def random_digraph(rng, n, edge_prob=0.3, prob_range=(0.1, 0.9)) -> DiffusionGraph:
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < edge_prob:
                p = float(rng.uniform(*prob_range))
                edges.append((u, v, p))
    if not edges:
        edges = [(0, 1, 0.5)]
    lines = [f"{u} {v} {p}" for u, v, p in edges]
    # mention every node so isolated ones keep dense ids: anchor via extra edges
    g = load_graph(io.StringIO("\n".join(lines) + "\n"), "explicit")
    return g


@pytest.fixture
def chain3():
    # a -> b -> c with certain edges
    return make_graph([("a", "b", 1.0), ("b", "c", 1.0)])


@pytest.fixture
def two_node_half():
    # u -> v with probability 0.5; v is the only meaningful target
    return make_graph([("u", "v", 0.5)], t={"u": 0.1, "v": 1.0})
