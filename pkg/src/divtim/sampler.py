"""Reverse reachable set sampling with target-score-weighted roots.

A corpus of reverse reachable sets is the sampling backbone: the chance
that a seed set intersects a random set equals the chance that the set's
root gets activated by those seeds.  Roots are drawn from the target set
with probability proportional to their target score, so coverage of the
corpus directly estimates the captured fraction of total target score.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .errors import ConfigError, FormatError
from .graph import DiffusionGraph, TargetSet
from .rng import stream

MODELS = ("ic", "lt")

#: phase tag for corpus streams (estimation phases use their own tags)
CORPUS_PHASE = 0


def check_model(graph: DiffusionGraph, model: str) -> None:
    if model not in MODELS:
        raise ConfigError(f"unknown diffusion model {model!r}")
    if model == "lt" and graph.max_in_prob_sum() > 1.0 + 1e-9:
        raise ConfigError("lt model requires incoming probabilities to sum to <= 1 per node")


def sample_root(targets: TargetSet, rng: np.random.Generator) -> int:
    """Draw a target node with probability t(v) / total target score."""
    if len(targets) == 0:
        raise ConfigError("cannot sample a root from an empty target set")
    r = rng.random() * targets.total_score
    i = int(np.searchsorted(targets.cum_scores, r, side="right"))
    return int(targets.members[min(i, len(targets) - 1)])


def _reverse_reach_ic(graph: DiffusionGraph, root: int, rng: np.random.Generator) -> list[int]:
    indptr, indices, probs = graph.in_indptr, graph.in_indices, graph.in_probs
    visited = np.zeros(graph.node_count, dtype=bool)
    visited[root] = True
    members = [root]
    frontier = [root]
    while frontier:
        x = frontier.pop()
        lo, hi = indptr[x], indptr[x + 1]
        if lo == hi:
            continue
        live = indices[lo:hi][rng.random(hi - lo) < probs[lo:hi]]
        for u in live:
            if not visited[u]:
                visited[u] = True
                u = int(u)
                members.append(u)
                frontier.append(u)
    return members


def _reverse_reach_lt(graph: DiffusionGraph, root: int, rng: np.random.Generator) -> list[int]:
    indptr, indices, cum = graph.in_indptr, graph.in_indices, graph.in_cum
    visited = np.zeros(graph.node_count, dtype=bool)
    visited[root] = True
    members = [root]
    frontier = [root]
    while frontier:
        x = frontier.pop()
        lo, hi = indptr[x], indptr[x + 1]
        if lo == hi:
            continue
        if cum[hi - 1] > 1.0 + 1e-9:
            raise ConfigError(f"node {x}: incoming probabilities sum beyond 1")
        r = rng.random()
        j = int(np.searchsorted(cum[lo:hi], r, side="right"))
        if j < hi - lo:  # otherwise x picks no trigger
            u = int(indices[lo + j])
            if not visited[u]:
                visited[u] = True
                members.append(u)
                frontier.append(u)
    return members


@dataclass
class RRSet:
    """One reverse reachable set: every member can reach ``root`` via live edges."""

    id: int
    root: int
    members: np.ndarray

    def __post_init__(self):
        self.members = np.asarray(self.members, dtype=np.int64)


def generate_rr_set(graph: DiffusionGraph, targets: TargetSet, model: str,
                    set_id: int, rng: np.random.Generator) -> RRSet:
    """Sample one root and collect the nodes that reach it under a live-edge draw."""
    root = sample_root(targets, rng)
    if model == "ic":
        members = _reverse_reach_ic(graph, root, rng)
    elif model == "lt":
        members = _reverse_reach_lt(graph, root, rng)
    else:
        raise ConfigError(f"unknown diffusion model {model!r}")
    return RRSet(id=set_id, root=root, members=np.asarray(members, dtype=np.int64))


class RRCorpus:
    """A fixed collection of reverse reachable sets plus its inverted index.

    ``node_index[v]`` lists the ids of sets containing v (ascending);
    ``root_scores[i]`` is the target score of set i's root.  The total
    member count is kept for memory/width accounting.
    """

    def __init__(self, sets: list[RRSet], node_count: int, t: np.ndarray,
                 target_total: float):
        self.sets = sets
        self.n_nodes = node_count
        self.target_total = float(target_total)
        self.root_scores = np.asarray([t[s.root] for s in sets], dtype=np.float64)
        self.total_root_score = float(self.root_scores.sum())
        self.total_width = int(sum(len(s.members) for s in sets))
        index: list[list[int]] = [[] for _ in range(node_count)]
        for s in sets:
            for v in s.members:
                index[v].append(s.id)
        self.node_index = index

    @property
    def theta(self) -> int:
        return len(self.sets)

    def covered_mask(self, seed_set) -> np.ndarray:
        mask = np.zeros(self.theta, dtype=bool)
        for v in seed_set:
            mask[self.node_index[v]] = True
        return mask

    def coverage_fraction(self, seed_set) -> float:
        """Plain fraction of sets intersected by the seed set."""
        return float(self.covered_mask(seed_set).sum()) / self.theta

    def covered_root_score(self, seed_set) -> float:
        """Sum of root target scores over the sets the seed set intersects."""
        return float(self.root_scores[self.covered_mask(seed_set)].sum())

    def dump(self, sink: str | TextIO) -> None:
        """Debug dump, one line per set: ``id root member*`` (format unstable)."""
        if isinstance(sink, str):
            with open(sink, "w", encoding="utf-8") as fh:
                self.dump(fh)
                return
        for s in self.sets:
            sink.write(f"{s.id} {s.root} " + " ".join(str(int(v)) for v in s.members) + "\n")


def load_corpus_dump(source: str | TextIO, node_count: int, t: np.ndarray,
                     target_total: float) -> RRCorpus:
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return load_corpus_dump(fh, node_count, t, target_total)
    sets = []
    for raw in source:
        parts = raw.split()
        if not parts:
            continue
        if len(parts) < 3:
            raise FormatError("corpus dump line needs 'id root member*'")
        sets.append(RRSet(id=int(parts[0]), root=int(parts[1]),
                          members=np.asarray([int(p) for p in parts[2:]], dtype=np.int64)))
    return RRCorpus(sets, node_count, t, target_total)


def generate_corpus(graph: DiffusionGraph, targets: TargetSet, model: str,
                    theta: int, master_seed: int, workers: int = 1,
                    phase: int = CORPUS_PHASE) -> RRCorpus:
    """Generate theta reverse reachable sets, reproducibly.

    Set i draws from a stream keyed by (master seed, phase, i), so the
    corpus is identical for any worker count.
    """
    if theta < 1:
        raise ConfigError("theta must be at least 1")
    check_model(graph, model)

    from .rng import phase_seed
    base = phase_seed(master_seed, phase)

    def one(i: int) -> RRSet:
        return generate_rr_set(graph, targets, model, i, stream(base, i))

    if workers <= 1:
        sets = [one(i) for i in range(theta)]
    else:
        chunks = [range(w, theta, workers) for w in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda ids: [one(i) for i in ids], chunks)
        sets = [None] * theta
        for part in parts:
            for s in part:
                sets[s.id] = s
    return RRCorpus(sets, graph.node_count, graph.t, targets.total_score)
