"""Monotone submodular diversity functions over categorical profiles.

All functions share one stateful contract: ``value()`` is the diversity
of the committed set, ``gain(v)`` is the marginal value of adding ``v``,
and ``commit(v)`` applies the addition.  Gains are computed
incrementally, never by re-evaluating the whole set, and are clipped at
zero to absorb negative floating-point dust.

The module also ships reference evaluators for aggregate pairwise
distance scores (mismatch counts, Hamming sums, Jaccard sums).  Those
scores look like plausible diversity measures but violate monotonicity
or submodularity; they exist only so tests can pin down the violations.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Sequence, TextIO

import numpy as np

from .errors import ConfigError, FormatError, UsageError
from .graph import DiffusionGraph
from .profiles import MISSING, ProfileSet


def _h(mass: float) -> float:
    """Entropy contribution -m*log2(m), with h(0) = 0."""
    return -mass * math.log2(mass) if mass > 0.0 else 0.0


class DiversityFunction:
    """Base contract: value / gain / commit / reset over node ids."""

    name = "abstract"

    def __init__(self):
        self._committed: set[int] = set()

    @property
    def committed(self) -> frozenset[int]:
        return frozenset(self._committed)

    def value(self) -> float:
        raise NotImplementedError

    def gain(self, v: int) -> float:
        if v in self._committed:
            raise UsageError(f"node {v} already committed")
        return max(0.0, float(self._gain(v)))

    def commit(self, v: int) -> float:
        if v in self._committed:
            raise UsageError(f"node {v} already committed")
        g = max(0.0, float(self._gain(v)))
        self._apply(v)
        self._committed.add(v)
        return g

    def reset(self) -> None:
        self._committed.clear()
        self._reset()

    def max_value_for_budget(self, k: int) -> float | None:
        """Theoretical maximum for a size-k set, when one is known."""
        return None

    def _gain(self, v: int) -> float:
        raise NotImplementedError

    def _apply(self, v: int) -> None:
        raise NotImplementedError

    def _reset(self) -> None:
        raise NotImplementedError


def harmonic_power_sum(count: int, lam: float) -> float:
    """sum_{i=1}^{count} i^-lam."""
    return sum(i ** -lam for i in range(1, count + 1))


def aw_theoretical_max(k: int, domain_sizes: Sequence[int],
                       weights: Sequence[float] | None = None,
                       lam: float = 1.0) -> float:
    """Maximum attribute-wise diversity achievable with budget k.

    Attained by spreading the k picks as evenly as possible over each
    attribute's values: every value is used floor(k/d) times and k mod d
    values absorb one extra pick.
    """
    if k < 1:
        raise ConfigError("budget must be at least 1")
    m = len(domain_sizes)
    w = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, dtype=np.float64)
    total = 0.0
    for j, d in enumerate(domain_sizes):
        q, r = divmod(k, d)
        total += w[j] * (d * harmonic_power_sum(q, lam) + r * (1.0 + q) ** -lam)
    return float(total)


class AttributeWiseDiversity(DiversityFunction):
    """Per-value diminishing returns: the i-th repeat of a value adds i^-lam.

    Attribute contributions are mixed by the schema weights.
    """

    name = "aw"

    def __init__(self, profiles: ProfileSet, lam: float = 1.0,
                 weights: Sequence[float] | None = None):
        super().__init__()
        if lam < 1.0:
            raise ConfigError("lambda must be >= 1")
        self.profiles = profiles
        self.lam = float(lam)
        self.weights = (np.asarray(weights, dtype=np.float64)
                        if weights is not None else profiles.schema.weights)
        self._counts = [np.zeros(d, dtype=np.int64) for d in profiles.schema.domain_sizes()]
        self._value = 0.0

    def value(self) -> float:
        return float(self._value)

    def _gain(self, v: int) -> float:
        g = 0.0
        for j, c in self.profiles.values_of(v):
            g += self.weights[j] * (self._counts[j][c] + 1.0) ** -self.lam
        return g

    def _apply(self, v: int) -> None:
        for j, c in self.profiles.values_of(v):
            self._value += self.weights[j] * (self._counts[j][c] + 1.0) ** -self.lam
            self._counts[j][c] += 1

    def _reset(self) -> None:
        for c in self._counts:
            c[:] = 0
        self._value = 0.0

    def max_value_for_budget(self, k: int) -> float:
        return aw_theoretical_max(k, self.profiles.schema.domain_sizes(),
                                  self.weights, self.lam)


def influence_range(graph: DiffusionGraph, v: int) -> np.ndarray:
    """Nodes strictly reachable from v along directed edges (v excluded).

    Edge probabilities are ignored: reachability is purely topological.
    """
    seen = np.zeros(graph.node_count, dtype=bool)
    seen[v] = True
    queue = deque([v])
    out: list[int] = []
    while queue:
        x = queue.popleft()
        for u in graph.out_neighbors(x):
            if not seen[u]:
                seen[u] = True
                out.append(int(u))
                queue.append(int(u))
    return np.asarray(sorted(out), dtype=np.int64)


class HammingBallDiversity(DiversityFunction):
    """Coverage of profile-space balls around each selected node.

    A node's ball holds the nodes it can reach whose profiles differ in
    at most ``radius`` attributes; diversity is the size of the union of
    the selected nodes' balls.  Missing values mismatch everything,
    including other missing values.  Balls are built on demand and
    cached; pass ``precompute=True`` to build them all upfront.
    """

    name = "hamming"

    def __init__(self, graph: DiffusionGraph, profiles: ProfileSet, radius: int,
                 precompute: bool = False):
        super().__init__()
        if radius < 1:
            raise ConfigError("radius must be a positive integer")
        if profiles.node_count != graph.node_count:
            raise ConfigError("profiles and graph disagree on node count")
        self.graph = graph
        self.profiles = profiles
        self.radius = int(radius)
        self._balls: dict[int, frozenset[int]] = {}
        self._covered: set[int] = set()
        if precompute:
            for v in range(graph.node_count):
                self.ball(v)

    def ball(self, v: int) -> frozenset[int]:
        cached = self._balls.get(v)
        if cached is not None:
            return cached
        reach = influence_range(self.graph, v)
        if len(reach) == 0:
            ball = frozenset()
        else:
            codes = self.profiles.codes
            mine = codes[v]
            same = (codes[reach] == mine[None, :]) & (mine[None, :] != MISSING)
            dist = self.profiles.schema.m - same.sum(axis=1)
            ball = frozenset(int(u) for u in reach[dist <= self.radius])
        self._balls[v] = ball
        return ball

    def value(self) -> float:
        return float(len(self._covered))

    def _gain(self, v: int) -> float:
        ball = self.ball(v)
        return float(len(ball) - len(ball & self._covered))

    def _apply(self, v: int) -> None:
        self._covered |= self.ball(v)

    def _reset(self) -> None:
        self._covered.clear()

    def max_value_for_budget(self, k: int) -> float:
        return float(self.graph.node_count)


class EntropyDiversity(DiversityFunction):
    """Joint entropy of the selected nodes' value-membership indicators.

    The sample space is the set of attribute values weighted by their
    relative frequency across the whole profile set.  Each committed node
    contributes a binary variable ("is the sampled value in my profile?");
    the joint entropy equals the base-2 entropy of the partition that the
    committed profiles induce on the sample space, so commits refine a
    partition instead of enumerating 0/1 tuples.
    """

    name = "entropy"

    def __init__(self, profiles: ProfileSet):
        super().__init__()
        self.profiles = profiles
        total = profiles.total_value_occurrences()
        self._prior: dict[tuple[int, int], float] = {}
        for j, counts in enumerate(profiles.value_counts):
            for c in np.flatnonzero(counts):
                self._prior[(j, int(c))] = float(counts[c]) / total
        self._reset()

    def _reset(self) -> None:
        if self._prior:
            self._group_of = {val: 0 for val in self._prior}
            self._mass = {0: 1.0}
            self._size = {0: len(self._prior)}
            self._next_gid = 1
        else:
            self._group_of, self._mass, self._size = {}, {}, {}
            self._next_gid = 0

    def value(self) -> float:
        return float(sum(_h(m) for m in self._mass.values()))

    def _split_masses(self, v: int) -> dict[int, tuple[float, int]]:
        """Per affected group: (mass moving to v's side, values moving)."""
        hit: dict[int, tuple[float, int]] = {}
        for val in self.profiles.values_of(v):
            p = self._prior.get(val)
            if p is None:
                continue
            gid = self._group_of[val]
            mass, cnt = hit.get(gid, (0.0, 0))
            hit[gid] = (mass + p, cnt + 1)
        return hit

    def _gain(self, v: int) -> float:
        g = 0.0
        for gid, (m_in, cnt) in self._split_masses(v).items():
            if cnt == self._size[gid]:
                continue  # whole group moves: no refinement
            total = self._mass[gid]
            g += _h(m_in) + _h(total - m_in) - _h(total)
        return g

    def _apply(self, v: int) -> None:
        hit = self._split_masses(v)
        moved_gids: dict[int, int] = {}
        for gid, (m_in, cnt) in hit.items():
            if cnt == self._size[gid]:
                moved_gids[gid] = gid  # group lies entirely inside v's profile
                continue
            new_gid = self._next_gid
            self._next_gid += 1
            self._mass[new_gid] = m_in
            self._size[new_gid] = cnt
            self._mass[gid] -= m_in
            self._size[gid] -= cnt
            moved_gids[gid] = new_gid
        for val in self.profiles.values_of(v):
            if val in self._prior:
                old = self._group_of[val]
                self._group_of[val] = moved_gids.get(old, old)

    def max_value_for_budget(self, k: int) -> float:
        return math.log2(self.profiles.schema.total_domain_size())


class ClassDiversity(DiversityFunction):
    """Concave accumulation of selection rewards within profile classes.

    Picking from a class that already holds reward mass R adds
    log2(1 + r / (1 + R)); fresh classes therefore dominate stale ones.
    """

    name = "class"

    def __init__(self, classes: Sequence[int], rewards: Sequence[float] | None = None):
        super().__init__()
        self.classes = np.asarray(classes, dtype=np.int64)
        n = len(self.classes)
        if rewards is None:
            self.rewards = np.ones(n, dtype=np.float64)
        else:
            self.rewards = np.asarray(rewards, dtype=np.float64)
            if np.any(self.rewards <= 0):
                raise ConfigError("selection rewards must be positive")
        n_classes = int(self.classes.max()) + 1 if n and self.classes.max() >= 0 else 0
        self._acc = np.zeros(n_classes, dtype=np.float64)

    def _class_of(self, v: int) -> int:
        c = int(self.classes[v])
        if c < 0:
            raise ConfigError(f"node {v} has no class assignment")
        return c

    def value(self) -> float:
        return float(np.sum(np.log2(1.0 + self._acc[self._acc > 0])))

    def _gain(self, v: int) -> float:
        c = self._class_of(v)
        r_l = 1.0 + self._acc[c]
        return math.log2(1.0 + self.rewards[v] / r_l)

    def _apply(self, v: int) -> None:
        self._acc[self._class_of(v)] += self.rewards[v]

    def _reset(self) -> None:
        self._acc[:] = 0.0

    def max_value_for_budget(self, k: int) -> float:
        return float(k)


class NumericDiversity(DiversityFunction):
    """Concave coverage of numeric preference types (uniform or weighted).

    ``D(S) = sum_m log2(1 + sum_{u in S} pref[u, m] * g(u))`` with g
    either identically 1 or the node out-degree.
    """

    name = "numeric"

    def __init__(self, preferences: np.ndarray, node_gains: np.ndarray | None = None):
        super().__init__()
        self.preferences = np.asarray(preferences, dtype=np.float64)
        if self.preferences.ndim != 2:
            raise ConfigError("preference matrix must be node x type")
        n = self.preferences.shape[0]
        self.node_gains = (np.ones(n, dtype=np.float64) if node_gains is None
                           else np.asarray(node_gains, dtype=np.float64))
        self._acc = np.zeros(self.preferences.shape[1], dtype=np.float64)

    def _row(self, v: int) -> np.ndarray:
        if v >= self.preferences.shape[0]:
            raise ConfigError(f"node {v} has no preference vector")
        return self.preferences[v] * self.node_gains[v]

    def value(self) -> float:
        return float(np.sum(np.log2(1.0 + self._acc)))

    def _gain(self, v: int) -> float:
        add = self._row(v)
        return float(np.sum(np.log2(1.0 + self._acc + add) - np.log2(1.0 + self._acc)))

    def _apply(self, v: int) -> None:
        self._acc += self._row(v)

    def _reset(self) -> None:
        self._acc[:] = 0.0


def load_class_map(source: str | TextIO, node_labels: Sequence[str]
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Read ``node class [reward]`` lines into (class ids, rewards).

    Unlisted nodes get class -1 (unassigned) and reward 1; class labels
    are densified in order of first appearance.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return load_class_map(fh, node_labels)
    index = {lab: i for i, lab in enumerate(node_labels)}
    classes = np.full(len(node_labels), -1, dtype=np.int64)
    rewards = np.ones(len(node_labels), dtype=np.float64)
    class_ids: dict[str, int] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"class map line {lineno}: expected 'node class [reward]'")
        if parts[0] not in index:
            raise FormatError(f"class map line {lineno}: unknown node {parts[0]!r}")
        cid = class_ids.setdefault(parts[1], len(class_ids))
        classes[index[parts[0]]] = cid
        if len(parts) == 3:
            r = float(parts[2])
            if r <= 0:
                raise FormatError(f"class map line {lineno}: reward must be positive")
            rewards[index[parts[0]]] = r
    return classes, rewards


# ---------------------------------------------------------------------------
# Reference evaluators for unsuitable set scores (exact rational arithmetic).
# Each of these aggregates pairwise distances and fails submodularity or
# monotonicity; they are kept so tests can reproduce the failures.
# ---------------------------------------------------------------------------

Profile = Sequence[object]  # attribute values, None = missing


def mismatch_pair_score(values: Sequence[object]) -> Fraction:
    """Single-attribute score: unordered mismatching pairs over set size.

    A missing value on either side counts as a mismatch.
    """
    n = len(values)
    hits = 0
    for i in range(n):
        for j in range(i + 1, n):
            a, b = values[i], values[j]
            hits += 1 if (a is None or b is None or a != b) else 0
    return Fraction(hits, n)


def _hamming_pair(u: Profile, v: Profile) -> int:
    # Both-missing coordinates agree here; one-sided missing mismatches.
    return sum(1 for a, b in zip(u, v) if a != b)


def hamming_sum_score(profiles: Sequence[Profile]) -> Fraction:
    """Sum of profile Hamming distances over ordered pairs."""
    total = 0
    n = len(profiles)
    for i in range(n):
        for j in range(n):
            if i != j:
                total += _hamming_pair(profiles[i], profiles[j])
    return Fraction(total)


def hamming_sum_halved(profiles: Sequence[Profile]) -> Fraction:
    return hamming_sum_score(profiles) / (2 * len(profiles))


def hamming_sum_pairnorm(profiles: Sequence[Profile]) -> Fraction:
    n = len(profiles)
    return hamming_sum_score(profiles) / (n * (n - 1))


def _jaccard_pair(u: Profile, v: Profile) -> Fraction:
    matches = sum(1 for a, b in zip(u, v) if a is not None and a == b)
    lu = sum(1 for a in u if a is not None)
    lv = sum(1 for a in v if a is not None)
    union = lu + lv - matches
    if union == 0:
        return Fraction(1)
    return 1 - Fraction(matches, union)


def jaccard_sum_score(profiles: Sequence[Profile]) -> Fraction:
    """Sum of profile Jaccard distances over ordered pairs."""
    total = Fraction(0)
    n = len(profiles)
    for i in range(n):
        for j in range(n):
            if i != j:
                total += _jaccard_pair(profiles[i], profiles[j])
    return total


def jaccard_sum_halved(profiles: Sequence[Profile]) -> Fraction:
    return jaccard_sum_score(profiles) / (2 * len(profiles))


def jaccard_set_score(profiles: Sequence[Profile]) -> Fraction:
    """Whole-set Jaccard-style score over all attributes at once."""
    m = len(profiles[0])
    agree = 0
    span = 0
    for j in range(m):
        col = [p[j] for p in profiles]
        if all(c is not None for c in col) and len(set(col)) == 1:
            agree += 1
        span += len({c for c in col if c is not None})
    return 1 - Fraction(agree, span)
