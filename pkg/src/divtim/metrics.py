"""Evaluation metrics for selected seed sets.

The headline metric is the value-distribution entropy of a seed set's
profiles, damped by a coverage penalty: spreading picks over few of the
available attribute values is penalized even when those few are balanced.
"""

from __future__ import annotations

import math
from typing import Sequence

from .diversity import aw_theoretical_max
from .errors import UsageError
from .profiles import MISSING, ProfileSet


def seed_entropy(seed_set: Sequence[int], profiles: ProfileSet) -> float:
    """Entropy of the seeds' attribute-value distribution, coverage-penalized.

    Entropy is the base-2 Shannon entropy of value frequencies across the
    seeds' profiles; the penalty factor is 1 / (1 + log2(|dom| / |dom(S)|))
    where |dom| counts all declared values and |dom(S)| the distinct
    values the seeds actually use.  Seeds with no values score 0.
    """
    if not seed_set:
        raise UsageError("seed set must be non-empty")
    counts: dict[tuple[int, int], int] = {}
    for v in seed_set:
        row = profiles.codes[v]
        for j in range(profiles.schema.m):
            if row[j] != MISSING:
                key = (j, int(row[j]))
                counts[key] = counts.get(key, 0) + 1
    if not counts:
        return 0.0
    total = sum(counts.values())
    entropy = -sum((c / total) * math.log2(c / total) for c in counts.values())
    dom_total = profiles.schema.total_domain_size()
    zeta = 1.0 / (1.0 + math.log2(dom_total / len(counts)))
    return entropy * zeta


def seed_overlap(s1: Sequence[int], s2: Sequence[int], k: int) -> float:
    """|intersection| / k for two size-k seed sets."""
    if len(s1) != k or len(s2) != k:
        raise UsageError(f"both seed sets must have size {k}")
    return len(set(s1) & set(s2)) / k


def diversity_curve(results, domain_sizes: Sequence[int],
                    weights: Sequence[float] | None = None,
                    lam: float = 1.0) -> list[dict]:
    """Achieved-versus-maximum diversity rows for attribute-wise runs.

    One row per (k, alpha) result: the achieved value, the balanced-
    assignment maximum for that budget, and their ratio.
    """
    rows = []
    for res in results:
        if res.diversity_name != "aw":
            raise UsageError("diversity curves are defined for attribute-wise runs")
        peak = aw_theoretical_max(res.k, domain_sizes, weights, lam)
        rows.append({
            "k": res.k,
            "alpha": res.alpha,
            "diversity": res.diversity_value,
            "diversity_max": peak,
            "ratio": res.diversity_value / peak if peak > 0 else 0.0,
        })
    return rows
