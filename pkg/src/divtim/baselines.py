"""Degree-plus-diversity greedy baseline over numeric preference vectors.

The baseline scores a candidate by ``(1 - gamma) * out-degree + gamma *
marginal diversity`` where diversity is the concave coverage of
preference types; ``gamma`` plays the opposite role of the selection
trade-off ``alpha``, so comparisons map ``gamma = 1 - alpha``.
"""

from __future__ import annotations

import numpy as np

from .diversity import NumericDiversity
from .errors import ConfigError
from .graph import DiffusionGraph

G_MODES = ("unit", "degree")


def node_gain_vector(graph: DiffusionGraph, g_mode: str) -> np.ndarray:
    if g_mode == "unit":
        return np.ones(graph.node_count, dtype=np.float64)
    if g_mode == "degree":
        return graph.out_degrees().astype(np.float64)
    raise ConfigError(f"unknown g mode {g_mode!r}")


def deg_d_greedy(graph: DiffusionGraph, preferences: np.ndarray, g_mode: str,
                 gamma: float, k: int) -> list[int]:
    """Pick k seeds greedily by degree/diversity trade-off; ties go to the
    lowest node id."""
    if not (0.0 <= gamma <= 1.0):
        raise ConfigError("gamma must lie in [0, 1]")
    if preferences.shape[0] != graph.node_count:
        raise ConfigError("one preference vector per node required")
    if k < 1:
        raise ConfigError("budget k must be at least 1")
    degrees = graph.out_degrees().astype(np.float64)
    diversity = NumericDiversity(preferences, node_gain_vector(graph, g_mode))
    seeds: list[int] = []
    candidates = list(range(graph.node_count))
    for _ in range(min(k, graph.node_count)):
        best_v = -1
        best_score = -np.inf
        for v in candidates:
            score = (1.0 - gamma) * degrees[v] + gamma * diversity.gain(v)
            if score > best_score:
                best_v, best_score = v, score
        seeds.append(best_v)
        candidates.remove(best_v)
        diversity.commit(best_v)
    return seeds


def deg_d_greedy_alpha(graph: DiffusionGraph, preferences: np.ndarray, g_mode: str,
                       alpha: float, k: int) -> list[int]:
    """Same run parameterized by the selection trade-off (gamma = 1 - alpha)."""
    return deg_d_greedy(graph, preferences, g_mode, 1.0 - alpha, k)
