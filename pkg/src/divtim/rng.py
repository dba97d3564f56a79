"""Deterministic random streams built on the Philox counter-based generator.

Every stochastic unit of work (one reverse-reachable set, one simulation
run, one estimation batch) draws from its own stream keyed by
``(master seed, stream id)``.  Results are therefore independent of how
work is split across workers: stream 17 produces the same draws whether
it is generated first, last, or on another thread.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(master_seed: int, stream_id: int) -> np.random.Generator:
    """Generator for one work unit, keyed by (master_seed, stream_id)."""
    key = ((master_seed & _MASK64) << 64) | (stream_id & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def phase_seed(master_seed: int, tag: int) -> int:
    """Derive an independent 64-bit master seed for a pipeline phase.

    Phases (corpus generation, estimation batches, simulation, synthesis)
    must not share streams even when given the same master seed.
    """
    ss = np.random.SeedSequence((master_seed & _MASK64, tag & _MASK64))
    return int(ss.generate_state(1, np.uint64)[0])
