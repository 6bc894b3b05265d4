"""Deterministic random streams.

One root seed per run; every agent owns independent substreams derived by
splitting on (agent id, purpose), so neither population size nor iteration
order can shift anyone else's draws.  PCG64 seeded through
``numpy.random.SeedSequence`` is platform-independent, which is what makes
replays bit-identical.
"""

from __future__ import annotations

import numpy as np

# Substream purposes.  Keep values stable: they are part of the replay contract.
INIT = 0      # agent construction (position, opinion, priorities, ...)
MOVE = 1      # one movement turn per tick
GATE = 2      # habits: routine-vs-rational gate, one draw per tick
CHOICE = 3    # habits: mode pick, one draw per tick


def substream(seed: int, agent_id: int, purpose: int) -> np.random.Generator:
    """Generator for one agent's stream of a given purpose."""
    ss = np.random.SeedSequence(seed, spawn_key=(agent_id, purpose))
    return np.random.Generator(np.random.PCG64(ss))


class StreamBank:
    """Per-agent uniform draws, one column per tick.

    Each agent consumes exactly one value from its own substream per call to
    :meth:`next_column`, regardless of whether the model ends up using it.
    That fixed consumption rate keeps streams aligned when toggles flip
    mid-run.  Draws are buffered in blocks to amortise generator overhead.
    """

    def __init__(self, seed: int, n_agents: int, purpose: int, block: int = 256):
        self._gens = [substream(seed, i, purpose) for i in range(n_agents)]
        self._block = block
        self._buf = np.empty((n_agents, block))
        self._col = block  # force refill on first use

    def next_column(self) -> np.ndarray:
        if self._col >= self._block:
            for i, g in enumerate(self._gens):
                self._buf[i] = g.random(self._block)
            self._col = 0
        col = self._buf[:, self._col].copy()
        self._col += 1
        return col
