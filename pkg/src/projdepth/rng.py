"""Seed derivation helpers.

All randomness in the library flows through numpy's PCG64 generator
(``numpy.random.default_rng``).  Whenever one user-facing seed must drive
several logically independent streams (a feature map plus a direction set,
or the trials of a benchmark), child seeds are derived here with
``numpy.random.SeedSequence`` so the streams are independent, reproducible
and stable across runs.
"""

from __future__ import annotations

import numpy as np


def spawn_seeds(entropy, n: int) -> list[int]:
    """Derive ``n`` independent 64-bit child seeds from ``entropy``.

    ``entropy`` may be a non-negative int or a sequence of them, e.g.
    ``[master_seed, trial_index]``.
    """
    children = np.random.SeedSequence(entropy).spawn(n)
    return [int(child.generate_state(1, np.uint64)[0]) for child in children]
