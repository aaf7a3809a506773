"""Counter-based seed splitting.

Every random draw in the simulator comes from a stream identified by
``(seed, domain, *counters)``.  The key is fed to
:class:`numpy.random.SeedSequence` as its ``spawn_key`` and the resulting
state drives a Philox (counter-based) bit generator.  Any single stream can
therefore be rebuilt in isolation, e.g. measurement 517 of chip 3 without
touching the 516 measurements before it, and results never depend on the
order in which streams are consumed or on the number of worker threads.

Domains:

=========  ==========================================================
CHIP       process-variation draws of chip ``n``: ``(CHIP, n)``
MEASURE    one EN cycle: ``(MEASURE, campaign, n, t)``
THERMO     thermometer readout: ``(THERMO, campaign, n)``
LAYOUT     design-wide per-position period offsets: ``(LAYOUT,)``
=========  ==========================================================
"""
from __future__ import annotations

import numpy as np

CHIP = 0
MEASURE = 1
THERMO = 2
LAYOUT = 3

_MASK64 = (1 << 64) - 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for stream ``key`` under ``seed``."""
    if any(k < 0 for k in key):
        raise ValueError(f"stream key components must be non-negative, got {key}")
    seq = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))
