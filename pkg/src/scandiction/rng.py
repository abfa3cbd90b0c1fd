"""Seeded counter-based random streams.

Every random draw in the library comes from numpy's Philox4x64-10 generator
keyed by ``(seed, purpose)``, so channel noise, scan randomisation and expert
sampling never share a stream.
"""
from __future__ import annotations

import numpy as np

PRNG_ID = "numpy.Philox4x64-10"

_PURPOSES = {"channel": 1, "source": 2, "scanner": 3, "experts": 4, "filter": 5}


def stream(seed: int, purpose: str, *extra: int) -> np.random.Generator:
    key = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, _PURPOSES[purpose], *extra])
    return np.random.Generator(np.random.Philox(key=key.generate_state(2, np.uint64)))


def site_uniforms(seed: int, n: int, purpose: str = "channel", *extra: int) -> np.ndarray:
    """Open-interval uniforms u_0..u_{n-1}; u_i depends only on (seed, purpose, i)."""
    # one 64-bit Philox word per site, so the i-th value is independent of n
    words = stream(seed, purpose, *extra).integers(0, 2**53, size=n, dtype=np.uint64)
    return (words.astype(np.float64) + 0.5) / 2.0**53
