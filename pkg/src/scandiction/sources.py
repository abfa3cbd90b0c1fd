"""Clean-field generators: binary Markov chains, i.i.d. bits and Gaussian fields."""
from __future__ import annotations

import numpy as np

from .core import BINARY, REAL, Field, InvalidArgument
from .rng import site_uniforms, stream


def markov_chain(n: int, pi: float, seed: int) -> np.ndarray:
    """Stationary symmetric binary chain: uniform start, flip with probability pi."""
    if not 0.0 <= pi <= 1.0:
        raise InvalidArgument("transition probability must lie in [0, 1]")
    u = site_uniforms(seed, n, "source")
    steps = (u < pi).astype(np.int8)
    steps[0] = u[0] < 0.5
    return np.bitwise_xor.accumulate(steps)


def markov_field(width: int, height: int, pi: float, seed: int) -> Field:
    """Markov chain laid out row by row (the row-concatenated order is the chain order)."""
    return Field(markov_chain(width * height, pi, seed).reshape(height, width), BINARY)


def iid_field(width: int, height: int, p: float, seed: int) -> Field:
    u = site_uniforms(seed, width * height, "source").reshape(height, width)
    return Field((u < p).astype(np.int8), BINARY)


def gaussian_field(width: int, height: int, covariance: np.ndarray, seed: int) -> Field:
    """Zero-mean Gaussian field with the given row-major covariance."""
    n = width * height
    cov = np.asarray(covariance, dtype=float)
    if cov.shape != (n, n):
        raise InvalidArgument(f"covariance must be {n}x{n}")
    w, v = np.linalg.eigh(cov)
    root = v * np.sqrt(np.clip(w, 0, None))
    z = stream(seed, "source", width, height).standard_normal(n)
    return Field((root @ z).reshape(height, width), REAL)
