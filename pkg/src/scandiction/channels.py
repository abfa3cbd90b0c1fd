"""Memoryless channels (BSC, AWGN), unbiased symbol estimates and modified losses."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .core import BINARY, REAL, Field, InvalidArgument
from .rng import site_uniforms

BSC = "bsc"
AWGN = "awgn"


@dataclass(frozen=True)
class Channel:
    kind: str
    delta: float = 0.0
    noise_variance: float = 0.0

    def __post_init__(self):
        if self.kind == BSC:
            if not 0.0 <= self.delta < 0.5:
                raise InvalidArgument(f"BSC crossover must lie in [0, 1/2), got {self.delta}")
        elif self.kind == AWGN:
            if self.noise_variance < 0:
                raise InvalidArgument("noise variance must be non-negative")
        else:
            raise InvalidArgument(f"unknown channel kind {self.kind!r}")

    @classmethod
    def bsc(cls, delta: float) -> "Channel":
        return cls(BSC, delta=delta)

    @classmethod
    def awgn(cls, noise_variance: float) -> "Channel":
        return cls(AWGN, noise_variance=noise_variance)

    @property
    def output_alphabet(self) -> str:
        return BINARY if self.kind == BSC else REAL

    def describe(self) -> dict:
        if self.kind == BSC:
            return {"channel": BSC, "delta": self.delta}
        return {"channel": AWGN, "noise_variance": self.noise_variance}


def corrupt(channel: Channel, clean: Field, seed: int) -> Field:
    """Pass every site through the channel independently.

    Site i's noise is a function of (seed, i) only, so the result does not
    depend on the order in which sites are later visited.
    """
    u = site_uniforms(seed, clean.size).reshape(clean.values.shape)
    if channel.kind == BSC:
        if clean.alphabet != BINARY:
            raise InvalidArgument("BSC requires a binary input field")
        flips = (u < channel.delta).astype(np.int8)
        return Field(clean.values ^ flips, BINARY)
    noise = np.sqrt(channel.noise_variance) * ndtri(u)
    return Field(clean.values.astype(np.float64) + noise, REAL)


def unbiased_estimate_bsc(y, delta: float):
    """h(y) = (y - delta)/(1 - 2 delta), the unbiased estimate of the BSC input."""
    if not 0.0 <= delta < 0.5:
        raise InvalidArgument(f"BSC with crossover {delta} is not invertible")
    out = (np.asarray(y, dtype=float) - delta) / (1.0 - 2.0 * delta)
    return out if out.ndim else float(out)


HAMMING_BSC = "hamming_bsc"
SQUARED_ADDITIVE = "squared_additive"


def modified_loss(kind: str, y: float, F: float, param: float) -> float:
    """Loss on the noisy symbol whose conditional mean given x is the clean loss l(x, F)."""
    if kind == SQUARED_ADDITIVE:
        return (y - F) ** 2 - param
    if kind == HAMMING_BSC:
        if not 0.0 <= param < 0.5:
            raise InvalidArgument(f"BSC with crossover {param} is not invertible")
        return (float(y != F) - param) / (1.0 - 2.0 * param)
    raise InvalidArgument(f"unknown modified-loss kind {kind!r}")
