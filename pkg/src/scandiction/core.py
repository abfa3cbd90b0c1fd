"""Fields, sites, losses and scan traces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

BINARY = "binary"
REAL = "real"
_FILE_ALPHABET = {BINARY: "bin", REAL: "real"}


class ScandictionError(Exception):
    """Base class for library errors."""


class InvalidArgument(ScandictionError, ValueError):
    pass


class ExhaustedScan(ScandictionError, RuntimeError):
    pass


class ModelError(ScandictionError, ValueError):
    pass


class NumericalError(ScandictionError, ArithmeticError):
    pass


class NoFeasibleBound(ScandictionError, ValueError):
    pass


class Site(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class Field:
    """A rectangular array of binary or real symbols, stored row-major."""

    values: np.ndarray
    alphabet: str = BINARY

    def __post_init__(self):
        if self.alphabet not in (BINARY, REAL):
            raise InvalidArgument(f"unknown alphabet {self.alphabet!r}")
        dtype = np.int8 if self.alphabet == BINARY else np.float64
        arr = np.array(self.values, dtype=dtype, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidArgument("field values must form a non-empty 2-D array")
        if self.alphabet == BINARY:
            if not np.all((np.asarray(self.values) == 0) | (np.asarray(self.values) == 1)):
                raise InvalidArgument("binary field contains symbols outside {0,1}")
        elif not np.all(np.isfinite(arr)):
            raise InvalidArgument("real field contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def size(self) -> int:
        return self.values.size

    def __getitem__(self, site) -> float:
        r, c = site
        return self.values[r, c].item()

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @classmethod
    def zeros(cls, width: int, height: int, alphabet: str = BINARY) -> "Field":
        return cls(np.zeros((height, width)), alphabet)

    def __eq__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.alphabet, self.values.shape, self.values.tobytes()))


def format_field(f: Field) -> str:
    lines = [f"{f.width} {f.height} {_FILE_ALPHABET[f.alphabet]}"]
    for row in f.values:
        if f.alphabet == BINARY:
            lines.append(" ".join(str(int(v)) for v in row))
        else:
            lines.append(" ".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"


def parse_field(text: str) -> Field:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidArgument("empty field file")
    head = lines[0].split()
    if len(head) != 3:
        raise InvalidArgument("header must be 'width height alphabet'")
    width, height = int(head[0]), int(head[1])
    inverse = {v: k for k, v in _FILE_ALPHABET.items()}
    if head[2] not in inverse:
        raise InvalidArgument(f"unknown alphabet tag {head[2]!r}")
    alphabet = inverse[head[2]]
    rows = [ln.split() for ln in lines[1:]]
    if len(rows) != height or any(len(r) != width for r in rows):
        raise InvalidArgument(f"expected {height} rows of {width} values")
    conv = int if alphabet == BINARY else float
    return Field(np.array([[conv(v) for v in r] for r in rows]), alphabet)


def read_field(path) -> Field:
    return parse_field(Path(path).read_text())


def write_field(f: Field, path) -> None:
    Path(path).write_text(format_field(f))


# -- losses -----------------------------------------------------------------

HAMMING = "hamming"
SQUARED = "squared"


def loss(kind: str, x: float, xhat: float) -> float:
    if kind == SQUARED:
        return (x - xhat) ** 2
    if kind == HAMMING:
        if x not in (0, 1) or xhat not in (0, 1):
            raise InvalidArgument(f"hamming loss needs binary arguments, got ({x}, {xhat})")
        return float(x != xhat)
    raise InvalidArgument(f"unknown loss kind {kind!r}")


@dataclass(frozen=True)
class LossFunction:
    kind: str

    def __post_init__(self):
        if self.kind not in (HAMMING, SQUARED):
            raise InvalidArgument(f"unknown loss kind {self.kind!r}")

    def __call__(self, x: float, xhat: float) -> float:
        return loss(self.kind, x, xhat)

    def l0(self, xhat: float) -> float:
        return self(0, xhat)

    def l1(self, xhat: float) -> float:
        return self(1, xhat)


# -- traces -----------------------------------------------------------------

@dataclass(frozen=True)
class ScanTrace:
    order: tuple
    observations: tuple
    estimates: tuple
    step_losses: tuple
    cumulative: float = field(default=None)

    def __post_init__(self):
        n = len(self.order)
        if not (len(self.observations) == len(self.estimates) == len(self.step_losses) == n):
            raise InvalidArgument("trace sequences must have equal length")
        if self.cumulative is None:
            object.__setattr__(self, "cumulative", math.fsum(self.step_losses))

    def __len__(self):
        return len(self.order)

    @property
    def normalized(self) -> float:
        return self.cumulative / len(self) if len(self) else 0.0


def make_trace(order: Iterable, observations: Iterable, estimates: Iterable,
               step_losses: Iterable) -> ScanTrace:
    return ScanTrace(tuple(Site(*s) for s in order), tuple(observations),
                     tuple(float(e) for e in estimates), tuple(float(v) for v in step_losses))


def cumulative_loss(trace: ScanTrace, normalized: bool = False) -> float:
    """Sum of per-step losses (compensated); optionally divided by the number of sites."""
    if len(trace) == 0:
        return 0.0
    total = math.fsum(trace.step_losses)
    return total / len(trace) if normalized else total


def recompute_losses(trace: ScanTrace, clean: Field, loss_fn: LossFunction) -> list[float]:
    return [loss_fn(clean[s], e) for s, e in zip(trace.order, trace.estimates)]


def validate_scan_coverage(order: Sequence, width: int, height: int) -> bool:
    if len(order) != width * height:
        return False
    seen = set()
    for r, c in order:
        if not (0 <= r < height and 0 <= c < width) or (r, c) in seen:
            return False
        seen.add((r, c))
    return True
