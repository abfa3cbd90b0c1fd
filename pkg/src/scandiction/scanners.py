"""Scan orders: fixed space-filling orders, odds-then-evens, and data-dependent scanners.

A scanner is a single-use state machine. After ``reset(width, height)`` it
hands out one unvisited site per ``next_site(history)`` call, where
``history`` holds the (site, observation) pairs revealed so far. Scanners
never see clean values.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .core import ExhaustedScan, Field, InvalidArgument, Site
from .rng import stream


class Scanner:
    kind = "abstract"
    data_dependent = False

    def reset(self, width: int, height: int) -> "Scanner":
        if width < 1 or height < 1:
            raise InvalidArgument("scan dimensions must be positive")
        self.width, self.height = width, height
        self.visited: set = set()
        self._start()
        return self

    def _start(self):
        pass

    @property
    def remaining(self) -> int:
        return self.width * self.height - len(self.visited)

    def next_site(self, history: Sequence = ()) -> Site:
        if self.remaining <= 0:
            raise ExhaustedScan(f"all {self.width * self.height} sites already visited")
        site = Site(*self._choose(history))
        if site in self.visited or not (0 <= site.row < self.height and 0 <= site.col < self.width):
            raise InvalidArgument(f"{self.kind} scanner proposed invalid site {site}")
        self.visited.add(site)
        return site

    def _choose(self, history):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class FixedOrderScanner(Scanner):
    """Data-independent scanner backed by a precomputed permutation."""

    def _start(self):
        self._order = [Site(*s) for s in self.order_for(self.width, self.height)]
        self._pos = 0

    def order_for(self, width: int, height: int) -> list:
        raise NotImplementedError

    def _choose(self, history):
        site = self._order[self._pos]
        self._pos += 1
        return site


class RasterScanner(FixedOrderScanner):
    kind = "raster"

    def order_for(self, width, height):
        return [(r, c) for r in range(height) for c in range(width)]


class SnakeScanner(FixedOrderScanner):
    kind = "snake"

    def order_for(self, width, height):
        out = []
        for r in range(height):
            cols = range(width) if r % 2 == 0 else range(width - 1, -1, -1)
            out.extend((r, c) for c in cols)
        return out


def _hilbert_d2xy(order: int, d: int) -> tuple[int, int]:
    x = y = 0
    s = 1
    t = d
    while s < (1 << order):
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x, y = s - 1 - x, s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t //= 4
        s *= 2
    return x, y


def _gilbert(x, y, ax, ay, bx, by, out):
    # generalized Hilbert curve on an arbitrary rectangle (recursive halving)
    w = abs(ax + ay)
    h = abs(bx + by)
    dax, day = (ax > 0) - (ax < 0), (ay > 0) - (ay < 0)
    dbx, dby = (bx > 0) - (bx < 0), (by > 0) - (by < 0)
    if h == 1:
        for _ in range(w):
            out.append((x, y))
            x, y = x + dax, y + day
        return
    if w == 1:
        for _ in range(h):
            out.append((x, y))
            x, y = x + dbx, y + dby
        return
    ax2, ay2 = ax // 2, ay // 2
    bx2, by2 = bx // 2, by // 2
    w2 = abs(ax2 + ay2)
    h2 = abs(bx2 + by2)
    if 2 * w > 3 * h:
        if w2 % 2 and w > 2:
            ax2, ay2 = ax2 + dax, ay2 + day
        _gilbert(x, y, ax2, ay2, bx, by, out)
        _gilbert(x + ax2, y + ay2, ax - ax2, ay - ay2, bx, by, out)
    else:
        if h2 % 2 and h > 2:
            bx2, by2 = bx2 + dbx, by2 + dby
        _gilbert(x, y, bx2, by2, ax2, ay2, out)
        _gilbert(x + bx2, y + by2, ax, ay, bx - bx2, by - by2, out)
        _gilbert(x + (ax - dax) + (bx2 - dbx), y + (ay - day) + (by2 - dby),
                 -bx2, -by2, -(ax - ax2), -(ay - ay2), out)


def hilbert_order(width: int, height: int) -> list[tuple[int, int]]:
    """Hilbert order as (row, col) pairs.

    Power-of-two squares use the classical curve. Other rectangles use the
    generalized (recursive-halving) construction, which starts at (0, 0),
    splits the longer side first and nudges odd halves to even length so
    that consecutive sites stay adjacent. On rectangles with an odd side a
    single diagonal step can occur.
    """
    n = width
    if width == height and n & (n - 1) == 0:
        k = n.bit_length() - 1
        return [(y, x) for x, y in (_hilbert_d2xy(k, d) for d in range(n * n))]
    out: list = []
    if width >= height:
        _gilbert(0, 0, width, 0, 0, height, out)
    else:
        _gilbert(0, 0, 0, height, width, 0, out)
    return [(y, x) for x, y in out]


class HilbertScanner(FixedOrderScanner):
    kind = "hilbert"

    def order_for(self, width, height):
        return hilbert_order(width, height)


class RandomScanner(FixedOrderScanner):
    kind = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def order_for(self, width, height):
        perm = stream(self.seed, "scanner", width, height).permutation(width * height)
        return [divmod(int(i), width) for i in perm]

    def __repr__(self):
        return f"RandomScanner(seed={self.seed})"


def odds_then_evens_passes(n: int, k: int = 1) -> tuple[list[int], list[int]]:
    """Split 0..n-1 into a first pass (k visited, one skipped, repeating) and the skipped rest."""
    if k < 1:
        raise InvalidArgument("odds-then-evens needs k >= 1")
    first = [i for i in range(n) if i % (k + 1) != k]
    second = [i for i in range(n) if i % (k + 1) == k]
    return first, second


class OddsThenEvensScanner(FixedOrderScanner):
    """Two-pass scan over the row-concatenated sequence.

    Pass one visits k contiguous symbols then skips one; pass two fills the holes.
    """

    kind = "ote"

    def __init__(self, k: int = 1):
        if k < 1:
            raise InvalidArgument("odds-then-evens needs k >= 1")
        self.k = k

    def order_for(self, width, height):
        first, second = odds_then_evens_passes(width * height, self.k)
        return [divmod(i, width) for i in first + second]

    def first_pass_size(self) -> int:
        return len(odds_then_evens_passes(self.width * self.height, self.k)[0])

    def __repr__(self):
        return f"OddsThenEvensScanner(k={self.k})"


class CheckerboardScanner(FixedOrderScanner):
    """2-D two-pass variant: sites with even row+col first, then the rest, each pass raster."""

    kind = "checker"

    def order_for(self, width, height):
        sites = [(r, c) for r in range(height) for c in range(width)]
        return [s for s in sites if sum(s) % 2 == 0] + [s for s in sites if sum(s) % 2 == 1]


class CustomScanner(Scanner):
    """Wrap a policy ``policy(history, unvisited, width, height) -> site``."""

    kind = "custom"
    data_dependent = True

    def __init__(self, policy: Callable):
        self.policy = policy

    def _choose(self, history):
        unvisited = [(r, c) for r in range(self.height) for c in range(self.width)
                     if (r, c) not in self.visited]
        return self.policy(list(history), unvisited, self.width, self.height)


def greedy_policy(history, unvisited, width, height):
    """Step to a free 4-neighbour of the last site; the last observation picks the
    neighbour preference. With no free neighbour, jump to the first free site in raster order."""
    if history:
        (r, c), y = history[-1]
        if y:
            moves = [(0, 1), (1, 0), (0, -1), (-1, 0)]
        else:
            moves = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        free = set(unvisited)
        for dr, dc in moves:
            if (r + dr, c + dc) in free:
                return (r + dr, c + dc)
    return unvisited[0]


class GreedyScanner(CustomScanner):
    kind = "greedy"

    def __init__(self):
        super().__init__(greedy_policy)


_SIMPLE = {"raster": RasterScanner, "snake": SnakeScanner, "hilbert": HilbertScanner,
           "checker": CheckerboardScanner, "greedy": GreedyScanner}


def make_scanner(spec: str) -> Scanner:
    """Build a scanner from ``raster|snake|hilbert|checker|greedy|random:SEED|ote:K``."""
    name, _, arg = spec.partition(":")
    if name in _SIMPLE and not arg:
        return _SIMPLE[name]()
    if name == "random":
        return RandomScanner(int(arg or 0))
    if name == "ote":
        return OddsThenEvensScanner(int(arg or 1))
    raise InvalidArgument(f"unknown scanner spec {spec!r}")


def next_site(scanner: Scanner, history: Sequence = ()) -> Site:
    return scanner.next_site(history)


def scan_order(scanner: Scanner, width: int, height: int, noisy: Field | None = None) -> list[Site]:
    """Materialise the scan for one realisation of the noisy field."""
    scanner.reset(width, height)
    history: list = []
    order = []
    for _ in range(width * height):
        s = scanner.next_site(history)
        order.append(s)
        history.append((s, noisy[s] if noisy is not None else None))
    return order
