import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scandiction.core import ExhaustedScan, Field, validate_scan_coverage
from scandiction.scanners import (CustomScanner, greedy_policy, hilbert_order, make_scanner,
                                  odds_then_evens_passes, scan_order)

SPECS = ("raster", "snake", "hilbert", "checker", "greedy", "random:3", "ote:1", "ote:2")


def test_raster_step():
    assert tuple(scan_order(make_scanner("raster"), 2, 2)[3]) == (1, 1)
    assert tuple(scan_order(make_scanner("raster"), 2, 2)[2]) == (1, 0)


def test_hilbert_adjacent_on_4x4():
    order = scan_order(make_scanner("hilbert"), 4, 4)
    assert validate_scan_coverage(order, 4, 4)
    assert all(abs(a.row - b.row) + abs(a.col - b.col) == 1 for a, b in zip(order, order[1:]))


@given(st.integers(1, 24), st.integers(1, 24))
@settings(max_examples=60, deadline=None)
def test_hilbert_any_size_is_a_permutation(w, h):
    order = hilbert_order(w, h)
    assert validate_scan_coverage(order, w, h)
    steps = [abs(a[0] - b[0]) + abs(a[1] - b[1]) for a, b in zip(order, order[1:])]
    assert sum(s != 1 for s in steps) <= 1 and max(steps, default=1) <= 2


def test_random_deterministic_and_single_row():
    assert scan_order(make_scanner("random:1"), 5, 5) == scan_order(make_scanner("random:1"), 5, 5)
    assert scan_order(make_scanner("raster"), 9, 1) == scan_order(make_scanner("snake"), 9, 1)


def test_odds_then_evens_passes():
    first, second = odds_then_evens_passes(6, 1)
    assert first == [0, 2, 4] and second == [1, 3, 5]
    first, second = odds_then_evens_passes(7, 2)
    assert first == [0, 1, 3, 4, 6] and second == [2, 5]
    for n in range(1, 30):
        for k in (1, 2, 3):
            assert len(odds_then_evens_passes(n, k)[0]) == -(-n * k // (k + 1))


def test_exhausted_scan_raises():
    sc = make_scanner("raster").reset(2, 1)
    sc.next_site()
    sc.next_site()
    with pytest.raises(ExhaustedScan):
        sc.next_site()


@given(st.sampled_from(SPECS), st.integers(1, 64), st.integers(1, 64), st.integers(0, 1000))
@settings(max_examples=80, deadline=None)
def test_every_scanner_covers(spec, w, h, seed):
    y = Field(np.random.default_rng(seed).integers(0, 2, (h, w)))
    assert validate_scan_coverage(scan_order(make_scanner(spec), w, h, y), w, h)


@given(st.sampled_from([s for s in SPECS if s != "greedy"]), st.integers(1, 12), st.integers(1, 12),
       st.integers(0, 1000))
@settings(max_examples=60, deadline=None)
def test_fixed_orders_ignore_observations(spec, w, h, seed):
    rng = np.random.default_rng(seed)
    a = Field(rng.integers(0, 2, (h, w)))
    b = Field(rng.permutation(a.flat()).reshape(h, w))
    assert scan_order(make_scanner(spec), w, h, a) == scan_order(make_scanner(spec), w, h, b)


def test_greedy_replay():
    y = Field(np.array([[1, 0, 1], [0, 0, 1], [1, 1, 0]]))
    order = scan_order(make_scanner("greedy"), 3, 3, y)
    visited, history = [], []
    for _ in range(9):
        unvisited = [(r, c) for r in range(3) for c in range(3) if (r, c) not in visited]
        s = greedy_policy(history, unvisited, 3, 3)
        visited.append(s)
        history.append((s, y[s]))
    assert [tuple(s) for s in order] == visited
    assert scan_order(CustomScanner(greedy_policy), 3, 3, y) == order
