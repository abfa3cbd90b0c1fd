import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scandiction.core import (BINARY, REAL, Field, InvalidArgument, LossFunction, ScanTrace,
                              cumulative_loss, loss, make_trace, parse_field, format_field,
                              recompute_losses, validate_scan_coverage)
from scandiction.scanners import make_scanner, scan_order


def test_loss_values():
    assert loss("squared", 1.0, 1.0) == 0.0
    assert loss("hamming", 0, 1) == 1
    assert loss("squared", 2.0, 0.5) == 2.25


def test_hamming_rejects_non_binary():
    with pytest.raises(InvalidArgument):
        loss("hamming", 0.5, 1)
    with pytest.raises(InvalidArgument):
        LossFunction("absolute")


def test_cumulative_loss():
    assert cumulative_loss(make_trace([], [], [], [])) == 0
    t = make_trace([(0, 0), (0, 1), (0, 2)], [0, 0, 0], [0, 0, 0], [0, 0, 0])
    assert cumulative_loss(t) == 0
    t = make_trace([(0, i) for i in range(4)], [0] * 4, [0] * 4, [1, 0, 1, 1])
    assert cumulative_loss(t) == 3
    assert cumulative_loss(t, normalized=True) == 0.75


def test_noiseless_say_what_you_see_is_lossless():
    x = Field(np.ones((3, 3)))
    order = scan_order(make_scanner("raster"), 3, 3)
    t = make_trace(order, [x[s] for s in order], [x[s] for s in order],
                   [loss("hamming", x[s], x[s]) for s in order])
    assert cumulative_loss(t) == 0
    assert recompute_losses(t, x, LossFunction("hamming")) == [0.0] * 9


def test_trace_lengths_checked():
    with pytest.raises(InvalidArgument):
        ScanTrace(((0, 0),), (0,), (0.0, 1.0), (0.0,))


def test_coverage_examples():
    assert validate_scan_coverage([(0, 0), (0, 1), (1, 0), (1, 1)], 2, 2)
    assert not validate_scan_coverage([(0, 0), (0, 0), (1, 0), (1, 1)], 2, 2)
    assert validate_scan_coverage(scan_order(make_scanner("hilbert"), 4, 4), 4, 4)


def test_field_validation():
    with pytest.raises(InvalidArgument):
        Field(np.array([[0, 2]]))
    with pytest.raises(InvalidArgument):
        Field(np.array([[np.nan]]), REAL)
    with pytest.raises(InvalidArgument):
        Field(np.zeros((0, 3)))


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 16), st.booleans())
@settings(max_examples=40, deadline=None)
def test_field_text_roundtrip(w, h, seed, binary):
    rng = np.random.default_rng(seed)
    if binary:
        f = Field(rng.integers(0, 2, (h, w)), BINARY)
    else:
        f = Field(rng.normal(size=(h, w)), REAL)
    assert parse_field(format_field(f)) == f


@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=200))
@settings(max_examples=50, deadline=None)
def test_cumulative_equals_sum(vals):
    t = make_trace([(0, i) for i in range(len(vals))], [0] * len(vals), [0] * len(vals), vals)
    assert abs(cumulative_loss(t) - sum(vals)) <= 1e-12 * max(1.0, sum(vals))
