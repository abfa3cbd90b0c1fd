import itertools
import math

import numpy as np
import pytest

from scandiction.bounds import binary_entropy
from scandiction.core import Site
from scandiction.estimators import FILTER, PREDICTOR, HmmParams, hmm_forward_filter
from scandiction.oracle import (JointModel, SizeError, adaptive_scan_value, brute_force_scalar_bayes,
                                bsc_scalar_joint, exhaustive_best_order, exhaustive_optimal_filter_loss,
                                exhaustive_order_range, output_entropy)


def test_scalar_bayes_examples():
    assert brute_force_scalar_bayes(np.array([[0.3, 0.0], [0.0, 0.7]])) == 0
    assert brute_force_scalar_bayes(bsc_scalar_joint(0.5, 0.2)) == pytest.approx(0.2, abs=1e-15)


def test_filter_loss_noiseless_is_zero():
    m = JointModel.markov(3, 2, 0.2, 0.0)
    order = [(r, c) for r in range(2) for c in range(3)]
    assert exhaustive_optimal_filter_loss(m, order, FILTER) == 0.0


@pytest.mark.parametrize("n", [3, 5])
def test_raster_filter_loss_matches_forward_filter(n):
    params = HmmParams(0.15, 0.2)
    expected = 0.0
    for y in itertools.product((0, 1), repeat=n):
        # P(y) from the normalising constants of the forward recursion
        py = 0.0
        for x in itertools.product((0, 1), repeat=n):
            p = 0.5
            for t in range(1, n):
                p *= params.pi if x[t] != x[t - 1] else 1 - params.pi
            for t in range(n):
                p *= params.delta if x[t] != y[t] else 1 - params.delta
            py += p
        post = hmm_forward_filter(y, params)
        expected += py * np.minimum(post, 1 - post).sum()
    m = JointModel.markov(n, 1, 0.15, 0.2)
    assert exhaustive_optimal_filter_loss(m, [(0, c) for c in range(n)]) == pytest.approx(expected, abs=1e-12)


def test_memoryless_orders_tie_and_pick_raster():
    m = JointModel.iid(2, 2, 0.5, 0.25)
    order, value = exhaustive_best_order(m, FILTER)
    assert [tuple(s) for s in order] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert value == pytest.approx(1.0)
    best, worst = exhaustive_order_range(m, FILTER)
    assert best == pytest.approx(worst, abs=1e-12)


@pytest.mark.parametrize("mode", [FILTER, PREDICTOR])
def test_best_order_invariant_under_transpose(mode):
    m = JointModel.markov(3, 2, 0.1, 0.2)
    assert exhaustive_best_order(m, mode)[1] == pytest.approx(exhaustive_best_order(m.transposed(), mode)[1],
                                                              abs=1e-12)


def test_order_range_brackets_every_order():
    m = JointModel.markov(2, 2, 0.2, 0.1)
    sites = [(r, c) for r in range(2) for c in range(2)]
    vals = [exhaustive_optimal_filter_loss(m, list(p)) for p in itertools.permutations(sites)]
    best, worst = exhaustive_order_range(m, FILTER)
    assert best == pytest.approx(min(vals), abs=1e-12) and worst == pytest.approx(max(vals), abs=1e-12)
    assert exhaustive_best_order(m, FILTER)[1] == pytest.approx(best, abs=1e-12)


def test_adaptive_scan_at_least_as_good_as_fixed():
    for mode in (FILTER, PREDICTOR):
        m = JointModel.markov(2, 2, 0.15, 0.2)
        assert adaptive_scan_value(m, mode) <= exhaustive_best_order(m, mode)[1] + 1e-12


def test_output_entropy():
    m = JointModel.iid(3, 1, 0.5, 0.1)
    assert output_entropy(m) == pytest.approx(3.0, abs=1e-12)
    m = JointModel.iid(2, 2, 0.2, 0.1)
    assert output_entropy(m) == pytest.approx(4 * binary_entropy(0.2 * 0.9 + 0.8 * 0.1), abs=1e-12)
    assert output_entropy(m, bits=False) == pytest.approx(output_entropy(m) * math.log(2), abs=1e-12)


def test_size_limits():
    with pytest.raises(SizeError):
        JointModel.markov(13, 1, 0.1, 0.1)
    with pytest.raises(SizeError):
        exhaustive_best_order(JointModel.markov(9, 1, 0.1, 0.1))
    with pytest.raises(SizeError):
        adaptive_scan_value(JointModel.markov(5, 1, 0.1, 0.1))
