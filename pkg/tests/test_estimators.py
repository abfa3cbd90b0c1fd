import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scandiction.channels import Channel, corrupt
from scandiction.core import Field, LossFunction
from scandiction.estimators import (FILTER, PREDICTOR, GaussianFieldModel, HmmParams, ar_covariance,
                                    binary_awgn_conditional_mean, gaussian_sequential_conditioning,
                                    hmm_forward_filter, hmm_two_pass_posteriors, hmm_window_posterior,
                                    make_estimator, run_scan_estimate, singlet_filter)
from scandiction.oracle import (brute_force_hmm_posteriors, brute_force_window_posterior,
                                dense_gaussian_conditioning)
from scandiction.scanners import make_scanner, odds_then_evens_passes
from scandiction.sources import markov_chain, markov_field


def _chain_posterior(y, revealed, i, params):
    """P(x_i = 1 | y at the revealed indices), by summing the full joint."""
    n = len(y)
    num = den = 0.0
    for x in itertools.product((0, 1), repeat=n):
        p = 0.5
        for t in range(1, n):
            p *= params.pi if x[t] != x[t - 1] else 1 - params.pi
        for j in revealed:
            p *= params.delta if x[j] != y[j] else 1 - params.delta
        den += p
        num += p * x[i]
    return num / den


def test_singlet_say_what_you_see():
    for d in (0.0, 0.1, 0.3, 0.49):
        assert singlet_filter(1, Channel.bsc(d), 0.5) == 1
        assert singlet_filter(0, Channel.bsc(d), 0.5) == 0
    assert singlet_filter(2.0, Channel.awgn(1.0), 1.0) == 1.0


def test_forward_filter_limits():
    y = [0, 1, 1, 0, 1]
    assert np.array_equal(hmm_forward_filter(y, HmmParams(0.2, 0.0)), y)
    post = hmm_forward_filter(y, HmmParams(0.5, 0.2))
    assert np.allclose(post, np.where(np.array(y) == 1, 0.8, 0.2), atol=1e-15)


@pytest.mark.parametrize("n", range(3, 9))
def test_forward_filter_matches_enumeration(n):
    params = HmmParams(0.1, 0.2)
    for y in itertools.product((0, 1), repeat=n):
        if sum(y) % 3:
            continue
        assert np.max(np.abs(hmm_forward_filter(y, params) - brute_force_hmm_posteriors(y, params))) < 1e-12


def test_forward_filter_example():
    y = (1, 1, 0)
    p = HmmParams(0.1, 0.1)
    assert np.allclose(hmm_forward_filter(y, p), brute_force_hmm_posteriors(y, p), atol=1e-12, rtol=0)


def test_window_posterior():
    p = HmmParams(0.1, 0.2)
    assert abs(hmm_window_posterior([0, 1, 0], 1, 1, p) - brute_force_window_posterior([0, 1, 0], 1, 1, p)) < 1e-12
    assert abs(hmm_window_posterior([0, 1, 0], 1, 0, p) - 0.8) < 1e-12
    assert hmm_window_posterior([0, 1, 0], 1, 2, HmmParams(0.1, 0.0)) == 1.0


@pytest.mark.parametrize("k", [1, 2])
def test_two_pass_matches_enumeration(k):
    params = HmmParams(0.15, 0.2)
    n = 7
    first, second = odds_then_evens_passes(n, k)
    rng = np.random.default_rng(k)
    for _ in range(5):
        y = rng.integers(0, 2, n)
        post = hmm_two_pass_posteriors(y, k, params)
        order = first + second
        for t, i in enumerate(order):
            expected = _chain_posterior(y, order[:t + 1], i, params)
            assert abs(post[i] - expected) < 1e-12


def test_two_pass_batch_equals_rows():
    params = HmmParams(0.1, 0.1)
    y = np.random.default_rng(3).integers(0, 2, (4, 50))
    batch = hmm_two_pass_posteriors(y, 1, params)
    rows = np.array([hmm_two_pass_posteriors(r, 1, params) for r in y])
    assert np.max(np.abs(batch - rows)) < 1e-12


@pytest.mark.parametrize("scan,reference", [("raster", "forward"), ("ote:1", "two-pass")])
def test_incremental_estimator_matches_batch(scan, reference):
    params = HmmParams(0.1, 0.1)
    x = markov_field(300, 1, 0.1, 4)
    y = corrupt(Channel.bsc(0.1), x, 5)
    tr = run_scan_estimate(x, y, make_scanner(scan), make_estimator("hmm-forward", params=params),
                           FILTER, LossFunction("hamming"))
    yy = y.flat().astype(int)
    post = hmm_forward_filter(yy, params) if reference == "forward" else hmm_two_pass_posteriors(yy, 1, params)
    dec = np.where(post > 0.5, 1, np.where(post < 0.5, 0, yy))
    assert [int(e) for e in tr.estimates] == [int(dec[s.col]) for s in tr.order]


def test_predictor_mode_never_sees_current_symbol():
    params = HmmParams(0.5, 0.1)
    x = markov_field(40, 1, 0.5, 1)
    y = corrupt(Channel.bsc(0.1), x, 2)
    tr = run_scan_estimate(x, y, make_scanner("raster"), make_estimator("hmm-forward", params=params),
                           PREDICTOR, LossFunction("hamming"))
    assert set(tr.estimates) == {0.0}


def test_binary_awgn_conditional_mean():
    assert binary_awgn_conditional_mean(0.0, 2.0) == 0.0
    assert abs(binary_awgn_conditional_mean(1e3, 1.0) - 1.0) < 1e-12
    assert abs(binary_awgn_conditional_mean(1.0, 1.0) - 0.76159) < 1e-5


def test_gaussian_matches_dense_oracle():
    cov = ar_covariance(3, 3, 0.7, 1.3)
    model = GaussianFieldModel(cov, 0.4)
    order = [(r, c) for r in range(3) for c in range(3)]
    for mode in (FILTER, PREDICTOR):
        v = np.array([s.variance for s in gaussian_sequential_conditioning(model, order, mode, 3)])
        ref = dense_gaussian_conditioning(cov, 0.4, order, mode, 3)
        assert np.allclose(v, ref, rtol=1e-8, atol=0)


@given(st.integers(2, 5), st.floats(0.0, 0.9), st.floats(0.05, 3.0), st.integers(0, 999))
@settings(max_examples=30, deadline=None)
def test_gaussian_random_orders_match_dense(w, rho, sn2, seed):
    cov = ar_covariance(w, w, rho, 1.0)
    model = GaussianFieldModel(cov, sn2)
    order = list(np.random.default_rng(seed).permutation(w * w))
    for mode in (FILTER, PREDICTOR):
        v = np.array([s.variance for s in gaussian_sequential_conditioning(model, order, mode)])
        assert np.allclose(v, dense_gaussian_conditioning(cov, sn2, order, mode), rtol=1e-8, atol=1e-12)
    f = [s.variance for s in gaussian_sequential_conditioning(model, order, FILTER)]
    p = [s.variance for s in gaussian_sequential_conditioning(model, order, PREDICTOR)]
    assert all(a <= b + 1e-12 for a, b in zip(f, p))


def test_gaussian_limits():
    model = GaussianFieldModel(2.0 * np.eye(5), 0.5)
    v = [s.variance for s in gaussian_sequential_conditioning(model, range(5))]
    assert np.allclose(v, 2.0 * 0.5 / 2.5)
    model = GaussianFieldModel(ar_covariance(3, 3, 0.5), 1e-10)
    assert max(s.variance for s in gaussian_sequential_conditioning(model, range(9))) < 1e-9
    prev = 0.0
    for sn2 in (1.0, 10.0, 100.0, 1e4):
        model = GaussianFieldModel(ar_covariance(3, 3, 0.5), sn2)
        mean = np.mean([s.variance for s in gaussian_sequential_conditioning(model, range(9))])
        assert prev < mean < 1.0
        prev = mean


def test_run_scan_noiseless_and_bsc():
    x = markov_field(8, 8, 0.2, 1)
    sws = make_estimator("singlet", channel=Channel.bsc(0.0))
    tr = run_scan_estimate(x, x, make_scanner("hilbert"), sws, FILTER, LossFunction("hamming"))
    assert tr.cumulative == 0
    x = markov_field(64, 64, 0.2, 2)
    y = corrupt(Channel.bsc(0.25), x, 3)
    tr = run_scan_estimate(x, y, make_scanner("snake"), make_estimator("singlet", channel=Channel.bsc(0.25)),
                           FILTER, LossFunction("hamming"))
    assert abs(tr.normalized - 0.25) < 0.02


def test_markov_chain_transition_rate():
    x = markov_chain(200_000, 0.1, 0)
    assert abs(np.mean(x[1:] != x[:-1]) - 0.1) < 0.003
    assert abs(x.mean() - 0.5) < 0.05
