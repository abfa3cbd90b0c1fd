"""One test per acceptance criterion; each prints a PASS/FAIL line with the measured numbers."""
import itertools
import math
import time
from fractions import Fraction

import numpy as np

from scandiction import bounds as B
from scandiction.estimators import (FILTER, PREDICTOR, GaussianFieldModel, HmmParams, ar_covariance,
                                    gaussian_sequential_conditioning, hmm_forward_filter)
from scandiction.harness import figure_data, odds_then_evens_study, theorem_audit
from scandiction.oracle import (brute_force_hmm_posteriors, brute_force_scalar_bayes, bsc_scalar_joint,
                                dense_gaussian_conditioning)


def _timed(fn, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - t0


def test_01_epsilon_delta(report):
    t0 = time.perf_counter()
    eps = {d: B.epsilon_delta(d).epsilon for d in (0.01, 0.1, 0.25, 0.49)}
    runtime = time.perf_counter() - t0
    parts = {
        "eps(0.1)<0.035": eps[0.1] < 0.035,
        "eps(0.25)<0.03": eps[0.25] < 0.03,
        "eps(0.01)<0.005": eps[0.01] < 0.005,
        "eps(0.49)<0.005": eps[0.49] < 0.005,
        "runtime<10s": runtime < 10,
    }
    ok = all(parts.values())
    detail = ", ".join(f"eps({d})={v:.6f}" for d, v in eps.items())
    failed = [k for k, v in parts.items() if not v]
    report(1, ok, f"{detail}, runtime={runtime:.2f}s" + (f"; failing: {', '.join(failed)}" if failed else ""))
    assert ok, failed


def test_02_gaussian_excess_peak(report):
    (snr, peak), runtime = _timed(B.gaussian_excess_peak)
    ok = abs(peak - 0.216) <= 0.005 and runtime < 1
    report(2, ok, f"peak={peak:.6f} at snr={snr:.4f}, runtime={runtime:.3f}s")
    assert ok


def test_03_odds_then_evens_study(report):
    s, runtime = _timed(odds_then_evens_study, 0.1, 0.1, symbols=10 ** 6, seed=0)
    eps2 = B.binary_filter_excess_bound(0.1)
    parts = {
        "trivial": abs(s.trivial - 0.100) <= 0.003,
        "ote": abs(s.odds_then_evens - 0.079) <= 0.003,
        "improvement": abs(s.improvement - 0.021) <= 0.005,
        "lower bound": abs(s.lower_bound - 0.04) <= 0.005,
        "improvement<=2eps<0.07": s.improvement <= eps2 < 0.07,
        "runtime<120s": runtime < 120,
    }
    ok = all(parts.values())
    report(3, ok, f"trivial={s.trivial:.4f} ote={s.odds_then_evens:.4f} improvement={s.improvement:.4f}"
                  f"+-{s.improvement_hw:.4f} lower_bound={s.lower_bound:.4f} 2eps={eps2:.4f}"
                  f" runtime={runtime:.1f}s")
    assert ok, [k for k, v in parts.items() if not v]


def test_04_gaussian_scan_audit(report):
    rep, runtime = _timed(theorem_audit, "thm2", sizes=(4, 6))
    pairs_per_size = rep.metadata["scan_pairs"] // 2
    ok = rep.passed and pairs_per_size >= 50 and rep.min_margin > 0 and runtime < 30
    report(4, ok, f"{len(rep.checks)} checks, {pairs_per_size} scan pairs per size, "
                  f"min margin={rep.min_margin:.4g}, runtime={runtime:.2f}s")
    assert ok


def test_05_squared_error_identity(report):
    rep = theorem_audit("lemma_sq", width=8)
    worst = max(abs(c.value) for c in rep.checks)
    ok = rep.passed and worst < 1e-9
    report(5, ok, f"{len(rep.checks)} scans on 8x8, max abs error={worst:.3g}")
    assert ok


def test_06_binary_prediction_identity(report):
    rep = theorem_audit("prop_binary")
    ok = rep.passed
    worst = max(abs(c.value) / c.limit * 3 for c in rep.checks)
    report(6, ok, f"{len(rep.checks)} (pi, delta) cells, worst deviation={worst:.2f} sigma (limit 3)")
    assert ok


def test_07_martingale(report):
    rep = theorem_audit("martingale", draws=10_000)
    ok = rep.passed
    report(7, ok, "; ".join(f"{c.label}: {c.value:.4g} (limit {c.limit:.3g})" for c in rep.checks))
    assert ok


def test_08_regret(report):
    rep = theorem_audit("regret", trials=100, n=32, m=4, jobs=0)
    ok = rep.passed and rep.metadata["lambda"] == 4
    report(8, ok, f"max regret={rep.checks[0].value:.1f} bound={rep.checks[0].limit:.3f} "
                  f"violations={int(rep.checks[1].value)} mean regret={rep.metadata['mean_regret']:.2f}")
    assert ok


def test_09_oracle_equivalence(report):
    params = HmmParams(0.1, 0.2)
    hmm_err = 0.0
    for n in range(3, 9):
        for y in itertools.product((0, 1), repeat=n):
            hmm_err = max(hmm_err, float(np.max(np.abs(hmm_forward_filter(y, params)
                                                       - brute_force_hmm_posteriors(y, params)))))
    gauss_err = 0.0
    rng = np.random.default_rng(0)
    for w in (3, 4, 5):
        cov = ar_covariance(w, w, 0.7, 1.0)
        model = GaussianFieldModel(cov, 0.5)
        for _ in range(3):
            order = list(rng.permutation(w * w))
            for mode in (FILTER, PREDICTOR):
                v = np.array([s.variance for s in gaussian_sequential_conditioning(model, order, mode)])
                ref = dense_gaussian_conditioning(cov, 0.5, order, mode)
                gauss_err = max(gauss_err, float(np.max(np.abs(v - ref) / ref)))
    mismatches = 0
    for delta in (Fraction(1, 10), Fraction(1, 4), Fraction(2, 5)):
        for k in range(50):
            p = delta + Fraction(k, 49) * (1 - 2 * delta)
            mismatches += B.bayes_envelope_bsc(p, delta) != brute_force_scalar_bayes(bsc_scalar_joint(p, delta))
    ok = hmm_err <= 1e-12 and gauss_err <= 1e-8 and mismatches == 0
    report(9, ok, f"hmm max abs err={hmm_err:.3g}, gaussian max rel err={gauss_err:.3g}, "
                  f"envelope mismatches={mismatches}/150")
    assert ok


def test_10_immse(report):
    rel = {}
    for snr in (0.5, 1.0, 2.0):
        h = 1e-4 * snr
        deriv = (B.binary_awgn_immse(snr + h)[0] - B.binary_awgn_immse(snr - h)[0]) / (2 * h)
        half_mmse = 0.5 * B.binary_awgn_immse(snr)[1]
        rel[snr] = abs(deriv - half_mmse) / half_mmse
    ok = all(v < 1e-4 for v in rel.values())
    report(10, ok, ", ".join(f"snr={s}: rel err={v:.2g}" for s, v in rel.items()))
    assert ok


def test_11_envelope_properties(report):
    delta = 0.25
    g = np.linspace(0, 0.5, 2001)
    env = B.zeta_binary_envelope(delta)
    dominates = bool(np.all(env(g) >= B.zeta_binary(g, delta) - 1e-12))
    second = np.diff(env(g), 2)
    concave = bool(second.max() <= 1e-9)
    header, rows = figure_data("zeta_envelope", delta=delta)
    below = max((r for r in rows if r[0] < delta), key=lambda r: r[0])
    at = next(r for r in rows if r[0] == delta)
    jump = at[1] - below[1]
    env_jump = abs(at[2] - below[2])
    ok = dominates and concave and jump > 0.01 and env_jump < 1e-6
    report(11, ok, f"dominates={dominates}, max second difference={second.max():.2g}, "
                   f"zeta jump at delta={jump:.4f}, envelope jump={env_jump:.2g}")
    assert ok
