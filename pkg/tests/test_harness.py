import numpy as np
import pytest

from scandiction.estimators import FILTER, GaussianFieldModel, ar_covariance, gaussian_sequential_conditioning
from scandiction.harness import (ConfigError, ExperimentConfig, figure_data, manifest, monte_carlo_loss,
                                 odds_then_evens_study, parallel_map, theorem_audit, trial_seeds)
from scandiction.scanners import make_scanner, scan_order


def _square(x):
    return x * x


def test_config_from_mapping_and_hash():
    cfg = ExperimentConfig.from_mapping({"scan": "snake", "delta": "0.2", "width": "8", "jobs": "3"})
    assert cfg.delta == 0.2 and cfg.width == 8
    assert cfg.hash() == ExperimentConfig.from_mapping({"scan": "snake", "delta": 0.2, "width": 8}).hash()
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"colour": "red"})
    with pytest.raises(ConfigError):
        ExperimentConfig(trials=0)


def test_manifest_fields():
    m = manifest({"a": 1}, 7, "run", None)
    assert set(m) == {"command", "config_hash", "seed", "prng", "version", "wall_time_s"}
    assert m["config_hash"] == manifest({"a": 1, "jobs": 9}, 7, "run", None)["config_hash"]


def test_trial_seeds_distinct_and_stable():
    seeds = {trial_seeds(0, t) for t in range(200)}
    assert len(seeds) == 200
    assert trial_seeds(3, 4) == trial_seeds(3, 4)


def test_parallel_map_is_order_stable():
    xs = list(range(20))
    assert parallel_map(_square, xs, 1) == parallel_map(_square, xs, 3) == [x * x for x in xs]


def test_monte_carlo_noiseless_filter():
    res = monte_carlo_loss(ExperimentConfig(delta=0.0, width=8, height=8, trials=5))
    assert (res.mean, res.half_width) == (0.0, 0.0)


def test_monte_carlo_say_what_you_see():
    res = monte_carlo_loss(ExperimentConfig(delta=0.25, width=100, height=100, trials=100, jobs=4))
    assert abs(res.mean - 0.25) < 0.003


def test_monte_carlo_jobs_invariant():
    cfg = dict(scan="hilbert", estimator="hmm-forward", width=12, height=12, trials=6, seed=4)
    a = monte_carlo_loss(ExperimentConfig(jobs=1, **cfg))
    b = monte_carlo_loss(ExperimentConfig(jobs=3, **cfg))
    assert a.per_trial == b.per_trial


def test_gaussian_monte_carlo_matches_exact_variances():
    cfg = ExperimentConfig(source="gauss-ar", channel="awgn", rho=0.7, sigma_x2=1.0, sigma_n2=0.5,
                           width=6, height=6, scan="snake", estimator="gauss-opt", loss="squared",
                           trials=400, seed=1, jobs=4)
    res = monte_carlo_loss(cfg)
    model = GaussianFieldModel(ar_covariance(6, 6, 0.7, 1.0), 0.5)
    order = scan_order(make_scanner("snake"), 6, 6)
    exact = np.mean([s.variance for s in gaussian_sequential_conditioning(model, order, FILTER, 6)])
    assert abs(res.mean - exact) < 2 * res.half_width + 1e-3


def test_study_small_run_has_expected_ordering():
    s = odds_then_evens_study(0.1, 0.1, symbols=100_000, seed=2)
    assert s.lower_bound < s.odds_then_evens < s.trivial
    assert s.improvement < s.excess_bound


def test_zeta_figure_rows():
    header, rows = figure_data("zeta_envelope", delta=0.25)
    assert header == ["d", "zeta", "zeta_bar"]
    row = next(r for r in rows if abs(r[0] - 0.3) < 1e-12)
    assert row[1] == 1.0 and row[2] == 1.0


def test_hmm_diff_figure_cell():
    header, rows = figure_data("hmm_diff", symbols=100_000, step=0.1, seed=0)
    row = next(r for r in rows if r[0] == 0.1 and r[1] == 0.1)
    assert row[4] == pytest.approx(0.021, abs=0.005)
    assert all(r[1] < 0.5 * (1 - np.sqrt(max(1 - 4 * r[0], 0))) for r in rows)


def test_figure_tables_have_consistent_rows():
    for which in ("gauss_excess", "binary_awgn_excess", "binary_filter_bounds"):
        header, rows = figure_data(which)
        assert rows and all(len(r) == len(header) for r in rows)


@pytest.mark.parametrize("which", ["lemma_sq", "thm2"])
def test_fast_audits_pass(which):
    rep = theorem_audit(which)
    assert rep.passed and rep.min_margin > 0
