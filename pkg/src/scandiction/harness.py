"""Experiment drivers: Monte Carlo losses, figure tables and inequality audits."""
from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import metadata

import numpy as np

from . import bounds as B
from .channels import Channel, corrupt
from .core import HAMMING, SQUARED, Field, InvalidArgument, LossFunction, ScandictionError
from .estimators import (FILTER, PREDICTOR, GaussianFieldModel, HmmParams, _masked_posterior,
                         ar_covariance, gaussian_sequential_conditioning, hmm_forward_filter,
                         hmm_two_pass_posteriors, make_estimator, run_scan_estimate)
from .oracle import JointModel, exhaustive_best_order, exhaustive_order_range, output_entropy
from .rng import PRNG_ID, site_uniforms, stream
from .scanners import hilbert_order, make_scanner, odds_then_evens_passes
from .sources import gaussian_field, iid_field, markov_chain, markov_field
from .universal import (DEFAULT_EXPERTS, ExpertSet, Scandictor, loss_martingale, regret_bound,
                        universal_scandict)


class ConfigError(ScandictionError, ValueError):
    pass


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


@dataclass
class ExperimentConfig:
    source: str = "markov"        # markov | iid | gauss-ar
    pi: float = 0.1               # Markov transition probability
    p: float = 0.5                # i.i.d. P(X = 1)
    channel: str = "bsc"          # bsc | awgn
    delta: float = 0.1
    sigma_x2: float = 1.0
    sigma_n2: float = 1.0
    rho: float = 0.6              # AR correlation per unit offset
    width: int = 64
    height: int = 64
    scan: str = "raster"
    estimator: str = "singlet"
    mode: str = FILTER
    loss: str = HAMMING
    trials: int = 10
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.width < 1 or self.height < 1:
            raise ConfigError("field dimensions must be positive")
        if self.mode == "predict":
            self.mode = PREDICTOR

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        known = {f.name: f.type for f in fields(cls)}
        out = {}
        for k, v in values.items():
            key = k.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {k!r}")
            default = getattr(cls, key)
            out[key] = type(default)(v) if not isinstance(v, type(default)) else v
        return cls(**out)

    def hash(self) -> str:
        blob = {k: v for k, v in self.to_dict().items() if k != "jobs"}
        return hashlib.sha256(json.dumps(blob, sort_keys=True).encode()).hexdigest()[:16]


def manifest(config: dict | None = None, seed: int | None = None, command: str = "",
             started: float | None = None) -> dict:
    cfg = config or {}
    blob = json.dumps({k: v for k, v in cfg.items() if k != "jobs"}, sort_keys=True, default=str)
    return {
        "command": command,
        "config_hash": hashlib.sha256(blob.encode()).hexdigest()[:16],
        "seed": seed,
        "prng": PRNG_ID,
        "version": version(),
        "wall_time_s": None if started is None else round(time.time() - started, 3),
    }


def trial_seeds(seed: int, trial: int) -> tuple[int, int]:
    """(source seed, channel seed) for one trial."""
    a, b = np.random.SeedSequence([int(seed), int(trial)]).generate_state(2, np.uint32)
    return int(a), int(b)


def parallel_map(fn, items, jobs: int = 1):
    """Order-stable map; jobs <= 1 runs in-process and gives identical results."""
    items = list(items)
    if jobs is None or jobs <= 0:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as ex:
        return list(ex.map(fn, items))


# -- Monte Carlo ------------------------------------------------------------

@dataclass
class MonteCarloResult:
    mean: float
    half_width: float
    per_trial: list
    profile: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"mean": self.mean, "half_width": self.half_width, "trials": len(self.per_trial)}


def mean_and_halfwidth(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v.mean()), 0.0
    return float(v.mean()), float(1.96 * v.std(ddof=1) / math.sqrt(v.size))


def _build_channel(cfg: ExperimentConfig) -> Channel:
    if cfg.channel == "bsc":
        return Channel.bsc(cfg.delta)
    if cfg.channel == "awgn":
        return Channel.awgn(cfg.sigma_n2)
    raise ConfigError(f"unknown channel {cfg.channel!r}")


def _build_source(cfg: ExperimentConfig, seed: int) -> Field:
    if cfg.source == "markov":
        return markov_field(cfg.width, cfg.height, cfg.pi, seed)
    if cfg.source == "iid":
        return iid_field(cfg.width, cfg.height, cfg.p, seed)
    if cfg.source == "gauss-ar":
        return gaussian_field(cfg.width, cfg.height, _gauss_cov(cfg), seed)
    raise ConfigError(f"unknown source {cfg.source!r}")


def _gauss_cov(cfg):
    return ar_covariance(cfg.width, cfg.height, cfg.rho, cfg.sigma_x2)


def _build_estimator(cfg: ExperimentConfig):
    channel = _build_channel(cfg)
    params = model = prior = None
    if cfg.source in ("markov", "iid") and cfg.channel == "bsc":
        params = HmmParams(cfg.pi if cfg.source == "markov" else 0.5, cfg.delta)
        prior = 0.5 if cfg.source == "markov" else cfg.p
    if cfg.source == "gauss-ar":
        prior = cfg.sigma_x2
        if cfg.estimator == "gauss-opt":
            model = GaussianFieldModel(_gauss_cov(cfg), cfg.sigma_n2)
    try:
        return make_estimator(cfg.estimator, params=params, channel=channel, model=model, prior=prior)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc


def _one_trial(args):
    cfg, t = args
    src_seed, ch_seed = trial_seeds(cfg.seed, t)
    clean = _build_source(cfg, src_seed)
    noisy = corrupt(_build_channel(cfg), clean, ch_seed)
    trace = run_scan_estimate(clean, noisy, make_scanner(cfg.scan), _build_estimator(cfg),
                              cfg.mode, LossFunction(cfg.loss))
    return trace.normalized, list(trace.step_losses)


def monte_carlo_loss(config: ExperimentConfig) -> MonteCarloResult:
    """Mean normalised cumulative loss over independent trials, with a 95% half-width."""
    try:
        make_scanner(config.scan)
        _build_estimator(config)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc
    out = parallel_map(_one_trial, [(config, t) for t in range(config.trials)], config.jobs)
    means = [o[0] for o in out]
    profile = np.mean(np.array([o[1] for o in out]), axis=0).tolist()
    m, hw = mean_and_halfwidth(means)
    return MonteCarloResult(m, hw, means, profile)


# -- the odds-then-evens study ----------------------------------------------

@dataclass
class HmmStudy:
    pi: float
    delta: float
    symbols: int
    trivial: float
    trivial_hw: float
    odds_then_evens: float
    odds_then_evens_hw: float
    improvement: float
    improvement_hw: float
    window: float
    lower_bound: float
    excess_bound: float

    def as_dict(self):
        return asdict(self)


def _decide(post, y):
    return np.where(post > 0.5, 1, np.where(post < 0.5, 0, y))


def _window1_two_pass(y, params: HmmParams) -> np.ndarray:
    """Decisions of the k = 1 window filter on the odds-then-evens scan, batched by row.

    First-pass (even) sites see no revealed neighbour, so they say what they
    see; second-pass sites use the three-symbol window."""
    R, n = y.shape
    table = {}
    for a, b, c in itertools.product((0, 1), repeat=3):
        table[a, b, c] = _masked_posterior([a, b, c], [True] * 3, 1, params, include_i=True)
    dec = y.copy()
    for i in range(1, n, 2):
        if i + 1 < n:
            post = np.array([table[a, b, c] for a, b, c in zip(y[:, i - 1], y[:, i], y[:, i + 1])])
        else:
            post = np.array([_masked_posterior([a, b], [True] * 2, 1, params, include_i=True)
                             for a, b in zip(y[:, i - 1], y[:, i])])
        dec[:, i] = _decide(post, y[:, i])
    return dec


def odds_then_evens_study(pi: float, delta: float, symbols: int = 10 ** 6, chains: int = 100,
                          k: int = 1, seed: int = 0) -> HmmStudy:
    """Trivial scan with the optimal (forward) filter against the odds-then-evens scan
    with exact filtering on everything revealed so far, on a Markov(pi) chain through BSC(delta).

    The symbols are split into ``chains`` independent rows; half-widths come
    from the spread of per-row error rates (paired for the improvement).
    """
    params = HmmParams(pi, delta)
    n = symbols // chains
    x = markov_chain(chains * n, pi, seed).reshape(chains, n)
    u = site_uniforms(seed + 1, chains * n).reshape(chains, n)
    y = (x ^ (u < delta)).astype(np.int64)
    err_triv = (_decide(hmm_forward_filter(y, params), y) != x).mean(axis=1)
    err_ote = (_decide(hmm_two_pass_posteriors(y, k, params), y) != x).mean(axis=1)
    err_win = (_window1_two_pass(y, params) != x).mean() if k == 1 else float("nan")
    t, thw = mean_and_halfwidth(err_triv)
    o, ohw = mean_and_halfwidth(err_ote)
    d, dhw = mean_and_halfwidth(err_triv - err_ote)
    return HmmStudy(pi, delta, chains * n, t, thw, o, ohw, d, dhw, float(err_win),
                    B.hmm_filtering_lower_bound(pi, delta), B.binary_filter_excess_bound(delta))


# -- figure tables ------------------------------------------------------------

DELTA_GRID = np.round(np.arange(0.01, 0.495, 0.01), 2)
SNR_GRID = np.logspace(-2, 2, 200)
FIGURES = ("zeta_envelope", "gauss_excess", "binary_awgn_excess", "binary_filter_bounds",
           "hmm_region", "hmm_diff")
FIGURE_NUMBERS = {1: "zeta_envelope", 2: "gauss_excess", 3: "binary_awgn_excess",
                  4: "binary_filter_bounds", 5: "hmm_region", 6: "hmm_diff"}


def _hmm_cell(args):
    pi, delta, symbols, seed = args
    s = odds_then_evens_study(pi, delta, symbols, chains=100, seed=seed)
    return s


def figure_data(which: str, *, delta: float = 0.25, symbols: int = 10 ** 6, step: float = 0.01,
                seed: int = 0, jobs: int = 1) -> tuple[list[str], list[list]]:
    """(header, rows) for one figure's data."""
    if which == "zeta_envelope":
        env = B.zeta_binary_envelope(delta)
        d = np.unique(np.concatenate([np.linspace(0, 0.5, 501), [delta - 1e-9, delta]]))
        return ["d", "zeta", "zeta_bar"], [[float(a), float(B.zeta_binary(a, delta)), float(env(a))] for a in d]
    if which == "gauss_excess":
        rows = [[s, float(B._f_scan(s)) / s, 1.0 / (1.0 + s), float(B._g_scan(s)) / s] for s in SNR_GRID]
        return ["snr", "filter_excess_over_var", "symbol_by_symbol_over_var", "scandiction_excess_over_var"], rows
    if which == "binary_awgn_excess":
        rows = []
        for s in SNR_GRID:
            info, mmse = B.binary_awgn_immse(s)
            rows.append([s, B.fstar_binary_awgn(s, 1.0) / s, mmse, info])
        return ["snr", "fstar_over_var", "symbol_by_symbol_over_var", "mutual_information_nats"], rows
    if which == "binary_filter_bounds":
        return ["delta", "two_eps_delta", "singlet"], [[float(d), B.binary_filter_excess_bound(d), float(d)]
                                                       for d in DELTA_GRID]
    if which in ("hmm_region", "hmm_diff"):
        grid = np.round(np.arange(step, 0.5, step), 6)
        cells = [(float(p), float(d)) for p in grid for d in grid]
        if which == "hmm_diff":
            cells = [(p, d) for p, d in cells if d < B.singlet_regions(p)[0]]
        jobs_args = [(p, d, symbols, seed + i) for i, (p, d) in enumerate(cells)]
        studies = parallel_map(_hmm_cell, jobs_args, jobs)
        if which == "hmm_diff":
            return (["pi", "delta", "trivial", "odds_then_evens", "difference"],
                    [[s.pi, s.delta, s.trivial, s.odds_then_evens, s.improvement] for s in studies])
        rows = []
        for s in studies:
            f, dd = B.singlet_regions(s.pi)
            lo = s.improvement - 2 * s.improvement_hw
            status = "improves" if lo > 0 else ("worse" if s.improvement + 2 * s.improvement_hw < 0
                                                else "inconclusive")
            rows.append([s.pi, s.delta, s.improvement, s.improvement_hw, status, f, dd])
        return ["pi", "delta", "improvement", "half_width", "status", "f_pi", "d_pi"], rows
    raise InvalidArgument(f"unknown figure {which!r}; expected one of {', '.join(FIGURES)}")


# -- audits -----------------------------------------------------------------

@dataclass
class Check:
    label: str
    value: float
    limit: float
    passed: bool
    margin: float


@dataclass
class AuditReport:
    name: str
    checks: list
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def min_margin(self) -> float:
        return min(c.margin for c in self.checks)

    def rows(self):
        return [[c.label, c.value, c.limit, c.margin, "pass" if c.passed else "FAIL"] for c in self.checks]


def _le(label, value, limit):
    return Check(label, float(value), float(limit), bool(value <= limit), float(limit - value))


def _ge(label, value, limit):
    return Check(label, float(value), float(limit), bool(value >= limit), float(value - limit))


def _abs_le(label, value, limit):
    return Check(label, float(value), float(limit), bool(abs(value) <= limit), float(limit - abs(value)))


def _scan_orders(w, h, count, seed):
    """Named fixed orders followed by seeded random permutations; ``count`` in total."""
    named = [make_scanner(s).reset(w, h) for s in ("raster", "snake", "hilbert", "ote:1", "ote:2", "checker")]
    orders = [[tuple(x) for x in sc._order] for sc in named]
    rng = stream(seed, "scanner", w, h, 99)
    while len(orders) < count:
        orders.append([divmod(int(i), w) for i in rng.permutation(w * h)])
    return orders[:count]


def _gauss_losses(model, orders, w, mode):
    n = model.size
    return np.array([sum(s.variance for s in gaussian_sequential_conditioning(model, o, mode, w)) / n
                     for o in orders])


def audit_thm2(sizes=(4, 6), rho: float = 0.8, sigma_x2: float = 1.0, sigma_n2: float = 1.0,
               scans: int = 12, seed: int = 0) -> AuditReport:
    """Scan sensitivity of Gaussian filtering on AR fields, from exact per-scan losses."""
    checks = []
    bound = B.gaussian_filter_excess_bound(sigma_x2, sigma_n2)
    pairs_total = 0
    for n in sizes:
        model = GaussianFieldModel(ar_covariance(n, n, rho, sigma_x2), sigma_n2)
        orders = _scan_orders(n, n, scans, seed + n)
        filt = _gauss_losses(model, orders, n, FILTER)
        pred = _gauss_losses(model, orders, n, PREDICTOR)
        pairs = list(itertools.combinations(range(len(orders)), 2))
        pairs_total += len(pairs)
        gap = max(abs(filt[i] - filt[j]) for i, j in pairs)
        checks.append(_le(f"{n}x{n} max |gap| over {len(pairs)} scan pairs vs sigma_n2 f(snr)", gap, bound))
        upper = 2 * sigma_n2 * B.gaussian_mutual_information(model) / model.size
        checks.append(_le(f"{n}x{n} max filter loss vs 2 sigma_n2 I / n^2", filt.max(), upper))
        checks.append(_ge(f"{n}x{n} min predictor loss vs 2 sigma_n2 I / n^2", pred.min(), upper))
        checks.append(_ge(f"{n}x{n} min filter loss vs 2 sigma_n2 I / n^2 - sigma_n2 f(snr)",
                          filt.min(), upper - bound))
        checks.append(_le(f"{n}x{n} max predictor loss vs 2 sigma_n2 I / n^2 + sigma_n2 g(snr)",
                          pred.max(), upper + B.gaussian_scandiction_excess_bound(sigma_x2, sigma_n2)))
    return AuditReport("thm2", checks, {"rho": rho, "sigma_x2": sigma_x2, "sigma_n2": sigma_n2,
                                        "scan_pairs": pairs_total, "seed": seed})


def audit_lemma_sq(width: int = 8, rho: float = 0.7, sigma_x2: float = 1.0, sigma_n2: float = 0.5,
                   seed: int = 0) -> AuditReport:
    """Noisy squared-error scandiction equals clean scandiction of Y minus sigma_n^2, per scan."""
    cov = ar_covariance(width, width, rho, sigma_x2)
    model = GaussianFieldModel(cov, sigma_n2)
    cy = model.y_covariance
    checks = []
    for k, order in enumerate(_scan_orders(width, width, 4, seed)):
        idx = [r * width + c for r, c in order]
        noisy = sum(s.variance for s in gaussian_sequential_conditioning(model, order, PREDICTOR, width))
        clean_y = sum(B.conditional_variance(cy, s, idx[:t]) for t, s in enumerate(idx))
        n = width * width
        checks.append(_abs_le(f"scan {k}: noisy - (clean_Y - sigma_n2), normalised",
                              noisy / n - (clean_y / n - sigma_n2), 1e-9))
    return AuditReport("lemma_sq", checks, {"width": width, "rho": rho, "sigma_n2": sigma_n2})


def audit_prop_binary(params=((0.1, 0.1), (0.1, 0.25), (0.25, 0.1), (0.25, 0.25)),
                      symbols: int = 200_000, seed: int = 0) -> AuditReport:
    """P(F != X) = (P(F != Y) - delta)/(1 - 2 delta) for a predictor F of the past."""
    checks = []
    for j, (pi, delta) in enumerate(params):
        x = markov_chain(symbols, pi, seed + 2 * j)
        y = x ^ (site_uniforms(seed + 2 * j + 1, symbols) < delta)
        post = hmm_forward_filter(y, HmmParams(pi, delta))
        pred = np.empty(symbols)
        pred[0] = 0.5
        pred[1:] = post[:-1] * (1 - pi) + (1 - post[:-1]) * pi
        f = (pred > 0.5).astype(np.int8)
        dstat = (f != x).astype(float) - ((f != y).astype(float) - delta) / (1 - 2 * delta)
        m = float(dstat.mean())
        sigma = float(dstat.std(ddof=1) / math.sqrt(symbols))
        checks.append(_abs_le(f"pi={pi} delta={delta}: P(F!=X) - (P(F!=Y)-delta)/(1-2delta) [3 sigma]",
                              m, 3 * sigma))
    return AuditReport("prop_binary", checks, {"symbols": symbols, "seed": seed})


def audit_martingale(draws: int = 10_000, width: int = 8, pi: float = 0.2, delta: float = 0.2,
                     expert: str = "raster/last", seed: int = 0) -> AuditReport:
    """Delta_t = L_t - L_hat_t has zero mean and uncorrelated increments over channel draws."""
    clean = markov_field(width, width, pi, seed)
    ex = Scandictor.from_spec(expert, delta)
    ch = Channel.bsc(delta)
    D = np.array([loss_martingale(clean, corrupt(ch, clean, seed + 1 + i), ex, delta) for i in range(draws)])
    n = width * width
    checks = []
    for t in (1, n // 2, n):
        col = D[:, t - 1]
        sigma = col.std(ddof=1) / math.sqrt(draws)
        checks.append(_abs_le(f"mean Delta at t={t} [4 sigma]", float(col.mean()), 4 * sigma))
    inc = np.diff(np.concatenate([np.zeros((draws, 1)), D], axis=1), axis=1)
    prod = (inc[:, :-1] * inc[:, 1:]).sum(axis=1)
    sigma = prod.std(ddof=1) / math.sqrt(draws)
    checks.append(_abs_le("lag-1 increment cross moment summed over t [4 sigma]", float(prod.mean()), 4 * sigma))
    mid = n // 2
    r = float(np.corrcoef(inc[:, mid - 1], inc[:, mid])[0, 1])
    checks.append(_abs_le(f"lag-1 increment correlation at t={mid} [4/sqrt(N)]", r, 4 / math.sqrt(draws)))
    return AuditReport("martingale", checks, {"draws": draws, "expert": expert, "pi": pi, "delta": delta})


def audit_regret(trials: int = 100, n: int = 32, m: int = 4, pi: float = 0.1, delta: float = 0.1,
                 experts=DEFAULT_EXPERTS, seed: int = 0, jobs: int = 1) -> AuditReport:
    """Realised regret of block-wise exponential weighting against its bound, on every trial."""
    ex = ExpertSet.from_specs(experts, delta)
    regrets = parallel_map(_regret_trial, [(ex, n, m, pi, delta, seed, t) for t in range(trials)], jobs)
    bound = regret_bound(n, m, ex.size, ex.l_max)
    violations = sum(r > bound for r in regrets)
    checks = [_le(f"max regret over {trials} trials vs m(n+m) sqrt(ln lambda) l_max/sqrt 2",
                  max(regrets), bound),
              _le("violations", violations, 0)]
    return AuditReport("regret", checks, {"trials": trials, "n": n, "m": m, "lambda": ex.size,
                                          "mean_regret": float(np.mean(regrets)), "seed": seed})


def _regret_trial(args):
    ex, n, m, pi, delta, seed, t = args
    src, ch = trial_seeds(seed, t)
    x = markov_field(n, n, pi, src)
    y = corrupt(Channel.bsc(delta), x, ch)
    return universal_scandict(y, ex, delta, m=m, seed=src ^ ch, clean_for_scoring=x).regret


def audit_thm1(cells=((0.1, 0.1), (0.05, 0.2), (0.2, 0.05)), symbols: int = 200_000,
               seed: int = 0) -> AuditReport:
    """Filtering losses never fall below the envelope bound, by simulation and by exact enumeration."""
    checks = []
    for pi, delta in cells:
        s = odds_then_evens_study(pi, delta, symbols, chains=100, seed=seed)
        for label, loss, hw in (("trivial", s.trivial, s.trivial_hw), ("ote", s.odds_then_evens, s.odds_then_evens_hw)):
            checks.append(_ge(f"pi={pi} delta={delta} {label} loss + half-width vs lower bound",
                              loss + hw, s.lower_bound))
    for w, h, pi, delta in ((3, 2, 0.1, 0.1), (4, 2, 0.2, 0.15)):
        model = JointModel.markov(w, h, pi, delta)
        _, best = exhaustive_best_order(model, FILTER)
        rate = output_entropy(model) / model.site_count
        lb = B.filtering_lower_bound(rate, B.zeta_binary_envelope(delta))
        checks.append(_ge(f"{w}x{h} exact best-order loss vs envelope inverse of H(Y)/|B|",
                          best / model.site_count, lb))
    return AuditReport("thm1", checks, {"symbols": symbols, "seed": seed})


def audit_thm4(seed: int = 0, symbols: int = 200_000) -> AuditReport:
    """Loss differences between scans with optimal filters stay within 2 eps_delta."""
    checks = []
    for w, h, pi, delta in ((6, 1, 0.1, 0.1), (3, 2, 0.1, 0.25), (4, 2, 0.2, 0.1)):
        model = JointModel.markov(w, h, pi, delta)
        best, worst = exhaustive_order_range(model, FILTER)
        checks.append(_le(f"{w}x{h} pi={pi} delta={delta}: worst - best order loss vs 2 eps",
                          (worst - best) / model.site_count, B.binary_filter_excess_bound(delta)))
    s = odds_then_evens_study(0.1, 0.1, symbols, seed=seed)
    checks.append(_le("odds-then-evens improvement at pi=delta=0.1 vs 2 eps", s.improvement, s.excess_bound))
    return AuditReport("thm4", checks, {"seed": seed})


AUDITS = {"thm1": audit_thm1, "thm2": audit_thm2, "thm4": audit_thm4, "lemma_sq": audit_lemma_sq,
          "prop_binary": audit_prop_binary, "regret": audit_regret, "martingale": audit_martingale}


def theorem_audit(which: str, **kwargs) -> AuditReport:
    if which not in AUDITS:
        raise InvalidArgument(f"unknown audit {which!r}; expected one of {', '.join(AUDITS)}")
    return AUDITS[which](**kwargs)
