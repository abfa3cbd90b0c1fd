"""Performance bounds: Bayes envelopes, concave envelopes and excess-loss bounds.

Entropies are in nats unless a function says otherwise. The binary-alphabet
envelopes (zeta for the BSC, the Hamming clean-prediction bound) work in bits,
because that is the scale on which h_b maxes out at 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.linalg import cho_factor

from .channels import AWGN, BSC, Channel
from .core import HAMMING, SQUARED, InvalidArgument, ModelError, NoFeasibleBound, NumericalError

LN2 = math.log(2.0)
TWO_PI_E = 2.0 * math.pi * math.e


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    parameters: dict = field(default_factory=dict)
    formula: str = ""

    def as_row(self) -> dict:
        return {"name": self.name, **self.parameters, "value": self.value, "formula": self.formula}


# -- elementary functions ---------------------------------------------------

def binary_entropy(p, base: float = 2.0):
    """h_b(p), vectorised, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p > 0, p * np.log(p), 0.0) + np.where(p < 1, (1 - p) * np.log1p(-p), 0.0))
    h = h / math.log(base)
    return h if h.ndim else float(h)


def inverse_binary_entropy(h: float, base: float = 2.0) -> float:
    """The p in [0, 1/2] with h_b(p) = h."""
    hmax = math.log(2.0) / math.log(base)
    if not 0.0 <= h <= hmax + 1e-15:
        raise NoFeasibleBound(f"binary entropy {h} outside [0, {hmax}]")
    if h <= 0:
        return 0.0
    if h >= hmax:
        return 0.5
    return optimize.brentq(lambda p: binary_entropy(p, base) - h, 0.0, 0.5, xtol=1e-15, rtol=1e-15)


def binary_convolution(a: float, b: float) -> float:
    """a * b = a(1 - b) + b(1 - a), the crossover of two cascaded BSCs."""
    return a * (1 - b) + b * (1 - a)


def _check_delta(delta):
    if not 0.0 <= delta < 0.5:
        raise InvalidArgument(f"crossover must lie in [0, 1/2), got {delta}")


# -- Bayes envelopes and zeta -------------------------------------------------

def bayes_envelope_bsc(p: float, delta: float) -> float:
    """Least expected Hamming loss for estimating X from one BSC output with P(Y=1) = p."""
    _check_delta(delta)
    if not delta - 1e-12 <= p <= 1 - delta + 1e-12:
        raise InvalidArgument(f"P(Y=1)={p} is not reachable through a BSC({delta})")
    s = 1 - 2 * delta
    return max(0, min((p - delta) / s, (1 - p - delta) / s, delta))


def zeta_binary(d, delta: float):
    """zeta for the BSC in bits: h_b(delta * d) below delta and 1 from delta on."""
    _check_delta(delta)
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise InvalidArgument("loss level must be non-negative")
    out = np.where(d < delta, binary_entropy(np.clip(delta * (1 - d) + d * (1 - delta), 0, 1)), 1.0)
    return out if out.ndim else float(out)


def zeta_gaussian(d, sigma_n2: float):
    """zeta for AWGN with Gaussian input, nats: 0.5 ln(2 pi e sigma_n^4/(sigma_n^2 - d)), +inf past sigma_n^2."""
    if sigma_n2 <= 0:
        raise InvalidArgument("noise variance must be positive")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise InvalidArgument("loss level must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 0.5 * np.log(TWO_PI_E * sigma_n2 ** 2 / (sigma_n2 - d))
    out = np.where(d < sigma_n2, val, np.inf)
    return out if out.ndim else float(out)


# -- concave envelopes --------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeFunction:
    """Piecewise-linear function through (grid, values); ``vertices`` are the hull corners."""

    grid: np.ndarray
    values: np.ndarray
    vertices: tuple = ()

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise InvalidArgument("envelope needs matching 1-D grid and values with >= 2 points")
        if np.any(np.diff(g) <= 0):
            raise InvalidArgument("envelope grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    def __call__(self, d):
        return np.interp(d, self.grid, self.values)

    def inverse(self, level: float) -> float:
        """Smallest d with envelope(d) >= level, on the increasing part."""
        top = int(np.argmax(self.values))
        if level > self.values[top] + 1e-12:
            raise NoFeasibleBound(f"level {level} exceeds envelope maximum {self.values[top]}")
        if level <= self.values[0]:
            return float(self.grid[0])
        g, v = self.grid[:top + 1], self.values[:top + 1]
        j = int(np.searchsorted(v, level))  # v is non-decreasing up to the peak
        j = min(max(j, 1), top)
        if v[j] == v[j - 1]:
            return float(g[j - 1])
        return float(g[j - 1] + (level - v[j - 1]) * (g[j] - g[j - 1]) / (v[j] - v[j - 1]))


def upper_concave_envelope(values, grid) -> EnvelopeFunction:
    """Least concave majorant of the tabulated function (upper convex hull of its graph)."""
    g = np.asarray(grid, dtype=float)
    v = np.asarray(values(g) if callable(values) else values, dtype=float)
    if g.size < 2:
        raise InvalidArgument("need at least two grid points")
    if np.any(np.diff(g) <= 0):
        raise InvalidArgument("grid must be strictly increasing")
    if not np.all(np.isfinite(v)):
        raise InvalidArgument("envelope values must be finite; truncate the grid first")
    hull: list[int] = []
    for i in range(g.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or below the chord a -> i
            cross = (g[b] - g[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (g[i] - g[a])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    env = np.interp(g, g[hull], v[hull])
    env[hull] = v[hull]
    return EnvelopeFunction(g, env, tuple(hull))


@dataclass(frozen=True)
class ZetaBinaryEnvelope(EnvelopeFunction):
    """Closed-form concave envelope of zeta_binary.

    zeta is concave on [0, delta), so its envelope follows zeta up to the
    tangent point, then the tangent line up to (delta, 1), then stays at 1.
    ``grid``/``values`` tabulate the same function for plotting.
    """

    delta: float = 0.0
    tangent: float = 0.0

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        dl, t = self.delta, self.tangent
        if dl == 0.0:
            out = np.ones_like(d)
        else:
            zt = float(zeta_binary(t, dl))
            line = zt + (1.0 - zt) * (d - t) / (dl - t)
            out = np.where(d < t, zeta_binary(np.minimum(d, t), dl), np.where(d < dl, line, 1.0))
        return out if out.ndim else float(out)

    def inverse(self, level: float) -> float:
        dl, t = self.delta, self.tangent
        if level > 1.0 + 1e-12:
            raise NoFeasibleBound(f"level {level} exceeds envelope maximum 1")
        if dl == 0.0 or level <= binary_entropy(dl):
            return 0.0
        zt = float(zeta_binary(t, dl))
        if level <= zt:
            return (inverse_binary_entropy(level) - dl) / (1.0 - 2.0 * dl)
        return min(t + (level - zt) * (dl - t) / (1.0 - zt), dl)


def _zeta_tangent(delta: float) -> float:
    """Point where the line to (delta, 1) touches zeta from above; 0 if the chord from d = 0 already does."""
    s = 1.0 - 2.0 * delta

    def gap(t):
        p = delta + t * s
        return float(zeta_binary(t, delta)) + s * math.log2((1 - p) / p) * (delta - t) - 1.0

    if gap(0.0) <= 0.0:
        return 0.0
    return optimize.brentq(gap, 0.0, delta * (1 - 1e-12), xtol=1e-15)


@lru_cache(maxsize=64)
def zeta_binary_envelope(delta: float, points: int = 4096, d_max: float = 0.5) -> ZetaBinaryEnvelope:
    """Concave envelope of zeta_binary, exact at every d; tabulated on [0, d_max] with ``points`` nodes."""
    _check_delta(delta)
    t = _zeta_tangent(delta) if delta > 0 else 0.0
    grid = np.unique(np.concatenate([np.linspace(0.0, d_max, points), [delta, t]]))
    grid = grid[(grid >= 0) & (grid <= d_max)]
    env = ZetaBinaryEnvelope(grid, np.zeros_like(grid), (), delta, t)
    object.__setattr__(env, "values", np.asarray(env(grid), dtype=float))
    return env


def filtering_lower_bound(entropy_rate: float, envelope: EnvelopeFunction) -> float:
    """Least normalised filtering loss compatible with an output entropy rate: the envelope's inverse."""
    return envelope.inverse(entropy_rate)


def hmm_filtering_lower_bound(pi: float, delta: float) -> float:
    """Filtering lower bound for a Markov(pi) source through BSC(delta), from H(Y) >= h_b(pi * delta)."""
    return filtering_lower_bound(binary_entropy(binary_convolution(pi, delta)), zeta_binary_envelope(delta))


# -- Gaussian-input excess bounds ---------------------------------------------

def _f_scan(x):
    x = np.asarray(x, dtype=float)
    return np.log1p(x) - x / (x + 1.0)


def _g_scan(x):
    x = np.asarray(x, dtype=float)
    return x - np.log1p(x)


def _check_var(*vs):
    for v in vs:
        if not v > 0:
            raise InvalidArgument("variances must be positive")


def gaussian_filter_excess_bound(sigma_x2: float, sigma_n2: float) -> float:
    """sigma_n^2 f(snr) with f(x) = ln(1+x) - x/(x+1): bound on the excess filtering loss of any scan."""
    if sigma_x2 == 0:
        return 0.0
    _check_var(sigma_x2, sigma_n2)
    return float(sigma_n2 * _f_scan(sigma_x2 / sigma_n2))


def gaussian_excess_peak() -> tuple[float, float]:
    """(snr*, max_snr f(snr)/snr)."""
    res = optimize.minimize_scalar(lambda t: -float(_f_scan(math.exp(t))) / math.exp(t),
                                   bounds=(-5.0, 5.0), method="bounded",
                                   options={"xatol": 1e-10})
    return math.exp(res.x), -res.fun


def symbol_by_symbol_bound(sigma_x2: float, sigma_n2: float) -> float:
    """sigma_n^2 sigma_x^2/(sigma_x^2 + sigma_n^2), the largest single-symbol filtering loss."""
    if sigma_x2 == 0 or sigma_n2 == 0:
        return 0.0
    _check_var(sigma_x2, sigma_n2)
    return sigma_n2 * sigma_x2 / (sigma_x2 + sigma_n2)


def gaussian_scandiction_excess_bound(sigma_x2: float, sigma_n2: float) -> float:
    """sigma_n^2 g(snr) with g(x) = x - ln(1+x): excess noisy-prediction loss bound."""
    if sigma_x2 == 0:
        return 0.0
    _check_var(sigma_x2, sigma_n2)
    return float(sigma_n2 * _g_scan(sigma_x2 / sigma_n2))


# -- binary input over AWGN ---------------------------------------------------

def _log_cosh(z):
    a = np.abs(z)
    return a + np.log1p(np.exp(-2.0 * a)) - LN2


@lru_cache(maxsize=8)
def _hermite_e(n: int):
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / math.sqrt(2.0 * math.pi)


def _gauss_expect(fn, nodes: int):
    x, w = _hermite_e(nodes)
    return float(w @ fn(x))


def _expect_normal(fn, nodes: int = 96, tol: float = 1e-10) -> float:
    """E fn(Z), Z standard normal: Gauss-Hermite, falling back to adaptive quadrature."""
    a, b = _gauss_expect(fn, nodes), _gauss_expect(fn, 2 * nodes)
    if abs(a - b) <= tol:
        return b
    pdf = lambda z: float(fn(np.array([z]))[0]) * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    val, err = integrate.quad(pdf, -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12, limit=400)
    if err > 1e-8:
        raise NumericalError(f"quadrature did not converge: Gauss-Hermite {a} vs {b}, adaptive {val} +- {err}")
    return val


def binary_awgn_immse(snr: float) -> tuple[float, float]:
    """(I, mmse) for X uniform on {-1, +1} observed as sqrt(snr) X + N; I in nats."""
    if not snr > 0:
        raise InvalidArgument("snr must be positive")
    rs = math.sqrt(snr)
    e_lc = _expect_normal(lambda z: _log_cosh(snr - rs * z))
    e_th = _expect_normal(lambda z: np.tanh(snr - rs * z))
    return snr - e_lc, 1.0 - e_th


def fstar_binary_awgn(sigma_x2: float, sigma_n2: float) -> float:
    """2 sigma_n^2 I(snr) - sigma_x^2 mmse(snr) for a binary symmetric input."""
    _check_var(sigma_x2, sigma_n2)
    info, mmse = binary_awgn_immse(sigma_x2 / sigma_n2)
    return max(0.0, 2.0 * sigma_n2 * info - sigma_x2 * mmse)


def gaussian_immse(snr: float) -> tuple[float, float]:
    """(I, mmse) for standard Gaussian input: (0.5 ln(1+snr), 1/(1+snr))."""
    return 0.5 * math.log1p(snr), 1.0 / (1.0 + snr)


# -- binary filtering: epsilon_delta -------------------------------------------

@dataclass(frozen=True)
class MinimaxFit:
    epsilon: float
    a: float
    b: float


def _envelope_residual_grid(delta: float, points: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    kink = delta + delta * (1 - 2 * delta)  # where the rising branch meets delta
    p = np.unique(np.concatenate([np.linspace(delta, 0.5, points), [kink]]))
    p = p[(p >= delta) & (p <= 0.5)]
    f = np.minimum((p - delta) / (1 - 2 * delta), delta)
    return p, binary_entropy(p), f


def _fit_error(a: float, p, h, f, delta) -> tuple[float, float, float]:
    """Max |a h + b - f| with the optimal b for this a, as (error, b, max residual)."""
    r = f - a * h
    hi, lo = r.max(), r.min()
    # a h is concave, so each linear piece of f - a h is convex and its minimum
    # sits where a h'(p) equals the piece's slope; add those stationary points
    s = 1.0 / (1.0 - 2.0 * delta)
    extra = []
    if a > 0:
        pk = delta + delta * (1 - 2 * delta)
        p_star = 1.0 / (1.0 + 2.0 ** (s / a))  # h_b'(p) = log2((1-p)/p) = s/a
        if delta <= p_star <= pk:
            extra.append((p_star - delta) * s - a * binary_entropy(p_star))
        extra.append(delta - a * 1.0)  # the flat piece bottoms out at p = 1/2
    if extra:
        lo = min(lo, min(extra))
    b = 0.5 * (hi + lo)
    return 0.5 * (hi - lo), b, hi


def epsilon_delta(delta: float, points: int = 4096) -> MinimaxFit:
    """Best uniform fit of the BSC Bayes envelope on [delta, 1/2] by an affine function of h_b (bits)."""
    if not 0.0 < delta < 0.5:
        raise InvalidArgument(f"delta must lie in (0, 1/2), got {delta}")
    p, h, f = _envelope_residual_grid(delta, points)
    # the fitted slope never exceeds the envelope's rise delta over the entropy span 1 - h_b(delta)
    a_hi = 4.0 * delta / max(1.0 - float(binary_entropy(delta)), 1e-12) + 1.0
    res = optimize.minimize_scalar(lambda a: _fit_error(a, p, h, f, delta)[0], bounds=(0.0, a_hi),
                                   method="bounded", options={"xatol": 1e-12})
    err, b, _ = _fit_error(res.x, p, h, f, delta)
    return MinimaxFit(float(err), float(res.x), float(b))


def binary_filter_excess_bound(delta: float) -> float:
    """2 epsilon_delta: excess filtering loss of any scan over the optimal one, BSC Hamming case."""
    return 2.0 * epsilon_delta(delta).epsilon


def fit_max_error(delta: float, a: float, b: float, points: int = 65536) -> float:
    """max_p |a h_b(p) + b - f_delta(p)| on a fine grid (for checking a returned fit)."""
    p, h, f = _envelope_residual_grid(delta, points)
    return float(np.max(np.abs(a * h + b - f)))


# -- H+ bound and clean/noisy scandictability ---------------------------------

def hplus_excess_bound(h_plus: float, sigma_x2: float, sigma_n2: float) -> float:
    """symbol_by_symbol_bound - exp(2 H+)/(2 pi e); h_plus in nats, -inf allowed."""
    return symbol_by_symbol_bound(sigma_x2, sigma_n2) - math.exp(2.0 * h_plus) / TWO_PI_E


def gaussian_conditional_entropy(variance: float) -> float:
    """Differential entropy (nats) of a Gaussian with the given variance."""
    if variance <= 0:
        return -math.inf
    return 0.5 * math.log(TWO_PI_E * variance)


def conditional_variance(cov: np.ndarray, target: int, given: list[int]) -> float:
    """Var(Z_target | Z_given) for a jointly Gaussian vector with covariance ``cov``."""
    cov = np.asarray(cov, dtype=float)
    if not given:
        return float(cov[target, target])
    g = np.asarray(given)
    c = cov[np.ix_(g, g)]
    v = cov[g, target]
    return float(cov[target, target] - v @ np.linalg.solve(c, v))


def ar_row_hplus(rho: float, sigma_x2: float, sigma_n2: float, k: int) -> tuple[float, float]:
    """Lower estimate of H+ for a Gauss-AR(1) row: H(X_0 | Y_{-k..k}, X_{-k-1}, X_{k+1}).

    Returns (entropy in nats, the conditional variance it comes from).
    """
    n = 2 * k + 3  # X_{-k-1}..X_{k+1}
    idx = np.arange(n)
    cx = sigma_x2 * rho ** np.abs(idx[:, None] - idx[None, :])
    # joint vector: X_0..X_{n-1} then Y_1..Y_{n-2}
    m = n - 2
    cov = np.zeros((n + m, n + m))
    cov[:n, :n] = cx
    cov[n:, n:] = cx[1:-1, 1:-1] + sigma_n2 * np.eye(m)
    cov[:n, n:] = cx[:, 1:-1]
    cov[n:, :n] = cx[1:-1, :]
    var = conditional_variance(cov, k + 1, [0, n - 1] + list(range(n, n + m)))
    return gaussian_conditional_entropy(var), var


def clean_prediction_lower_bound(entropy_rate: float, loss_kind: str) -> float:
    """Least normalised clean prediction loss for a given entropy rate.

    Hamming: entropy_rate in bits, returns h_b^{-1}. Squared: nats, returns exp(2h)/(2 pi e).
    """
    if loss_kind == HAMMING:
        return inverse_binary_entropy(entropy_rate)
    if loss_kind == SQUARED:
        if not math.isfinite(entropy_rate):
            raise NoFeasibleBound("entropy rate must be finite")
        return math.exp(2.0 * entropy_rate) / TWO_PI_E
    raise InvalidArgument(f"unknown loss kind {loss_kind!r}")


def noisy_scandictability(clean_value_on_y: float, channel: Channel) -> float:
    """Noisy scandictability from the clean scandictability of Y.

    AWGN with squared loss subtracts sigma_n^2; BSC with Hamming loss maps U to (U - delta)/(1 - 2 delta).
    """
    if channel.kind == AWGN:
        return clean_value_on_y - channel.noise_variance
    d = channel.delta
    if clean_value_on_y < d - 1e-12:
        raise InvalidArgument(f"Hamming scandictability of Y cannot be below delta={d}")
    return (clean_value_on_y - d) / (1.0 - 2.0 * d)


def log_spectral_power(spectral_density: Callable, points: int = 256, rtol: float = 1e-6,
                       max_points: int = 4096) -> float:
    """exp of the mean of ln g over the torus [0, 2 pi)^2, refining the grid until stable."""
    prev = None
    n = points
    while n <= max_points:
        lam = 2.0 * np.pi * np.arange(n) / n
        g = np.asarray(spectral_density(lam[:, None], lam[None, :]), dtype=float)
        g = np.broadcast_to(g, (n, n))
        if np.any(~np.isfinite(g)) or np.any(g <= 0):
            raise ModelError("spectral density must be positive and finite on the torus "
                             "(a zero on a set of positive measure makes the log non-integrable)")
        val = math.exp(float(np.mean(np.log(g))))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev = val
        n *= 2
    raise NumericalError(f"log-spectral integral not converged at {max_points}^2 points")


def gaussian_noisy_scandictability(spectral_density_y: Callable, sigma_n2: float, points: int = 256) -> float:
    """sigma_u^2(Y) - sigma_n^2, where sigma_u^2 is the half-plane one-step prediction error."""
    return log_spectral_power(spectral_density_y, points) - sigma_n2


def ar_spectrum(rho: float, variance: float = 1.0, rho_col: float | None = None) -> Callable:
    """Spectral density of the separable AR field with covariance variance * rho^|dr| * rho_col^|dc|."""
    rc = rho if rho_col is None else rho_col

    def s(lam, r):
        return (1 - r * r) / (1 - 2 * r * np.cos(lam) + r * r)

    return lambda l1, l2: variance * s(l1, rho) * s(l2, rc)


def noisy_prediction_excess_bound_bsc(delta: float, clean_excess: float = 0.08) -> float:
    """2 eps_rho with eps_rho = eps_lH/(1 - 2 delta); eps_lH = 0.08 for binary Hamming prediction."""
    _check_delta(delta)
    return 2.0 * clean_excess / (1.0 - 2.0 * delta)


def singlet_regions(pi: float) -> tuple[float, float]:
    """(f(pi), d(pi)): say-what-you-see is the optimal filter iff delta <= f(pi), and
    optimal among filters that ignore the future iff delta <= d(pi)."""
    if not 0.0 < pi <= 0.5:
        raise InvalidArgument("pi must lie in (0, 1/2]")
    f = 0.5 * (1.0 - math.sqrt(max(1.0 - 4.0 * pi, 0.0)))
    d = 0.5 * (1.0 - math.sqrt(max(1.0 - 4.0 * (pi / (1.0 - pi)) ** 2, 0.0)))
    return f, d


def gaussian_mutual_information(model) -> float:
    """I(X; Y) = 0.5 ln det(I + Sigma_X/sigma_n^2), nats, via Cholesky."""
    cov = np.asarray(model.covariance, dtype=float)
    m = np.eye(cov.shape[0]) + cov / model.noise_variance
    try:
        c, _ = cho_factor(m, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky of I + Sigma/sigma^2 failed: {exc}") from exc
    return float(np.sum(np.log(np.diag(c))))


def hmm_entropy_rate_estimate(params, n: int = 200_000, seed: int = 0, bits: bool = True) -> float:
    """Plug-in estimate -(1/n) log P(Y^n) of the hidden-Markov output entropy rate.

    This is a simulation estimate, not a bound; h_b(pi * delta) is the rigorous lower bound.
    """
    from .channels import corrupt
    from .sources import markov_field
    y = corrupt(Channel.bsc(params.delta), markov_field(n, 1, params.pi, seed), seed + 1).flat()
    pi, d = params.pi, params.delta
    p, total = 0.5, 0.0
    for yt in y.tolist():
        py1 = p * (1 - d) + (1 - p) * d
        pr = py1 if yt else 1 - py1
        total -= math.log(pr)
        l1, l0 = (1 - d, d) if yt else (d, 1 - d)
        q = p * l1 / pr
        p = q * (1 - pi) + (1 - q) * pi
    rate = total / n
    return rate / LN2 if bits else rate
