"""Filters and predictors driven site by site along a scan.

Binary estimators return the posterior P(x = 1 | revealed data); real-valued
estimators return the conditional mean. ``decide`` turns that belief into an
estimate for the loss in use.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .channels import AWGN, BSC, Channel
from .core import (BINARY, HAMMING, REAL, SQUARED, Field, InvalidArgument, LossFunction,
                   ModelError, NumericalError, ScanTrace, Site, make_trace)
from .scanners import Scanner

FILTER = "filter"
PREDICTOR = "predictor"


@dataclass(frozen=True)
class HmmParams:
    """Symmetric binary first-order Markov source observed through a BSC."""

    pi: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.pi <= 0.5:
            raise InvalidArgument(f"transition probability must lie in (0, 1/2], got {self.pi}")
        if not 0.0 <= self.delta < 0.5:
            raise InvalidArgument(f"crossover must lie in [0, 1/2), got {self.delta}")

    @property
    def transition(self) -> np.ndarray:
        return np.array([[1 - self.pi, self.pi], [self.pi, 1 - self.pi]])

    def emission(self, y) -> np.ndarray:
        """Column vector (P(y|x=0), P(y|x=1))."""
        d = self.delta
        return np.array([1 - d, d]) if y == 0 else np.array([d, 1 - d])


@dataclass(frozen=True)
class GaussianFieldModel:
    covariance: np.ndarray
    noise_variance: float

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ModelError("covariance must be square")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ModelError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-10:
            raise ModelError("covariance is not positive semidefinite")
        if not self.noise_variance > 0:
            raise ModelError("noise variance must be positive")
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @property
    def size(self) -> int:
        return self.covariance.shape[0]

    @property
    def y_covariance(self) -> np.ndarray:
        return self.covariance + self.noise_variance * np.eye(self.size)


def stationary_covariance(width: int, height: int, autocorr: Callable[[int, int], float],
                          variance: float = 1.0) -> np.ndarray:
    """Covariance over row-major sites from an autocorrelation of the offset (drow, dcol).

    Negative eigenvalues (an invalid autocorrelation) are clipped to zero with a warning.
    """
    rows, cols = np.divmod(np.arange(width * height), width)
    dr = rows[:, None] - rows[None, :]
    dc = cols[:, None] - cols[None, :]
    cov = variance * np.vectorize(autocorr, otypes=[float])(dr, dc)
    cov = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(cov)
    if w.min() < -1e-10:
        warnings.warn(f"autocorrelation not positive definite (min eigenvalue {w.min():.3g}); clipping")
        cov = (v * np.clip(w, 0, None)) @ v.T
    return cov


def ar_covariance(width: int, height: int, rho: float = 0.6, variance: float = 1.0,
                  rho_col: float | None = None) -> np.ndarray:
    """Separable first-order AR field: variance * rho_row^|dr| * rho_col^|dc|."""
    rc = rho if rho_col is None else rho_col
    return stationary_covariance(width, height, lambda dr, dc: rho ** abs(dr) * rc ** abs(dc),
                                 variance)


# -- scalar estimators ------------------------------------------------------

def singlet_filter(y, channel: Channel, prior) -> float:
    """Best estimate of x from the current observation alone.

    For a BSC ``prior`` is P(X = 1) and the Hamming-optimal decision is
    returned. For AWGN ``prior`` is the input variance (zero-mean Gaussian)
    and the scalar Wiener estimate is returned.
    """
    if channel.kind == BSC:
        p1 = float(prior)
        d = channel.delta
        w1 = p1 * ((1 - d) if y == 1 else d)
        w0 = (1 - p1) * (d if y == 1 else (1 - d))
        if w1 == w0:
            return float(y)
        return 1.0 if w1 > w0 else 0.0
    sx2 = float(prior)
    return float(y) * sx2 / (sx2 + channel.noise_variance)


def binary_awgn_conditional_mean(y, snr: float):
    """E[X | sqrt(snr) X + N = y] for X uniform on {-1, +1}."""
    if not snr > 0:
        raise InvalidArgument("snr must be positive")
    return np.tanh(math.sqrt(snr) * np.asarray(y, dtype=float))


# -- hidden Markov posteriors -----------------------------------------------

def hmm_forward_filter(y_seq, params: HmmParams) -> np.ndarray:
    """P(x_t = 1 | y_1..y_t) for every t (normalised forward recursion).

    A 2-D input is treated as independent chains, one per row.
    """
    y = np.asarray(y_seq, dtype=np.int64)
    if y.size and not np.all((y == 0) | (y == 1)):
        raise InvalidArgument("observations must be binary")
    pi, d = params.pi, params.delta
    if y.ndim == 2:
        out = np.empty(y.shape)
        p = np.full(y.shape[0], 0.5)
        for t in range(y.shape[1]):
            l1 = np.where(y[:, t] == 1, 1 - d, d)
            q = p * l1 / (p * l1 + (1 - p) * (1 - l1))
            out[:, t] = q
            p = q * (1 - pi) + (1 - q) * pi
        return out
    out = np.empty(y.size)
    p = 0.5  # predictive P(x_t = 1 | y^{t-1})
    for t, yt in enumerate(y.tolist()):
        l1, l0 = (1 - d, d) if yt else (d, 1 - d)
        a1, a0 = p * l1, (1 - p) * l0
        q = a1 / (a1 + a0)
        out[t] = q
        p = q * (1 - pi) + (1 - q) * pi
    return out


def _masked_posterior(y, mask, i, params: HmmParams, include_i: bool) -> float:
    """P(x_i = 1 | y_j for masked j) on a stationary symmetric chain."""
    T = params.transition
    a = np.array([0.5, 0.5])
    for j in range(i):
        if mask[j]:
            a = a * params.emission(y[j])
        a = a @ T
        a /= a.sum()
    b = np.ones(2)
    for j in range(len(y) - 1, i, -1):
        if mask[j]:
            b = b * params.emission(y[j])
        b = T @ b
        b /= b.sum()
    p = a * b
    if include_i:
        p = p * params.emission(y[i])
    return float(p[1] / p.sum())


def hmm_window_posterior(y: Sequence[int], i: int, k: int, params: HmmParams) -> float:
    """P(x_i = 1 | y_{i-k}..y_{i+k}), the window truncated at the sequence ends."""
    n = len(y)
    if not 0 <= i < n:
        raise InvalidArgument(f"index {i} outside sequence of length {n}")
    lo, hi = max(0, i - k), min(n - 1, i + k)
    seg = list(y[lo:hi + 1])
    return _masked_posterior(seg, [True] * len(seg), i - lo, params, include_i=True)


def hmm_two_pass_posteriors(y, k: int, params: HmmParams) -> np.ndarray:
    """Exact filter posteriors along the odds-then-evens scan of a chain.

    A first-pass site is estimated from the first-pass observations up to it.
    A second-pass site i is estimated from every observation revealed when
    it is reached: all first-pass sites, the second-pass sites before i, and
    y_i itself. Returned in natural index order; a 2-D input is treated as
    independent chains, one per row.
    """
    if k < 1:
        raise InvalidArgument("odds-then-evens needs k >= 1")
    arr = np.asarray(y, dtype=np.int64)
    if arr.ndim == 2:
        return _two_pass_batch(arr, k, params)
    ys = arr.tolist()
    n = len(ys)
    pi, d = params.pi, params.delta
    first = [(j % (k + 1)) != k for j in range(n)]
    out = np.empty(n)
    # pass one: forward recursion over first-pass sites only
    p = 0.5
    for j in range(n):
        if first[j]:
            l1, l0 = (1 - d, d) if ys[j] else (d, 1 - d)
            q = p * l1 / (p * l1 + (1 - p) * l0)
            out[j] = q
        else:
            q = p
        p = q * (1 - pi) + (1 - q) * pi
    # pass two: forward over every site, backward over first-pass sites only
    fwd = hmm_forward_filter(arr, params)
    r = 0.5  # normalised backward message, component x = 1
    for j in range(n - 1, -1, -1):
        if not first[j]:
            f = fwd[j]
            out[j] = f * r / (f * r + (1 - f) * (1 - r))
            b1, b0 = r, 1 - r
        else:
            l1, l0 = (1 - d, d) if ys[j] else (d, 1 - d)
            b1, b0 = r * l1, (1 - r) * l0
        r = pi + (1 - 2 * pi) * b1 / (b0 + b1)
    return out


def _two_pass_batch(y: np.ndarray, k: int, params: HmmParams) -> np.ndarray:
    pi, d = params.pi, params.delta
    R, n = y.shape
    lik1 = np.where(y == 1, 1 - d, d)
    out = np.empty(y.shape)
    p = np.full(R, 0.5)
    for j in range(n):
        if j % (k + 1) != k:
            l1 = lik1[:, j]
            p = p * l1 / (p * l1 + (1 - p) * (1 - l1))
            out[:, j] = p
        p = p * (1 - pi) + (1 - p) * pi
    fwd = hmm_forward_filter(y, params)
    r = np.full(R, 0.5)
    for j in range(n - 1, -1, -1):
        if j % (k + 1) == k:
            f = fwd[:, j]
            out[:, j] = f * r / (f * r + (1 - f) * (1 - r))
            b1 = r
        else:
            l1 = lik1[:, j]
            b1 = r * l1 / (r * l1 + (1 - r) * (1 - l1))
        r = pi + (1 - 2 * pi) * b1
    return out


# -- sequential Gaussian conditioning ---------------------------------------

@dataclass(frozen=True)
class ConditioningStep:
    site_index: int
    coefficients: np.ndarray  # weights on the conditioning observations, in scan order
    variance: float           # Var(X_s | conditioning set)
    innovation_variance: float  # Var(Y_s | observations before s)


class _IncrementalCholesky:
    """Cholesky factor of Sigma_YY restricted to the scan prefix, grown one site at a time."""

    def __init__(self, sigma_y: np.ndarray):
        self.sigma_y = sigma_y
        n = sigma_y.shape[0]
        self.L = np.zeros((n, n))
        self.idx: list[int] = []

    def project(self, s: int) -> np.ndarray:
        t = len(self.idx)
        if t == 0:
            return np.zeros(0)
        return solve_triangular(self.L[:t, :t], self.sigma_y[self.idx, s], lower=True,
                                check_finite=False)

    def append(self, s: int, l: np.ndarray) -> None:
        t = len(self.idx)
        d2 = self.sigma_y[s, s] - l @ l
        if d2 <= 0:
            raise NumericalError(f"conditional variance {d2} not positive at site {s}")
        self.L[t, :t] = l
        self.L[t, t] = math.sqrt(d2)
        self.idx.append(s)

    def weights(self, l: np.ndarray) -> np.ndarray:
        t = len(self.idx)
        if t == 0:
            return np.zeros(0)
        return solve_triangular(self.L[:t, :t].T, l, lower=False, check_finite=False)


def _flat_index(site, width) -> int:
    if isinstance(site, (int, np.integer)):
        return int(site)
    return int(site[0]) * width + int(site[1])


def gaussian_sequential_conditioning(model: GaussianFieldModel, order: Sequence, mode: str = FILTER,
                                     width: int | None = None) -> list[ConditioningStep]:
    """Per-step conditional variances of X along a scan, by exact joint-Gaussian conditioning.

    ``order`` holds flat site indices or (row, col) sites (then ``width`` is required
    unless the field is a single row).
    """
    n = model.size
    w = width if width is not None else n
    idx = [_flat_index(s, w) for s in order]
    if sorted(idx) != list(range(n)):
        raise InvalidArgument("order must visit every site exactly once")
    sx = model.covariance
    s2 = model.noise_variance
    chol = _IncrementalCholesky(model.y_covariance)
    steps = []
    for s in idx:
        l = chol.project(s)
        v_pred = sx[s, s] - l @ l
        innov = v_pred + s2
        if mode == PREDICTOR:
            steps.append(ConditioningStep(s, chol.weights(l), v_pred, innov))
            chol.append(s, l)
        elif mode == FILTER:
            chol.append(s, l)
            # Cov(X_s, Y_j) = Sigma_X[j, s] for every conditioning j, s included
            coeffs = chol.weights(_solve_forward(chol, sx[chol.idx, s]))
            steps.append(ConditioningStep(s, coeffs, v_pred - v_pred ** 2 / innov, innov))
        else:
            raise InvalidArgument(f"unknown mode {mode!r}")
    return steps


def _solve_forward(chol: _IncrementalCholesky, c: np.ndarray) -> np.ndarray:
    t = len(chol.idx)
    return solve_triangular(chol.L[:t, :t], c, lower=True, check_finite=False)


# -- estimator objects for scan simulation ----------------------------------

class Estimator:
    """Base class. ``filter`` sees the current observation, ``predict`` cannot.

    The driver calls ``observe`` only after the estimate for a site is fixed,
    so a predictor never has access to the symbol it is predicting.
    """

    alphabet = BINARY
    name = "estimator"

    def reset(self, width: int, height: int) -> "Estimator":
        self.width, self.height = width, height
        return self

    def filter(self, site: Site, y) -> float:
        raise NotImplementedError

    def predict(self, site: Site) -> float:
        raise NotImplementedError

    def observe(self, site: Site, y) -> None:
        pass

    def _flat(self, site) -> int:
        return site[0] * self.width + site[1]


class SingletEstimator(Estimator):
    """Memoryless estimation from the current symbol (say-what-you-see for a symmetric BSC)."""

    name = "singlet"

    def __init__(self, channel: Channel, prior: float | None = None):
        self.channel = channel
        if channel.kind == BSC:
            self.prior = 0.5 if prior is None else prior
        else:
            self.alphabet = REAL
            self.prior = 1.0 if prior is None else prior

    def filter(self, site, y):
        if self.channel.kind == BSC:
            d, p1 = self.channel.delta, self.prior
            w1 = p1 * ((1 - d) if y == 1 else d)
            w0 = (1 - p1) * (d if y == 1 else (1 - d))
            return w1 / (w1 + w0)
        return singlet_filter(y, self.channel, self.prior)

    def predict(self, site):
        return self.prior if self.channel.kind == BSC else 0.0


class HmmExactEstimator(Estimator):
    """Exact posterior of the row-concatenated Markov chain given every revealed symbol.

    Forward and backward messages are cached against the set of revealed
    sites, so scans that sweep left to right (raster, odds-then-evens) cost
    O(1) amortised per step; arbitrary orders cost O(n) per step.
    """

    name = "hmm-forward"

    def __init__(self, params: HmmParams):
        self.params = params

    def reset(self, width, height):
        super().reset(width, height)
        n = self.n = width * height
        self.y = np.zeros(n, dtype=np.int64)
        self.mask = np.zeros(n, dtype=bool)
        self.a = np.empty(n)  # P(x_i = 1 | revealed before i)
        self.a[0] = 0.5
        self.a_ok = 0
        self.r = np.empty(n)  # normalised backward message over revealed after i
        self.r[n - 1] = 0.5
        self.r_ok = n - 1
        return self

    def _lik(self, j):
        d = self.params.delta
        return (1 - d, d) if self.y[j] else (d, 1 - d)

    def _fwd(self, i):
        pi = self.params.pi
        a = self.a
        while self.a_ok < i:
            j = self.a_ok
            q = a[j]
            if self.mask[j]:
                l1, l0 = self._lik(j)
                q = q * l1 / (q * l1 + (1 - q) * l0)
            a[j + 1] = q * (1 - pi) + (1 - q) * pi
            self.a_ok += 1
        return a[i]

    def _bwd(self, i):
        pi = self.params.pi
        r = self.r
        while self.r_ok > i:
            j = self.r_ok
            b1, b0 = r[j], 1 - r[j]
            if self.mask[j]:
                l1, l0 = self._lik(j)
                b1, b0 = b1 * l1, b0 * l0
            r[j - 1] = pi + (1 - 2 * pi) * b1 / (b0 + b1)
            self.r_ok -= 1
        return r[i]

    def _belief(self, i, y=None):
        f, b = self._fwd(i), self._bwd(i)
        p1, p0 = f * b, (1 - f) * (1 - b)
        if y is not None:
            d = self.params.delta
            l1, l0 = (1 - d, d) if y else (d, 1 - d)
            p1, p0 = p1 * l1, p0 * l0
        return p1 / (p1 + p0)

    def filter(self, site, y):
        return self._belief(self._flat(site), y)

    def predict(self, site):
        return self._belief(self._flat(site))

    def observe(self, site, y):
        j = self._flat(site)
        self.y[j] = y
        self.mask[j] = True
        self.a_ok = min(self.a_ok, j)
        self.r_ok = max(self.r_ok, j)


class WindowEstimator(Estimator):
    """Posterior of x_i from the revealed symbols within distance k along the chain.

    With the odds-then-evens scan and k = 1 this is say-what-you-see on the
    first pass and the three-symbol smoother on the second.
    """

    def __init__(self, params: HmmParams, k: int = 1):
        self.params, self.k = params, k
        self.name = f"window:{k}"
        self._cache: dict = {}

    def reset(self, width, height):
        super().reset(width, height)
        self.revealed: dict = {}
        return self

    def _belief(self, i, y=None):
        n = self.width * self.height
        lo, hi = max(0, i - self.k), min(n - 1, i + self.k)
        obs = tuple(y if j == i else self.revealed.get(j) for j in range(lo, hi + 1))
        key = (obs, i - lo)
        if key not in self._cache:
            seg = [0 if o is None else o for o in obs]
            self._cache[key] = _masked_posterior(seg, [o is not None for o in obs], i - lo,
                                                 self.params, include_i=False)
        return self._cache[key]

    def filter(self, site, y):
        return self._belief(self._flat(site), y)

    def predict(self, site):
        return self._belief(self._flat(site))

    def observe(self, site, y):
        self.revealed[self._flat(site)] = y


class GaussianOptimalEstimator(Estimator):
    """Conditional mean of X_s given the revealed Y's (and Y_s when filtering)."""

    alphabet = REAL
    name = "gauss-opt"

    def __init__(self, model: GaussianFieldModel):
        self.model = model

    def reset(self, width, height):
        super().reset(width, height)
        if width * height != self.model.size:
            raise InvalidArgument("model size does not match field dimensions")
        self.chol = _IncrementalCholesky(self.model.y_covariance)
        self.yvals: list[float] = []
        self._last = None
        return self

    def _predictive(self, s):
        l = self.chol.project(s)
        self._last = (s, l)
        mean = float(self.chol.weights(l) @ np.asarray(self.yvals)) if self.yvals else 0.0
        return mean, self.model.covariance[s, s] - l @ l

    def filter(self, site, y):
        m, v = self._predictive(self._flat(site))
        return m + v / (v + self.model.noise_variance) * (float(y) - m)

    def predict(self, site):
        return self._predictive(self._flat(site))[0]

    def observe(self, site, y):
        s = self._flat(site)
        l = self._last[1] if self._last and self._last[0] == s else self.chol.project(s)
        self.chol.append(s, l)
        self.yvals.append(float(y))


def decide(belief: float, loss_kind: str, alphabet: str, y=None) -> float:
    if alphabet == BINARY:
        if loss_kind == SQUARED:
            return belief
        if belief == 0.5:
            return float(y) if y is not None else 0.0
        return 1.0 if belief > 0.5 else 0.0
    if loss_kind != SQUARED:
        raise InvalidArgument("real-valued estimates require squared loss")
    return belief


def make_estimator(spec: str, *, params: HmmParams | None = None, channel: Channel | None = None,
                   model: GaussianFieldModel | None = None, prior: float | None = None) -> Estimator:
    """Build an estimator from ``singlet|hmm-forward|window:K|gauss-opt``."""
    name, _, arg = spec.partition(":")
    if name == "singlet":
        if channel is None:
            raise InvalidArgument("singlet estimator needs a channel")
        return SingletEstimator(channel, prior)
    if name == "hmm-forward":
        return HmmExactEstimator(params)
    if name == "window":
        return WindowEstimator(params, int(arg or 1))
    if name == "gauss-opt":
        return GaussianOptimalEstimator(model)
    raise InvalidArgument(f"unknown estimator spec {spec!r}")


def run_scan_estimate(clean: Field, noisy: Field, scanner: Scanner, estimator: Estimator,
                      mode: str, loss: LossFunction) -> ScanTrace:
    """Drive one scan, feeding the estimator only what the mode allows, and record the trace."""
    if clean.values.shape != noisy.values.shape:
        raise InvalidArgument("clean and noisy fields differ in shape")
    if mode not in (FILTER, PREDICTOR):
        raise InvalidArgument(f"unknown mode {mode!r}")
    w, h = clean.width, clean.height
    scanner.reset(w, h)
    estimator.reset(w, h)
    history: list = []
    order, obs, est, losses = [], [], [], []
    for _ in range(w * h):
        site = scanner.next_site(history)
        y = noisy[site]
        if mode == FILTER:
            xhat = decide(estimator.filter(site, y), loss.kind, estimator.alphabet, y)
        else:
            xhat = decide(estimator.predict(site), loss.kind, estimator.alphabet)
        estimator.observe(site, y)
        history.append((site, y))
        order.append(site)
        obs.append(y)
        est.append(xhat)
        losses.append(loss(clean[site], xhat))
    return make_trace(order, obs, est, losses)
