"""Brute-force reference computations on tiny instances.

Everything here enumerates joint configurations directly, so it shares no
recursion with the estimators it is used to check. Size caps are hard errors.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import BSC, Channel
from .core import HAMMING, SQUARED, InvalidArgument, LossFunction, NumericalError
from .estimators import FILTER, PREDICTOR, HmmParams

MAX_SITES = 12
MAX_ORDER_SITES = 8
MAX_ADAPTIVE_SITES = 4


class SizeError(InvalidArgument):
    pass


@dataclass(frozen=True)
class JointModel:
    """Binary field on a width x height grid, given by its full probability table, seen through a BSC.

    ``table[k]`` is the probability of the configuration whose row-major bits
    are the binary digits of k, most significant first.
    """

    width: int
    height: int
    table: np.ndarray
    channel: Channel

    def __post_init__(self):
        n = self.width * self.height
        if n > MAX_SITES:
            raise SizeError(f"{n} sites exceeds the enumeration cap of {MAX_SITES}")
        t = np.asarray(self.table, dtype=float).reshape(-1)
        if t.size != 2 ** n:
            raise InvalidArgument(f"table must have 2^{n} entries")
        if np.any(t < 0) or abs(t.sum() - 1.0) > 1e-12:
            raise InvalidArgument("table must be a probability distribution")
        if self.channel.kind != BSC:
            raise InvalidArgument("the enumeration oracle handles binary fields through a BSC")
        object.__setattr__(self, "table", t)

    @property
    def site_count(self) -> int:
        return self.width * self.height

    @property
    def tensor(self) -> np.ndarray:
        return self.table.reshape((2,) * self.site_count)

    @classmethod
    def markov(cls, width: int, height: int, pi: float, delta: float) -> "JointModel":
        """Row-concatenated symmetric Markov chain with a uniform start."""
        n = width * height
        bits = np.array(list(itertools.product((0, 1), repeat=n)))
        flips = np.sum(bits[:, 1:] != bits[:, :-1], axis=1)
        table = 0.5 * pi ** flips * (1 - pi) ** (n - 1 - flips)
        return cls(width, height, table, Channel.bsc(delta))

    @classmethod
    def iid(cls, width: int, height: int, p: float, delta: float) -> "JointModel":
        n = width * height
        bits = np.array(list(itertools.product((0, 1), repeat=n)))
        ones = bits.sum(axis=1)
        return cls(width, height, p ** ones * (1 - p) ** (n - ones), Channel.bsc(delta))

    def transposed(self) -> "JointModel":
        """Same field with rows and columns swapped."""
        t = self.tensor.reshape((2,) * self.site_count)
        axes = [c * self.width + r for r in range(self.width) for c in range(self.height)]
        return JointModel(self.height, self.width, np.transpose(t, axes).reshape(-1), self.channel)

    def channel_matrix(self) -> np.ndarray:
        d = self.channel.delta
        return np.array([[1 - d, d], [d, 1 - d]])  # [x, y]


def _flat(site, width):
    if isinstance(site, (int, np.integer)):
        return int(site)
    return int(site[0]) * width + int(site[1])


def _joint_x_and_y(model: JointModel, target: int, revealed) -> np.ndarray:
    """P(x_target, y_R) as an array indexed [x_target, y_r1, y_r2, ...] in the order of ``revealed``."""
    n = model.site_count
    C = model.channel_matrix()
    t = model.tensor
    letters = [chr(ord("a") + i) for i in range(n)]
    ylet = [chr(ord("A") + i) for i in range(n)]
    operands, specs = [t], ["".join(letters)]
    for j in revealed:
        operands.append(C)
        specs.append(letters[j] + ylet[j])
    out = letters[target] + "".join(ylet[j] for j in revealed)
    return np.einsum(",".join(specs) + "->" + out, *operands)


def _step_loss(joint: np.ndarray, loss_kind: str) -> float:
    """Expected loss of the Bayes decision for x from P(x, y_R) laid out [x, ...]."""
    p0, p1 = joint[0].reshape(-1), joint[1].reshape(-1)
    if loss_kind == HAMMING:
        return float(np.minimum(p0, p1).sum())
    tot = p0 + p1
    with np.errstate(invalid="ignore", divide="ignore"):
        return float(np.where(tot > 0, p0 * p1 / tot, 0.0).sum())


def brute_force_scalar_bayes(joint, loss: LossFunction | str = HAMMING, x_values=(0.0, 1.0)) -> float:
    """min over decision rules g of E l(X, g(Y)) for a table joint[x, y].

    Hamming loss on a table of ``Fraction`` entries is evaluated exactly.
    """
    kind = loss.kind if isinstance(loss, LossFunction) else loss
    P = np.asarray(joint)
    if P.dtype != object:
        P = P.astype(float)
    xv = np.asarray(x_values, dtype=float)
    total = 0
    for col in P.T:
        if kind == HAMMING:
            total = total + (sum(col) - max(col))
        elif kind == SQUARED:
            col = col.astype(float)
            m = col.sum()
            if m > 0:
                mean = float(col @ xv) / m
                total += float(col @ (xv - mean) ** 2)
        else:
            raise InvalidArgument(f"unknown loss {kind!r}")
    return total


def bsc_scalar_joint(p_y: float, delta: float) -> np.ndarray:
    """joint[x, y] of X -> BSC(delta) -> Y with P(Y = 1) = p_y."""
    p_x = (p_y - delta) / (1 - 2 * delta)
    px = np.array([1 - p_x, p_x])
    C = np.array([[1 - delta, delta], [delta, 1 - delta]])
    return px[:, None] * C


def exhaustive_optimal_filter_loss(model: JointModel, order, mode: str = FILTER,
                                   loss: str = HAMMING) -> float:
    """Expected cumulative loss of the Bayes-optimal filter (or predictor) along a fixed order."""
    n = model.site_count
    idx = [_flat(s, model.width) for s in order]
    if sorted(idx) != list(range(n)):
        raise InvalidArgument("order must visit every site exactly once")
    total = []
    for t, s in enumerate(idx):
        revealed = idx[:t + 1] if mode == FILTER else idx[:t]
        if mode not in (FILTER, PREDICTOR):
            raise InvalidArgument(f"unknown mode {mode!r}")
        total.append(_step_loss(_joint_x_and_y(model, s, revealed), loss))
    return math.fsum(total)


def _order_dp(model: JointModel, mode: str, loss: str, pick):
    n = model.site_count
    if n > MAX_ORDER_SITES:
        raise SizeError(f"{n} sites exceeds the order-search cap of {MAX_ORDER_SITES}")
    if mode not in (FILTER, PREDICTOR):
        raise InvalidArgument(f"unknown mode {mode!r}")
    full = (1 << n) - 1
    cache: dict = {}

    def cost(mask, s):
        if (mask, s) not in cache:
            before = [j for j in range(n) if mask >> j & 1]
            rev = sorted(before + [s]) if mode == FILTER else before
            cache[mask, s] = _step_loss(_joint_x_and_y(model, s, rev), loss)
        return cache[mask, s]

    value = {full: 0.0}
    for mask in sorted(range(full), key=lambda m: -bin(m).count("1")):
        value[mask] = pick(cost(mask, s) + value[mask | 1 << s] for s in range(n) if not mask >> s & 1)
    return value, cost


def exhaustive_best_order(model: JointModel, mode: str = FILTER, loss: str = HAMMING):
    """Best data-independent order and its value; ties go to the lexicographically first order.

    The value of a step depends only on (revealed set, site), so the search
    runs as a dynamic program over subsets rather than over all n! orders.
    """
    n = model.site_count
    value, cost = _order_dp(model, mode, loss, min)
    full = (1 << n) - 1
    order, mask = [], 0
    while mask != full:
        best = value[mask]
        for s in range(n):
            if not mask >> s & 1 and cost(mask, s) + value[mask | 1 << s] <= best + 1e-12:
                order.append(s)
                mask |= 1 << s
                break
    return [divmod(s, model.width) for s in order], value[0]


def exhaustive_order_range(model: JointModel, mode: str = FILTER, loss: str = HAMMING) -> tuple[float, float]:
    """(best, worst) expected cumulative loss over all data-independent orders."""
    return _order_dp(model, mode, loss, min)[0][0], _order_dp(model, mode, loss, max)[0][0]


def adaptive_scan_value(model: JointModel, mode: str = FILTER, loss: str = HAMMING) -> float:
    """Best expected loss over data-dependent scans (the next site may depend on what was seen)."""
    n = model.site_count
    if n > MAX_ADAPTIVE_SITES:
        raise SizeError(f"{n} sites exceeds the data-dependent scan cap of {MAX_ADAPTIVE_SITES}")
    def joint(s, revealed, ys):
        arr = _joint_x_and_y(model, s, revealed)
        return arr[(slice(None), *ys)]

    @lru_cache(maxsize=None)
    def go(revealed: tuple, ys: tuple) -> float:
        # revealed sorted; ys the observed values in the same order; returns joint-weighted cost
        if len(revealed) == n:
            return 0.0
        best = math.inf
        for s in range(n):
            if s in revealed:
                continue
            if mode == PREDICTOR:
                step = _step_loss(joint(s, revealed, ys)[:, None], loss)
            else:
                step = 0.0
            rest = 0.0
            for y in (0, 1):
                rev2 = tuple(sorted(revealed + (s,)))
                ys2 = tuple(dict(zip(revealed + (s,), ys + (y,)))[j] for j in rev2)
                if mode == FILTER:
                    step += _step_loss(joint(s, rev2, ys2)[:, None], loss)
                rest += go(rev2, ys2)
            best = min(best, step + rest)
        return best

    return go((), ())


def output_entropy(model: JointModel, bits: bool = True) -> float:
    """H(Y_B) of the enumerated output distribution."""
    n = model.site_count
    py = _joint_x_and_y(model, 0, tuple(range(n))).sum(axis=0).reshape(-1)
    py = py[py > 0]
    h = -float(np.sum(py * np.log(py)))
    return h / math.log(2) if bits else h


def brute_force_hmm_posteriors(y, params: HmmParams) -> np.ndarray:
    """P(x_t = 1 | y_1..y_t) for each t by summing over all clean sequences."""
    y = list(y)
    n = len(y)
    if n > 16:
        raise SizeError("brute-force chain posterior capped at 16 symbols")
    out = np.empty(n)
    for t in range(1, n + 1):
        num = den = 0.0
        for xs in itertools.product((0, 1), repeat=t):
            p = 0.5
            for a, b in zip(xs, xs[1:]):
                p *= params.pi if a != b else 1 - params.pi
            for xi, yi in zip(xs, y[:t]):
                p *= params.delta if xi != yi else 1 - params.delta
            den += p
            if xs[-1] == 1:
                num += p
        out[t - 1] = num / den
    return out


def brute_force_window_posterior(y, i: int, k: int, params: HmmParams) -> float:
    """P(x_i = 1 | y_{i-k..i+k}) by enumerating the clean window; the chain's stationarity
    makes the uniform marginal at the window's left edge exact."""
    lo, hi = max(0, i - k), min(len(y) - 1, i + k)
    seg = list(y[lo:hi + 1])
    num = den = 0.0
    for xs in itertools.product((0, 1), repeat=len(seg)):
        p = 0.5
        for a, b in zip(xs, xs[1:]):
            p *= params.pi if a != b else 1 - params.pi
        for xi, yi in zip(xs, seg):
            p *= params.delta if xi != yi else 1 - params.delta
        den += p
        if xs[i - lo] == 1:
            num += p
    return num / den


def dense_gaussian_conditioning(covariance, sigma_n2: float, order, mode: str = FILTER,
                                width: int | None = None) -> np.ndarray:
    """Per-step Var(X_s | Y of the conditioning set) from a fresh dense solve at every step."""
    cov = np.asarray(covariance, dtype=float)
    n = cov.shape[0]
    if n > 256:
        raise SizeError("dense conditioning oracle capped at 256 sites")
    if sigma_n2 <= 0:
        raise InvalidArgument("noise variance must be positive")
    w = width if width is not None else n
    idx = [_flat(s, w) for s in order]
    cy = cov + sigma_n2 * np.eye(n)
    out = np.empty(n)
    for t, s in enumerate(idx):
        cond = idx[:t + 1] if mode == FILTER else idx[:t]
        if not cond:
            out[t] = cov[s, s]
            continue
        a = cy[np.ix_(cond, cond)]
        b = cov[cond, s]
        try:
            out[t] = cov[s, s] - b @ np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"singular observation covariance at step {t}") from exc
    return out
