"""Universal noisy scandiction by exponential weighting over a finite expert set,
and the binary filter <-> predictor transformation.

Experts are scandictors for m x m blocks. The algorithm never sees clean
data: each expert is scored on every block through the unbiased loss
estimate built from h(y) = (y - delta)/(1 - 2 delta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channels import unbiased_estimate_bsc
from .core import BINARY, Field, InvalidArgument, Site, make_trace
from .estimators import HmmExactEstimator, HmmParams
from .rng import stream, site_uniforms
from .scanners import Scanner, make_scanner


# -- block predictors ---------------------------------------------------------

class BlockPredictor:
    """Binary predictor for one block; sees only observations already revealed."""

    name = "predictor"

    def reset(self, width: int, height: int):
        self.width, self.height = width, height
        self.revealed: dict = {}
        self.last = None
        return self

    def predict(self, site: Site) -> int:
        raise NotImplementedError

    def observe(self, site: Site, y) -> None:
        self.revealed[tuple(site)] = int(y)
        self.last = int(y)


class ConstantPredictor(BlockPredictor):
    def __init__(self, value: int):
        self.value = int(value)
        self.name = "zero" if value == 0 else "one"

    def predict(self, site):
        return self.value


class LastSymbolPredictor(BlockPredictor):
    """Repeat the previous observation along the scan (0 before anything is seen)."""

    name = "last"

    def predict(self, site):
        return 0 if self.last is None else self.last


class NeighbourMajorityPredictor(BlockPredictor):
    """Majority vote of revealed 4-neighbours; falls back to the previous observation."""

    name = "majority"

    def predict(self, site):
        r, c = site
        votes = [self.revealed[n] for n in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
                 if n in self.revealed]
        s = sum(votes)
        if 2 * s > len(votes):
            return 1
        if 2 * s < len(votes):
            return 0
        return 0 if self.last is None else self.last


class MarkovPredictor(BlockPredictor):
    """MAP prediction under a row-concatenated Markov(pi) source seen through BSC(delta)."""

    def __init__(self, pi: float, delta: float):
        self.params = HmmParams(pi, delta)
        self.name = f"hmm:{pi:g}"

    def reset(self, width, height):
        super().reset(width, height)
        self._est = HmmExactEstimator(self.params).reset(width, height)
        return self

    def predict(self, site):
        return int(self._est.predict(site) > 0.5)

    def observe(self, site, y):
        super().observe(site, y)
        self._est.observe(site, y)


def make_predictor(spec: str, delta: float = 0.0) -> BlockPredictor:
    name, _, arg = spec.partition(":")
    if name == "zero":
        return ConstantPredictor(0)
    if name == "one":
        return ConstantPredictor(1)
    if name == "last":
        return LastSymbolPredictor()
    if name == "majority":
        return NeighbourMajorityPredictor()
    if name == "hmm":
        return MarkovPredictor(float(arg), delta)
    raise InvalidArgument(f"unknown predictor spec {spec!r}")


# -- experts ----------------------------------------------------------------

@dataclass(frozen=True)
class Scandictor:
    """A scanner and a predictor, both rebuilt fresh for every block."""

    name: str
    scanner_factory: Callable[[], Scanner]
    predictor_factory: Callable[[], BlockPredictor]

    @classmethod
    def from_spec(cls, spec: str, delta: float = 0.0) -> "Scandictor":
        """``SCAN/PREDICTOR``, e.g. ``snake/last`` or ``hilbert/hmm:0.1``."""
        scan, sep, pred = spec.partition("/")
        if not sep:
            raise InvalidArgument(f"expert spec {spec!r} must look like SCAN/PREDICTOR")
        make_scanner(scan)
        make_predictor(pred, delta)
        return cls(spec, lambda: make_scanner(scan), lambda: make_predictor(pred, delta))

    def run(self, noisy_block: Field) -> tuple[list[Site], list[int]]:
        """Scan order and binary predictions on one block."""
        w, h = noisy_block.width, noisy_block.height
        scanner = self.scanner_factory().reset(w, h)
        pred = self.predictor_factory().reset(w, h)
        history: list = []
        order, guesses = [], []
        for _ in range(w * h):
            s = scanner.next_site(history)
            guesses.append(pred.predict(s))
            y = noisy_block[s]
            pred.observe(s, y)
            history.append((s, y))
            order.append(s)
        return order, guesses


@dataclass(frozen=True)
class ExpertSet:
    experts: tuple
    l_max: float = 1.0

    def __post_init__(self):
        if len(self.experts) < 1:
            raise InvalidArgument("expert set must be non-empty")
        object.__setattr__(self, "experts", tuple(self.experts))

    @property
    def size(self) -> int:
        return len(self.experts)

    @classmethod
    def from_specs(cls, specs: Sequence[str], delta: float = 0.0, l_max: float = 1.0) -> "ExpertSet":
        return cls(tuple(Scandictor.from_spec(s, delta) for s in specs), l_max)


DEFAULT_EXPERTS = ("raster/last", "snake/last", "hilbert/majority", "raster/zero")


@dataclass
class WeightState:
    estimated_cumulative: np.ndarray
    eta: float
    blocks_done: int = 0

    def __post_init__(self):
        self.estimated_cumulative = np.asarray(self.estimated_cumulative, dtype=float)
        if not self.eta > 0:
            raise InvalidArgument("learning rate must be positive")
        if not np.all(np.isfinite(self.estimated_cumulative)):
            raise InvalidArgument("estimated losses must be finite")


def expert_distribution(state: WeightState) -> np.ndarray:
    """softmax(-eta * L_hat), shifted by the minimum so nothing overflows."""
    z = -state.eta * (state.estimated_cumulative - state.estimated_cumulative.min())
    w = np.exp(z)
    return w / w.sum()


# -- loss estimates -------------------------------------------------------

def estimated_losses(observations, predictions, delta: float) -> np.ndarray:
    """Per-symbol (1 - h(y)) l(0, F) + h(y) l(1, F) under Hamming loss, F binary."""
    h = unbiased_estimate_bsc(np.asarray(observations, dtype=float), delta)
    f = np.asarray(predictions, dtype=float)
    return (1.0 - h) * f + h * (1.0 - f)


def estimated_block_loss(expert: Scandictor, noisy_block: Field, delta: float) -> float:
    order, guesses = expert.run(noisy_block)
    ys = [noisy_block[s] for s in order]
    return math.fsum(estimated_losses(ys, guesses, delta))


def loss_martingale(clean: Field, noisy: Field, expert: Scandictor, delta: float) -> np.ndarray:
    """Delta_t = L_t - L_hat_t along the expert's scan of the whole field."""
    order, guesses = expert.run(noisy)
    x = np.array([clean[s] for s in order], dtype=float)
    f = np.asarray(guesses, dtype=float)
    true = np.abs(x - f)
    est = estimated_losses([noisy[s] for s in order], guesses, delta)
    return np.cumsum(true - est)


def regret_bound(n: int, m: int, n_experts: int, l_max: float = 1.0) -> float:
    """m(n + m) sqrt(ln lambda) l_max / sqrt(2)."""
    return m * (n + m) * math.sqrt(math.log(n_experts)) * l_max / math.sqrt(2.0)


def default_block_side(n: int) -> int:
    return max(1, int(math.floor(n ** (1.0 / 3.0) + 1e-9)))


def default_eta(n_blocks: int, n_experts: int, m: int, l_max: float = 1.0) -> float:
    """sqrt(8 ln lambda / K) divided by the per-block loss range m^2 l_max."""
    if n_experts < 2:
        return 1.0
    return math.sqrt(8.0 * math.log(n_experts) / n_blocks) / (m * m * l_max)


# -- the algorithm ---------------------------------------------------------

@dataclass
class UniversalResult:
    trace: object
    chosen: list
    estimated_cumulative: np.ndarray
    expert_losses: np.ndarray | None = None   # true losses of each expert on the full blocks
    algorithm_loss: float | None = None       # true loss of the algorithm on the full blocks
    eta: float = 0.0
    m: int = 0
    bound: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def regret(self) -> float | None:
        if self.expert_losses is None:
            return None
        return self.algorithm_loss - float(self.expert_losses.min())


def _block(field_: Field, r0, c0, h, w) -> Field:
    return Field(field_.values[r0:r0 + h, c0:c0 + w], field_.alphabet)


def universal_scandict(noisy: Field, experts: ExpertSet, delta: float, m: int | None = None,
                       eta: float | None = None, seed: int = 0,
                       clean_for_scoring: Field | None = None) -> UniversalResult:
    """Block-wise exponential weighting over ``experts`` on a binary field seen through BSC(delta).

    Full m x m blocks are visited in raster block order, each scandicted by
    an expert drawn from the current weights (independently per block) and
    restarted at the block boundary. Right and bottom remainders are scanned
    by the expert with the lowest estimated loss so far and are left out of
    the regret accounting.
    """
    if noisy.alphabet != BINARY:
        raise InvalidArgument("universal scandiction here is for binary fields")
    W, H = noisy.width, noisy.height
    n = min(W, H)
    m = default_block_side(n) if m is None else m
    if m < 1 or m > n:
        raise InvalidArgument(f"block side {m} must lie in [1, {n}]")
    bw, bh = W // m, H // m
    K = bw * bh
    lam = experts.size
    eta = default_eta(K, lam, m, experts.l_max) if eta is None else eta
    state = WeightState(np.zeros(lam), eta)
    rng = stream(seed, "experts")
    scoring = clean_for_scoring is not None
    expert_true = np.zeros(lam)
    alg_true = []

    order, obs, est, losses, chosen = [], [], [], [], []

    def emit(block, r0, c0, blk_order, guesses, clean_blk):
        for s, g in zip(blk_order, guesses):
            y = block[s]
            order.append((r0 + s[0], c0 + s[1]))
            obs.append(y)
            est.append(float(g))
            if scoring:
                losses.append(float(clean_blk[s] != g))
            else:
                losses.append(float(estimated_losses([y], [g], delta)[0]))

    for br in range(bh):
        for bc in range(bw):
            r0, c0 = br * m, bc * m
            block = _block(noisy, r0, c0, m, m)
            clean_blk = _block(clean_for_scoring, r0, c0, m, m) if scoring else None
            p = expert_distribution(state)
            j = int(rng.choice(lam, p=p))
            chosen.append(j)
            block_hat = np.empty(lam)
            for i, ex in enumerate(experts.experts):
                blk_order, guesses = ex.run(block)
                block_hat[i] = math.fsum(estimated_losses([block[s] for s in blk_order], guesses, delta))
                if scoring:
                    expert_true[i] += sum(float(clean_blk[s] != g) for s, g in zip(blk_order, guesses))
                if i == j:
                    start = len(losses)
                    emit(block, r0, c0, blk_order, guesses, clean_blk)
                    if scoring:
                        alg_true.append(math.fsum(losses[start:]))
            state.estimated_cumulative = state.estimated_cumulative + block_hat
            state.blocks_done += 1

    # remainders along the right edge and the bottom, outside the regret accounting
    best = int(np.argmin(state.estimated_cumulative))
    rests = []
    if bw * m < W:
        rests.append((0, bw * m, bh * m, W - bw * m))
    if bh * m < H:
        rests.append((bh * m, 0, H - bh * m, W))
    for r0, c0, hh, ww in rests:
        block = _block(noisy, r0, c0, hh, ww)
        clean_blk = _block(clean_for_scoring, r0, c0, hh, ww) if scoring else None
        pred = experts.experts[best].predictor_factory().reset(ww, hh)
        blk_order = [Site(r, c) for r in range(hh) for c in range(ww)]
        guesses = []
        for s in blk_order:
            guesses.append(pred.predict(s))
            pred.observe(s, block[s])
        emit(block, r0, c0, blk_order, guesses, clean_blk)

    trace = make_trace(order, obs, est, losses)
    return UniversalResult(
        trace=trace, chosen=chosen, estimated_cumulative=state.estimated_cumulative,
        expert_losses=expert_true if scoring else None,
        algorithm_loss=math.fsum(alg_true) if scoring else None,
        eta=eta, m=m, bound=regret_bound(n, m, lam, experts.l_max),
        extras={"blocks": K, "remainder_sites": W * H - K * m * m})


# -- filter <-> predictor transformation (binary) ---------------------------

# the four maps s: {0,1} -> {0,1}, written (s(0), s(1))
MAPS = ((0, 0), (0, 1), (1, 0), (1, 1))
IDENTITY_MAP = 1
ZERO_MAP = 0


@dataclass(frozen=True)
class BranchFilter:
    """Randomised binary filter given by P(output = 1 | history, y).

    With ``shared_randomness`` both y-branches use the same uniform (output 1
    iff u < P(1 | y)); otherwise the branches randomise independently.
    """

    prob_one: Callable
    shared_randomness: bool = False

    def __call__(self, history, y, u: float) -> int:
        return int(u < self.prob_one(history, y))


def filter_to_predictor(filt: BranchFilter, history=()) -> np.ndarray:
    """Distribution over MAPS of s(y) = filter output had y been observed."""
    q0, q1 = float(filt.prob_one(history, 0)), float(filt.prob_one(history, 1))
    for q in (q0, q1):
        if not 0.0 <= q <= 1.0:
            raise InvalidArgument("filter probabilities must lie in [0, 1]")
    if filt.shared_randomness:
        lo, hi = min(q0, q1), max(q0, q1)
        p = np.zeros(4)
        p[3] = lo                                  # u < both thresholds
        p[0] = 1.0 - hi                            # u above both
        p[1 if q1 > q0 else 2] = hi - lo           # between: only the larger branch says 1
        return p
    return np.array([(1 - q0) * (1 - q1), (1 - q0) * q1, q0 * (1 - q1), q0 * q1])


def predictor_to_filter(dist, y: int, u: float) -> int:
    """Sample the filter output for observation y by inverse CDF over the output symbols."""
    if not 0.0 <= u < 1.0:
        raise InvalidArgument("u must lie in [0, 1)")
    p = np.asarray(dist, dtype=float)
    if p.shape != (4,) or np.any(p < -1e-15) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidArgument("predictor must be a distribution over the four binary maps")
    p_zero = sum(p[k] for k, s in enumerate(MAPS) if s[y] == 0)
    return 0 if u < p_zero else 1


def map_loss(x: int, s_index: int, delta: float) -> float:
    """Expected Hamming loss of playing map s against clean x through BSC(delta)."""
    s = MAPS[s_index]
    return (1 - delta) * float(s[x] != x) + delta * float(s[1 - x] != x)


def sample_filter_outputs(filt: BranchFilter, history, n: int, seed: int) -> np.ndarray:
    """Monte Carlo maps (s(0), s(1)) of a randomised filter, as indices into MAPS."""
    u0 = site_uniforms(seed, n, "filter", 0)
    u1 = u0 if filt.shared_randomness else site_uniforms(seed, n, "filter", 1)
    s0 = (u0 < filt.prob_one(history, 0)).astype(int)
    s1 = (u1 < filt.prob_one(history, 1)).astype(int)
    return 2 * s0 + s1
