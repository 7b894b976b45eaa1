"""Hellinger/TV distances, BernoulliTest, and contract-level amplitude estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.special import xlogy
from scipy.stats import binom

from .errors import ConfigurationError, NormalizationError
from .evolution import Cost, TimeLedger

C_Q = 8.0
# Success probability of one canonical phase-estimation amplitude estimate.
BASE_SUCCESS = 8 / math.pi**2


class Label(str, Enum):
    LARGE = "Large"
    SMALL = "Small"


@dataclass(frozen=True)
class TestVerdict:
    __test__ = False

    label: Label
    samples_used: int
    queries_used: int

    @property
    def large(self) -> bool:
        return self.label is Label.LARGE


def _distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise NormalizationError("input is not a probability distribution")
    return np.clip(p, 0.0, None)


def hellinger(p, q) -> float:
    """sqrt(1 - sum sqrt(p_i q_i))."""
    p, q = _distribution(p), _distribution(q)
    if p.shape != q.shape:
        raise ValueError("distributions have different supports")
    bc = float(np.sum(np.sqrt(p * q)))
    return math.sqrt(max(0.0, 1.0 - bc))


def tv_distance(p, q) -> float:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions have different supports")
    return 0.5 * float(np.sum(np.abs(p - q)))


# BernoulliTest

def bernoulli_batch_size(a: float, b: float) -> int:
    return math.ceil(4.0 / (math.sqrt(a) - math.sqrt(b)) ** 2)


def bernoulli_rounds(delta: float) -> int:
    return 2 * math.ceil(math.log2(1.0 / delta))


def bernoulli_sample_count(a: float, b: float, delta: float) -> int:
    return bernoulli_batch_size(a, b) * 36 * bernoulli_rounds(delta)


class BitSampler:
    """Adapts a callable ``draw(size) -> array of 0/1`` to batch counting."""

    def __init__(self, draw: Callable[[int], np.ndarray]):
        self._draw = draw

    def draw_counts(self, batch: int, n_batches: int) -> np.ndarray:
        bits = np.asarray(self._draw(batch * n_batches)).reshape(n_batches, batch)
        return bits.sum(axis=1)


class BinomialSource:
    """i.i.d. Bernoulli(p) samples drawn as per-batch binomial counts."""

    def __init__(self, p: float, rng: np.random.Generator):
        self.p = p
        self._rng = rng

    def draw_counts(self, batch: int, n_batches: int) -> np.ndarray:
        return self._rng.binomial(batch, self.p, size=n_batches)


def bernoulli_test(sampler, a: float, b: float, delta: float,
                   ledger: TimeLedger | None = None) -> TestVerdict:
    """Decide p >= a (Large) or p <= b (Small) from Bernoulli samples.

    Batches of l = ceil(4/(sqrt(a)-sqrt(b))^2) samples each cast a
    likelihood-ratio vote; 36 votes form a round, 2 ceil(log2(1/delta))
    rounds are averaged and the majority decides.  ``sampler`` is either an
    object with ``draw_counts(batch, n_batches)`` or a callable returning bits.
    """
    if not 0 <= b < a <= 1:
        raise ConfigurationError("BernoulliTest needs 0 <= b < a <= 1")
    if not 0 < delta < 1:
        raise ConfigurationError("failure probability must lie in (0, 1)")
    if not hasattr(sampler, "draw_counts"):
        sampler = BitSampler(sampler)
    ell = bernoulli_batch_size(a, b)
    rounds = bernoulli_rounds(delta)
    before = ledger.queries if ledger is not None else 0
    k = np.asarray(sampler.draw_counts(ell, 36 * rounds), dtype=float)
    log_a = xlogy(k, a) + xlogy(ell - k, 1 - a)
    log_b = xlogy(k, b) + xlogy(ell - k, 1 - b)
    votes = (log_a >= log_b).reshape(rounds, 36)
    mu = votes.mean(axis=1)
    label = Label.LARGE if mu.mean() > 0.5 else Label.SMALL
    queries = ledger.queries - before if ledger is not None else 0
    return TestVerdict(label, ell * 36 * rounds, queries)


# Square-root amplitude estimation, simulated at the contract level

def _median_tail(k: int) -> float:
    """Probability that at least half of k base estimates fail."""
    return float(binom.sf(k // 2, k, 1.0 - BASE_SUCCESS))


@dataclass(frozen=True)
class AmpEstPlan:
    queries: int
    measurements: int
    repetitions: int
    failure_probability: float


def sqrt_amp_est_plan(eps: float, delta: float, c_q: float = C_Q) -> AmpEstPlan:
    """Query/measurement cost and median-amplification layout for given (eps, delta).

    The query budget ceil(c_q ln(1/delta)/eps) is split into an odd number of
    base estimates of ceil(pi/eps) queries each; the median of those fails
    with the returned probability, which never exceeds delta.
    """
    if eps <= 0:
        raise ConfigurationError("precision must be positive")
    if not 0 < delta < 1 / 3:
        raise ConfigurationError("failure probability must lie in (0, 1/3)")
    queries = math.ceil(c_q * math.log(1 / delta) / eps)
    measurements = max(1, math.ceil(math.log2(1 / eps) + math.log2(1 / delta)))
    base = math.ceil(math.pi / eps)
    k = max(1, queries // base)
    if k % 2 == 0:
        k -= 1
    while _median_tail(k) > delta:
        k += 2
    queries = max(queries, k * base)
    return AmpEstPlan(queries, measurements, k, _median_tail(k))


def sqrt_amp_est_sim(p_true: float, eps: float, delta: float, ledger: TimeLedger | None = None,
                     rng: np.random.Generator | None = None, *, c_q: float = C_Q,
                     unit_cost: Cost | None = None, bad_value: float | None = None) -> float:
    """Estimate sqrt(p_true) to within eps with probability at least 1 - delta.

    Simulates the median of independent base estimates.  A base estimate is
    uniform on [sqrt(p)-eps, sqrt(p)+eps] clipped to [0, 1] with probability
    8/pi^2 and otherwise uniform on [0, 1] (or ``bad_value`` if given).
    ``unit_cost`` is the ledger cost of one query (default: one query, no time).
    """
    if not 0.0 <= p_true <= 1.0 + 1e-12:
        raise ValueError("p_true must be a probability")
    plan = sqrt_amp_est_plan(eps, delta, c_q)
    rng = np.random.default_rng() if rng is None else rng
    if ledger is not None:
        unit = Cost(queries=1) if unit_cost is None else unit_cost
        ledger.charge_cost(unit, plan.queries)
        ledger.charge(measurements=plan.measurements)
    root = math.sqrt(min(max(p_true, 0.0), 1.0))
    lo, hi = max(0.0, root - eps), min(1.0, root + eps)
    good = rng.random(plan.repetitions) < BASE_SUCCESS
    values = rng.uniform(lo, hi, size=plan.repetitions)
    noise = rng.random(plan.repetitions) if bad_value is None else np.full(plan.repetitions, bad_value)
    return float(np.median(np.where(good, values, noise)))


def amp_test(p_true: float, a: float, b: float, delta: float, ledger: TimeLedger | None = None,
             rng: np.random.Generator | None = None, **kwargs) -> TestVerdict:
    """Large if sqrt(p) >= a, Small if sqrt(p) <= b, each with probability >= 1 - delta."""
    if not 0 <= b < a <= 1:
        raise ConfigurationError("AmpTest needs 0 <= b < a <= 1")
    eps = (a - b) / 3
    plan = sqrt_amp_est_plan(eps, delta, kwargs.get("c_q", C_Q))
    mu = sqrt_amp_est_sim(p_true, eps, delta, ledger, rng, **kwargs)
    label = Label.LARGE if mu >= (a + b) / 2 else Label.SMALL
    return TestVerdict(label, plan.measurements, plan.queries)
