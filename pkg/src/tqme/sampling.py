"""Event sampling, fidelity estimation with Wilson intervals, and sample-count planning.

Dimensions are plain ints; ``d = 0`` stands for the d -> infinity limit, where
the gate fidelity becomes ``2P - 1``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import binom, norm

from .errors import PlannerError, RangeError, ValidationError
from .hom import OutcomeDistribution
from .linalg import RandomStream, as_rng

INFINITE_D = 0
COVERAGE_CHUNK = 1024


@dataclass(frozen=True)
class EventTally:
    n_bunch: int
    n_anti: int

    @property
    def total(self) -> int:
        return self.n_bunch + self.n_anti


@dataclass(frozen=True)
class FidelityEstimate:
    p_hat: float
    f_gate_hat: float
    ci_low: float
    ci_high: float
    confidence: float
    d: int
    shots: float
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SamplePlan:
    n_required: int
    P: float
    d: int
    epsilon: float
    confidence: float
    method: str
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _check_p(p, closed=True):
    ok = 0.0 <= p <= 1.0 if closed else 0.0 < p < 1.0
    if not ok:
        raise RangeError(f"probability {p} out of range")


def _check_confidence(confidence):
    if not 0.0 < confidence < 1.0:
        raise RangeError(f"confidence {confidence} must lie in (0, 1)")


def _check_d(d):
    if d < 0:
        raise RangeError("d must be >= 1, or 0 for the d -> infinity limit")


def gate_fidelity_from_p(p, d: int):
    """Affine bunching -> gate fidelity map; vectorized over ``p``."""
    p = np.asarray(p, dtype=float)
    if d == INFINITE_D:
        out = 2.0 * p - 1.0
    else:
        out = (d * (2.0 * p - 1.0) + 1.0) / (d + 1.0)
    return out if out.ndim else float(out)


def slope(d: int) -> float:
    """dF/dP = 2d / (d + 1), tending to 2."""
    return 2.0 if d == INFINITE_D else 2.0 * d / (d + 1.0)


def z_quantile(confidence: float) -> float:
    """Two-sided standard normal quantile."""
    _check_confidence(confidence)
    return float(norm.ppf(0.5 + confidence / 2.0))


def sample_events(p: float, n: int, rng) -> EventTally:
    _check_p(p)
    if n < 1:
        raise ValidationError("n must be >= 1")
    k = int(as_rng(rng).binomial(n, p))
    return EventTally(k, n - k)


def sample_from_distribution(dist: OutcomeDistribution, n: int, rng) -> EventTally:
    """Multinomial detector-pair sampling, classified by rail."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    p = dist.flat_probabilities()
    counts = as_rng(rng).multinomial(n, p / p.sum())
    k = int(counts[dist.bunching_mask()].sum())
    return EventTally(k, n - k)


def wilson_interval(successes: float, total: float, confidence: float) -> tuple[float, float]:
    if total <= 0:
        raise ValidationError("empty sample")
    z = z_quantile(confidence)
    p = successes / total
    z2n = z * z / total
    centre = (p + z2n / 2.0) / (1.0 + z2n)
    half = z * math.sqrt(p * (1.0 - p) / total + z2n / (4.0 * total)) / (1.0 + z2n)
    lo = 0.0 if successes <= 0 else max(0.0, centre - half)
    hi = 1.0 if successes >= total else min(1.0, centre + half)
    return lo, hi


def estimate_from_counts(n_bunch: float, total: float, d: int, confidence: float = 0.95,
                         seed: int | None = None) -> FidelityEstimate:
    """Like :func:`estimate_fidelity` but tolerates fractional (unfolded) counts."""
    if total <= 0:
        raise ValidationError("cannot estimate from an empty tally")
    _check_confidence(confidence)
    _check_d(d)
    p_hat = n_bunch / total
    lo, hi = wilson_interval(n_bunch, total, confidence)
    f_min = 0.0 if d == INFINITE_D else 1.0 / (d + 1.0)

    def clamp(x):
        return min(1.0, max(f_min, x))

    f_hat = clamp(gate_fidelity_from_p(p_hat, d))
    return FidelityEstimate(
        p_hat=p_hat,
        f_gate_hat=f_hat,
        ci_low=min(f_hat, clamp(gate_fidelity_from_p(lo, d))),
        ci_high=max(f_hat, clamp(gate_fidelity_from_p(hi, d))),
        confidence=confidence,
        d=d,
        shots=total,
        seed=seed,
    )


def estimate_fidelity(tally: EventTally, d: int, confidence: float = 0.95,
                      seed: int | None = None) -> FidelityEstimate:
    if tally.total < 1:
        raise ValidationError("cannot estimate from an empty tally")
    return estimate_from_counts(tally.n_bunch, tally.total, d, confidence, seed)


def required_samples_analytic(p: float, d: int, epsilon: float, confidence: float = 0.95) -> SamplePlan:
    """Normal-approximation event count for a fidelity half-width ``epsilon``."""
    _check_p(p)
    _check_d(d)
    if epsilon <= 0:
        raise RangeError("epsilon must be positive")
    z = z_quantile(confidence)
    if p in (0.0, 1.0):
        return SamplePlan(1, p, d, epsilon, confidence, "analytic", degenerate=True)
    n = math.ceil(z * z * p * (1.0 - p) * slope(d) ** 2 / epsilon**2)
    return SamplePlan(max(n, 1), p, d, epsilon, confidence, "analytic")


def _as_stream(rng) -> RandomStream:
    if isinstance(rng, RandomStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RandomStream(int(rng))
    raise ValidationError("coverage checks need a RandomStream or an integer seed")


def _coverage_chunk(stream, chunk, size, n, p_true, d, epsilon):
    u = stream.child(f"coverage-chunk-{chunk}").generator.random(size)
    # inverse-CDF draws: the same uniforms are reused for every n, which keeps
    # coverage comparisons across n and d free of independent Monte Carlo noise
    k = binom.ppf(u, n, p_true)
    err = np.abs(gate_fidelity_from_p(k / n, d) - gate_fidelity_from_p(p_true, d))
    return int(np.count_nonzero(err <= epsilon + 1e-12))


def coverage_check(n: int, p_true: float, d: int, epsilon: float, trials: int, rng,
                   workers: int = 1) -> float:
    """Fraction of simulated n-event experiments whose fidelity estimate lands within ``epsilon``.

    Trials are processed in fixed chunks with per-chunk streams, so the result
    does not depend on ``workers``.
    """
    if trials < 100:
        raise ValidationError("coverage_check needs at least 100 trials")
    if n < 1:
        raise ValidationError("n must be >= 1")
    _check_p(p_true)
    _check_d(d)
    stream = _as_stream(rng)
    sizes = [min(COVERAGE_CHUNK, trials - s) for s in range(0, trials, COVERAGE_CHUNK)]
    args = [(stream, c, size, n, p_true, d, epsilon) for c, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = list(pool.map(lambda a: _coverage_chunk(*a), args))
    else:
        hits = [_coverage_chunk(*a) for a in args]
    return sum(hits) / trials


def required_samples_empirical(p: float, d: int, epsilon: float, confidence: float = 0.95,
                               trials: int = 10_000, rng=0, workers: int = 1,
                               max_n: int = 10**9) -> SamplePlan:
    """Smallest n (by bracketing + bisection from the analytic value) with coverage >= confidence."""
    start = required_samples_analytic(p, d, epsilon, confidence)
    if start.degenerate:
        return SamplePlan(1, p, d, epsilon, confidence, "empirical", degenerate=True)
    stream = _as_stream(rng)

    def ok(n):
        return coverage_check(n, p, d, epsilon, trials, stream, workers) >= confidence

    n0 = start.n_required
    if ok(n0):
        hi, lo = n0, n0 // 2
        while lo >= 1 and ok(lo):
            hi, lo = lo, lo // 2
        if lo < 1:
            return SamplePlan(1, p, d, epsilon, confidence, "empirical")
    else:
        lo, hi = n0, 2 * n0
        while not ok(hi):
            lo, hi = hi, 2 * hi
            if hi > max_n:
                raise PlannerError(f"no n <= {max_n} reaches coverage {confidence}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return SamplePlan(hi, p, d, epsilon, confidence, "empirical")
