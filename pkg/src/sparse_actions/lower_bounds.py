"""Hard instances and analytic formulas behind the impossibility results.

Three families: a many-armed mean-identification instance (error stays
above a constant until the pull budget scales with the arm count), a
two-point coverage instance (an action pulled ``n`` times with signal
norm ``b`` cannot be detected when ``n * b^2`` is small), and randomized
support packings feeding the Fano bound.  The formula helpers are exact
arithmetic; the Monte Carlo runners estimate the corresponding error
probabilities for comparison against those bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SupportSet
from .seeding import rng_for


@dataclass(frozen=True)
class BestArmInstance:
    """All arms at mean 0 except ``j_star`` at mean ``delta``; unit noise."""

    m: int
    delta: float
    j_star: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("need at least two arms")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not 0 <= self.j_star < self.m:
            raise ValueError(f"j_star must lie in [0, {self.m})")


@dataclass(frozen=True)
class TwoPointInstance:
    """Null: probed action has a zero row.  Alternative: the row is ``b * u``."""

    d: int
    b: float
    u: np.ndarray
    j: int
    n: int

    def __post_init__(self) -> None:
        if self.d < 1 or self.n < 1 or self.j < 0:
            raise ValueError("d and n must be positive, j nonnegative")
        if self.b < 0:
            raise ValueError("b must be nonnegative")
        u = np.asarray(self.u, dtype=float)
        if u.shape != (self.d,):
            raise ValueError(f"u must have shape ({self.d},)")
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError("u must be a unit vector")
        object.__setattr__(self, "u", u)

    @classmethod
    def axis_aligned(cls, d: int, b: float, n: int, j: int = 0) -> "TwoPointInstance":
        u = np.zeros(d)
        u[0] = 1.0
        return cls(d, b, u, j, n)


def kl_gaussian_shift(delta: float) -> float:
    """KL divergence between unit-variance Gaussians whose means differ by ``delta``."""
    return delta * delta / 2.0


def bh_error_lower_bound(kl: float) -> float:
    """Lower bound ``exp(-kl)/2`` on the summed errors of any binary test."""
    if kl < 0:
        raise ValueError("kl must be nonnegative")
    return 0.5 * math.exp(-kl)


def two_point_coverage_kl(n: int, b: float) -> float:
    """Divergence accumulated by ``n`` pulls of an action with signal norm ``b``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return n * b * b / 2.0


def pinsker_tv_bound(kl: float) -> float:
    """Total-variation ceiling ``min(1, sqrt(kl/2))``."""
    if kl < 0:
        raise ValueError("kl must be nonnegative")
    return min(1.0, math.sqrt(kl / 2.0))


def fano_error_lower_bound(t: int, b: float, log_packing: float) -> float:
    """Identification-error floor ``max(0, 1 - (b^2 t/2 + ln 2) / log_packing)``."""
    if log_packing <= 0:
        raise ValueError("log_packing must be positive")
    return max(0.0, 1.0 - (b * b * t / 2.0 + math.log(2.0)) / log_packing)


def support_packing(
    m: int,
    k: int,
    seed: int,
    *,
    max_rejections: int = 1000,
    max_size: int = 1024,
) -> list[SupportSet]:
    """Greedy randomized family of size-``k`` supports, pairwise far apart.

    Draw uniform size-``k`` subsets and keep each one whose symmetric
    difference with every kept set is at least ``ceil(k/2)``; stop after
    ``max_rejections`` consecutive rejections or at ``max_size`` kept sets
    (the greedy accepts almost every draw when ``m`` is large, so an upper
    cap keeps the construction desk-sized).
    """
    if not 1 <= k <= m // 2:
        raise ValueError(f"need 1 <= k <= m/2, got k={k}, m={m}")
    rng = rng_for(seed, 0x9AC)
    threshold = (k + 1) // 2
    kept: list[frozenset[int]] = []
    out: list[SupportSet] = []
    rejections = 0
    while rejections < max_rejections and len(out) < max_size:
        cand = frozenset(int(j) for j in rng.choice(m, size=k, replace=False))
        if all(len(cand ^ s) >= threshold for s in kept):
            kept.append(cand)
            out.append(SupportSet(tuple(sorted(cand))))
            rejections = 0
        else:
            rejections += 1
    return out


@dataclass(frozen=True)
class BestArmEstimate:
    error_prob: float
    ci_halfwidth: float


def run_best_arm_trials(inst: BestArmInstance, t: int, trials: int, seed: int) -> BestArmEstimate:
    """Error rate of empirical-mean argmax after ``t`` round-robin pulls.

    Model: one-dimensional states fixed at 1, reward ``theta_a + N(0, 1)``.
    Round-robin gives arm ``j`` a known pull count ``n_j``, and the
    empirical mean of ``n_j`` unit-variance draws is exactly
    ``N(theta_j, 1/n_j)``, so the per-arm means are sampled from that law
    directly (an exact shortcut, not an approximation).  Ties in the final
    argmax go to the lowest index.  Returns the miss rate with a 95%
    normal-approximation half-width.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials for a meaningful estimate")
    if t < inst.m:
        raise ValueError(f"t={t} gives some arm zero pulls; need t >= m={inst.m}")
    counts = np.full(inst.m, t // inst.m, dtype=float)
    counts[: t % inst.m] += 1
    theta = np.zeros(inst.m)
    theta[inst.j_star] = inst.delta
    rng = rng_for(seed, 0xBA)
    means = theta + rng.standard_normal((trials, inst.m)) / np.sqrt(counts)
    picks = np.argmax(means, axis=1)
    p = float(np.mean(picks != inst.j_star))
    return BestArmEstimate(p, 1.96 * math.sqrt(p * (1.0 - p) / trials))


@dataclass(frozen=True)
class CoverageEstimate:
    test_error_sum: float
    ci_halfwidth: float
    reject_rate_null: float
    accept_rate_alt: float


def run_coverage_trials(inst: TwoPointInstance, trials: int, seed: int) -> CoverageEstimate:
    """Summed errors of the exact likelihood-ratio test on the two-point pair.

    Each trial logs ``n`` pulls of the probed action with fresh standard
    normal states.  Writing ``s_t = <u, z_t>`` (itself standard normal),
    the per-pull mean under the alternative is ``b * s_t`` and the exact
    log likelihood ratio is ``sum_t (r_t * b * s_t - (b * s_t)^2 / 2)``;
    the test declares the alternative when it is positive.  The null and
    alternative runs use independent streams.  Returns
    ``P0(reject) + P1(accept)`` with a combined 95% half-width.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials for a meaningful estimate")
    b, n = inst.b, inst.n

    def _log_lr(rng: np.random.Generator, signal_present: bool) -> np.ndarray:
        s = rng.standard_normal((trials, n))
        noise = rng.standard_normal((trials, n))
        mean = b * s
        r = mean + noise if signal_present else noise
        return np.sum(r * mean - 0.5 * mean * mean, axis=1)

    reject_null = float(np.mean(_log_lr(rng_for(seed, 0xC0), False) > 0.0))
    accept_alt = float(np.mean(_log_lr(rng_for(seed, 0xC1), True) <= 0.0))
    var = reject_null * (1.0 - reject_null) + accept_alt * (1.0 - accept_alt)
    return CoverageEstimate(
        test_error_sum=reject_null + accept_alt,
        ci_halfwidth=1.96 * math.sqrt(var / trials),
        reject_rate_null=reject_null,
        accept_rate_alt=accept_alt,
    )
