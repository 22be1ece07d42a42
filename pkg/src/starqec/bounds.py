"""Analytic threshold machinery for large codes.

Kullback-Leibler divergence, the Chernoff-Hoeffding bound on the probability
of an uncorrectable error pattern, the exact binomial-tail oracle, the random
coding (Gilbert-Varshamov) threshold, and the variance bound implied by a
given failure probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.stats import binom

GV_DISTANCE_RATE = 0.1893


class VacuousBoundError(ValueError):
    """Error rate at or above d/(2n): the exponential bound is vacuous."""


@dataclass(frozen=True)
class FailureBound:
    n: int
    d: float
    p: float
    bound: float


def kl_divergence(x: float, y: float) -> float:
    """D(x || y) = x ln(x/y) + (1-x) ln((1-x)/(1-y)), with 0 ln 0 = 0."""
    if not 0.0 < y < 1.0:
        raise ValueError(f"reference probability must be in (0, 1), got {y}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {x}")
    out = 0.0
    if x > 0.0:
        out += x * math.log(x / y)
    if x < 1.0:
        out += (1.0 - x) * math.log((1.0 - x) / (1.0 - y))
    return out


def chernoff_fail_bound(n: int, d: float, p: float) -> FailureBound:
    """exp(-D(d/2n || p) n), valid when p < d/(2n)."""
    if n < 1:
        raise ValueError("need n >= 1")
    x = d / (2.0 * n)
    if not p < x:
        raise VacuousBoundError(
            f"p = {p} is not below d/(2n) = {x}: the bound is vacuous"
        )
    if p <= 0.0:
        return FailureBound(n=n, d=d, p=p, bound=0.0)
    return FailureBound(n=n, d=d, p=p, bound=math.exp(-kl_divergence(x, p) * n))


def exact_fail_probability(n: int, d: float, p: float) -> float:
    """P[X >= ceil(d/2)] for X ~ Binomial(n, p).

    At least d/2 errors is uncorrectable; the regularized incomplete beta
    behind ``binom.sf`` keeps the tail accurate for n up to 1e4.
    """
    if n < 1 or n > 10 ** 4:
        raise ValueError("need 1 <= n <= 1e4")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    k = math.ceil(d / 2.0)
    if k > n:
        return 0.0
    return float(binom.sf(k - 1, n, p))


def gv_threshold() -> float:
    """Per-qubit noise threshold d/(2n) achievable by random codes: 0.09465."""
    return GV_DISTANCE_RATE / 2.0


def gv_threshold_display() -> str:
    """The threshold as a truncated percentage string."""
    return f"{math.floor(gv_threshold() * 1000) / 10:.1f}%"


def variance_bound_from_fail(
    gamma: float, eps_fail: float, diagonal_noise: bool = False
) -> float:
    """Phase-variance ceiling implied by an uncorrectable-error probability.

    1/(gamma^2 (1 - 2 eps_fail)^2) in general; for diagonal noise (dephasing,
    depolarizing, amplitude damping) the uncorrectable remainder carries no
    off-diagonal signal and the tighter 1/(gamma^2 (1 - eps_fail)^2) holds.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if not 0.0 <= eps_fail <= 0.5:
        raise ValueError(f"eps_fail must be in [0, 1/2], got {eps_fail}")
    shrink = (1.0 - eps_fail) if diagonal_noise else (1.0 - 2.0 * eps_fail)
    if shrink <= 0.0:
        return math.inf
    return 1.0 / (gamma ** 2 * shrink ** 2)
