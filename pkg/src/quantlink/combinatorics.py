"""Region-count combinatorics and log-domain binomial machinery.

The count of sign patterns a bank of one-bit slicers can realize on a
d-dimensional signal space is governed by partial binomial sums (Winder's
formula).  This module provides those counts exactly, plus log-domain and
Stirling-style asymptotic evaluations that stay finite when the lifted
problem size reaches thousands of slicers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "RegionCountQuery",
    "binary_entropy",
    "max_regions",
    "log_binomial",
    "log_binomial_asymptotic",
    "log_partial_binomial_sum",
    "asymptotic_window",
]

_LN2 = math.log(2.0)

# Partial sums use exact big integers up to this n, log-domain summation above.
_EXACT_SUM_LIMIT = 256


@dataclass(frozen=True)
class RegionCountQuery:
    """Parameters of a region-count question.

    num_hyperplanes: number of one-bit slicers (hyperplanes) cutting the space.
    dimension: dimension of the signal space being cut.
    zero_threshold: True when every slicer threshold is pinned to zero, which
        forces all hyperplanes through the origin and reduces the count.
    """

    num_hyperplanes: int
    dimension: int
    zero_threshold: bool = False

    def __post_init__(self) -> None:
        if self.num_hyperplanes < 1:
            raise ValueError(f"num_hyperplanes must be >= 1, got {self.num_hyperplanes}")
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")


def binary_entropy(p: float) -> float:
    """Binary entropy in bits, with the 0*log(0) = 0 convention."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy requires p in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def max_regions(query: RegionCountQuery) -> int:
    """Maximum number of decision regions n hyperplanes cut a d-space into.

    General-position thresholds give sum_{i=0}^{min(d,n)} C(n, i); all-zero
    thresholds give 2 * sum_{i=0}^{min(d,n)-1} C(n-1, i).  Exact integer
    arithmetic throughout.
    """
    n = query.num_hyperplanes
    d = query.dimension
    if query.zero_threshold:
        return 2 * sum(math.comb(n - 1, i) for i in range(min(d, n)))
    return sum(math.comb(n, i) for i in range(min(d, n) + 1))


def log_binomial(n: int, k: int) -> float:
    """log2 C(n, k) computed via log-gamma; safe up to n ~ 10**6."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / _LN2


def asymptotic_window(n: int) -> tuple[float, float]:
    """Open interval of ratios where the Stirling expansion below is valid."""
    lo = 0.5 * (1.0 - math.sqrt(1.0 - 1.0 / (3.0 * n)))
    hi = 0.5 * (1.0 + math.sqrt(1.0 - 4.0 / (12.0 * n + 1.0)))
    return lo, hi


def log_binomial_asymptotic(n: int, lam: float) -> float:
    """Stirling asymptote of log2 C(n, lam*n), additive O(1) term dropped.

    Returns n*h_b(lam) - (1/2)log2(n) - (1/2)log2(2*pi*lam*(1-lam)).  This is
    an asymptote without the additive constant: the gap to the exact value is
    bounded, not zero.  ``lam`` must lie strictly inside the finite-n validity
    window (see ``asymptotic_window``); boundary values are rejected.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    lo, hi = asymptotic_window(n)
    if not lo < lam < hi:
        raise ValueError(
            f"lam={lam} outside the admissible open interval ({lo:.6g}, {hi:.6g}) for n={n}"
        )
    return (
        n * binary_entropy(lam)
        - 0.5 * math.log2(n)
        - 0.5 * math.log2(2.0 * math.pi * lam * (1.0 - lam))
    )


def _log2_bigint(value: int) -> float:
    # math.log2 overflows converting ints above 2**1024; rescale by hand.
    bits = value.bit_length()
    if bits <= 53:
        return math.log2(value)
    shift = bits - 53
    return shift + math.log2(value >> shift)


def log_partial_binomial_sum(n: int, k: int) -> float:
    """log2 of sum_{i=0}^{k} C(n, i), exact to ~1e-12 relative.

    Small n uses exact big-integer summation; larger n switches to a
    max-shifted log-domain accumulation of the individual log-binomials.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    if n <= _EXACT_SUM_LIMIT:
        return _log2_bigint(sum(math.comb(n, i) for i in range(k + 1)))
    if k == n:
        return float(n)
    if 2 * k > n:
        # Complement is shorter and better conditioned: sum = 2^n - tail.
        tail = _log_sum_terms(n, n - k - 1)
        return n + math.log1p(-math.exp((tail - n) * _LN2)) / _LN2
    return _log_sum_terms(n, k)


def _log_sum_terms(n: int, k: int) -> float:
    terms = [log_binomial(n, i) for i in range(k + 1)]
    peak = max(terms)
    acc = sum(math.exp((t - peak) * _LN2) for t in terms)
    return peak + math.log2(acc)
