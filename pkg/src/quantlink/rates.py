"""Rate computations for one-bit-slicer receivers.

High-SNR capacity bounds of the blockwise receiver (exact partial-binomial
forms and their large-block / large-slicer-count asymptotes, single-user and
downlink), finite-SNR mutual information of uniform PAM over a Gaussian
stream (both the unquantized observation and the successive-approximation
slicer output), and the slicer-budget allocation search over parallel
streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .channel import ChannelMatrix, waterfill
from .combinatorics import binary_entropy, log_partial_binomial_sum

__all__ = [
    "HighSnrBounds",
    "PamStream",
    "AllocationResult",
    "blockwise_high_snr_bounds",
    "blockwise_large_l_asymptote",
    "large_block_correction",
    "blockwise_large_nq_asymptote",
    "bc_blockwise_bounds",
    "bc_blockwise_large_l_asymptote",
    "mac_timeshare",
    "mi_pam_awgn",
    "mi_quantized_pam",
    "matched_quantizer_step",
    "allocate",
    "bc_rates",
    "naive_tdma_rates",
]

_HALF_LOG2_2PIE = 0.5 * math.log2(2.0 * math.pi * math.e)

# Quadrature: total absolute tolerance on entropy integrals, in bits.
_QUAD_TOL = 1e-5
# Center spacing (in noise standard deviations) beyond which neighboring
# mixture components overlap below double precision and the MI equals the
# bit count to ~1e-11.
_SEPARATED_SPACING = 14.0
# Below this spacing the equally-spaced mixture is indistinguishable from a
# box-smoothed density (Poisson-summation aliasing < exp(-2 pi^2 / s^2)).
_BOX_SPACING = 0.5

_DMC_MAX_BITS = 10  # transition matrices are 2^n x 2^n


@dataclass(frozen=True)
class HighSnrBounds:
    """Lower/upper high-SNR rate bounds with the regime they came from."""

    lower: float
    upper: float
    regime: str  # "exact" | "large-block" | "large-slicer-count"
    zero_threshold: bool = False

    def __post_init__(self) -> None:
        if self.lower > self.upper + 1e-9:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


@dataclass(frozen=True)
class PamStream:
    """Uniform 2**n_bits-point PAM on one Gaussian stream.

    Points are amplitude * (2x - 1 - 2**n_bits) for x in 1..2**n_bits with
    amplitude sqrt(3 * power / (2**(2 n_bits) - 1)), so the mean symbol power
    equals ``power`` and the constellation is symmetric about zero.  ``gain``
    is the stream's channel gain; the observation is gain * point + unit
    Gaussian noise.
    """

    n_bits: int
    power: float
    gain: float

    def __post_init__(self) -> None:
        if self.n_bits < 1:
            raise ValueError(f"n_bits must be >= 1, got {self.n_bits}")
        if self.power < 0:
            raise ValueError(f"power must be non-negative, got {self.power}")
        if self.gain < 0:
            raise ValueError(f"gain must be non-negative, got {self.gain}")

    @property
    def amplitude(self) -> float:
        return math.sqrt(3.0 * self.power / (2.0 ** (2 * self.n_bits) - 1.0))

    @property
    def points(self) -> np.ndarray:
        m = 2**self.n_bits
        return self.amplitude * (2.0 * np.arange(1, m + 1) - 1.0 - m)


@dataclass(frozen=True)
class AllocationResult:
    """Outcome of a slicer-budget search over parallel streams."""

    bit_allocation: tuple[int, ...]
    stream_powers: np.ndarray
    rate: float


# ---------------------------------------------------------------------------
# High-SNR bounds (blockwise receiver).
# ---------------------------------------------------------------------------

def _log2_region_count(n: int, d: int, zero_threshold: bool) -> float:
    """log2 of the maximal region count, log-domain safe for large n."""
    if d <= 0:
        return 0.0
    if zero_threshold:
        if n == 1:
            return 1.0
        return 1.0 + log_partial_binomial_sum(n - 1, min(min(d, n) - 1, n - 1))
    return log_partial_binomial_sum(n, min(d, n))


def blockwise_high_snr_bounds(
    block_length: int, n_q: int, rank: int, n_r: int, zero_threshold: bool = False
) -> HighSnrBounds:
    """Exact high-SNR capacity bounds for block length l.

    lower = (1/l) log2 sum_{i<=l*rank} C(l n_q, i); the upper bound replaces
    rank by n_r.  Zero-threshold slicers use the doubled (n-1)-sum variant.
    """
    if min(block_length, n_q, rank, n_r) < 1:
        raise ValueError("block_length, n_q, rank and n_r must all be >= 1")
    if rank > n_r:
        raise ValueError(f"rank {rank} cannot exceed n_r {n_r}")
    n = block_length * n_q
    lower = _log2_region_count(n, block_length * rank, zero_threshold) / block_length
    upper = _log2_region_count(n, block_length * n_r, zero_threshold) / block_length
    return HighSnrBounds(lower, upper, "exact", zero_threshold)


def blockwise_large_l_asymptote(n_q: int, rank: int, n_r: int) -> HighSnrBounds:
    """Large-block limit n_q * h_b(alpha) with alpha = min(rank/n_q, 1/2).

    The upper asymptote uses beta = min(n_r/n_q, 1/2).  The finite-block
    deficit -(1/2l) log2(l) is reported separately by
    ``large_block_correction``; O(1/l) terms are dropped.
    """
    if min(n_q, rank, n_r) < 1:
        raise ValueError("n_q, rank and n_r must all be >= 1")
    alpha = min(rank / n_q, 0.5)
    beta = min(n_r / n_q, 0.5)
    return HighSnrBounds(
        n_q * binary_entropy(alpha), n_q * binary_entropy(beta), "large-block"
    )


def large_block_correction(block_length: int) -> float:
    """Finite-block correction -(1/2l) log2(l) to the large-block asymptote."""
    if block_length < 1:
        raise ValueError(f"block length must be >= 1, got {block_length}")
    return -math.log2(block_length) / (2.0 * block_length)


def blockwise_large_nq_asymptote(
    block_length: int, rank: int, n_r: int, n_q: int
) -> HighSnrBounds:
    """Large-slicer-count growth rank*log2(n_q) .. n_r*log2(n_q), O(1) dropped."""
    if min(block_length, rank, n_r, n_q) < 1:
        raise ValueError("all parameters must be >= 1")
    return HighSnrBounds(
        rank * math.log2(n_q), n_r * math.log2(n_q), "large-slicer-count"
    )


def bc_blockwise_bounds(
    eta: float,
    block_length: int,
    n_q: int,
    rank: int,
    n_r: int,
    zero_threshold: bool = False,
) -> HighSnrBounds:
    """Exact high-SNR per-user downlink bounds under time share eta.

    The summation cutoffs eta*l*rank and eta*l*n_r are floored to integers
    (region counts are integral).
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if min(block_length, n_q, rank, n_r) < 1:
        raise ValueError("block_length, n_q, rank and n_r must all be >= 1")
    n = block_length * n_q
    d_low = math.floor(eta * block_length * rank)
    d_high = math.floor(eta * block_length * n_r)
    lower = _log2_region_count(n, d_low, zero_threshold) / block_length
    upper = _log2_region_count(n, d_high, zero_threshold) / block_length
    return HighSnrBounds(lower, upper, "exact", zero_threshold)


def bc_blockwise_large_l_asymptote(
    eta: float, n_q: int, rank: int, n_r: int
) -> HighSnrBounds:
    """Large-block per-user downlink asymptote with alpha_j = min(eta*rank/n_q, 1/2)."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if min(n_q, rank, n_r) < 1:
        raise ValueError("n_q, rank and n_r must all be >= 1")
    alpha = min(eta * rank / n_q, 0.5)
    beta = min(eta * n_r / n_q, 0.5)
    return HighSnrBounds(
        n_q * binary_entropy(alpha), n_q * binary_entropy(beta), "large-block"
    )


def mac_timeshare(per_user_rates, eta) -> tuple[np.ndarray, float]:
    """Uplink time sharing: user j gets eta_j of its single-user rate.

    Returns (per-user rates, sum rate).  Shares must be positive and sum
    to one.
    """
    rates = np.asarray(per_user_rates, dtype=float)
    shares = np.asarray(eta, dtype=float)
    if rates.shape != shares.shape:
        raise ValueError("one share per rate required")
    if np.any(shares <= 0) or np.any(shares > 1) or abs(shares.sum() - 1.0) > 1e-9:
        raise ValueError(f"shares must lie in (0, 1] and sum to 1, got {shares}")
    scaled = rates * shares
    return scaled, float(scaled.sum())


# ---------------------------------------------------------------------------
# Mutual information of uniform PAM over a unit-noise Gaussian stream.
# ---------------------------------------------------------------------------

def _simpson_batched(fun, a: np.ndarray, b: np.ndarray, tol: float,
                     max_depth: int = 40, max_panels: int = 1 << 20) -> float:
    """Adaptive Simpson over a batch of panels [a_i, b_i].

    All active panels are refined together so the integrand is always
    evaluated on whole arrays.  Each panel is subdivided until its two-level
    Simpson estimates agree within its width-proportional share of ``tol``
    (or the depth/panel budget runs out, in which case the current refined
    estimates are accepted).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return 0.0
    total_width = float((b - a).sum())
    m = 0.5 * (a + b)
    fa, fm, fb = fun(a), fun(m), fun(b)
    s = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tols = tol * (b - a) / total_width
    total = 0.0
    for _ in range(max_depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = fun(lm), fun(rm)
        sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = sl + sr - s
        done = np.abs(err) <= 15.0 * tols
        total += float((sl + sr + err / 15.0)[done].sum())
        if np.all(done) or a.size > max_panels:
            if not np.all(done):
                total += float((sl + sr + err / 15.0)[~done].sum())
            return total
        split = ~done
        a = np.concatenate([a[split], m[split]])
        b = np.concatenate([m[split], b[split]])
        fa = np.concatenate([fa[split], fm[split]])
        fb = np.concatenate([fm[split], fb[split]])
        m = np.concatenate([lm[split], rm[split]])
        fm = np.concatenate([flm[split], frm[split]])
        s = np.concatenate([sl[split], sr[split]])
        tols = np.concatenate([tols[split] / 2.0, tols[split] / 2.0])
    return total + float(s.sum())


# Mixture components farther than this from the evaluation point underflow
# to exactly zero in double precision (exp(-39^2/2) ~ 1e-331).
_COMPONENT_WINDOW = 39.0


def _entropy_integrand(c_min: float, spacing: float, m: int):
    """-f log2 f of the uniform-comb Gaussian mixture, O(window) per point.

    Only the components within _COMPONENT_WINDOW of each point contribute at
    double precision, and on a uniform comb their indices follow from
    arithmetic, so no center array is ever materialized.
    """
    log_norm = math.log(m) + 0.5 * math.log(2.0 * math.pi)
    half_window = int(math.ceil(_COMPONENT_WINDOW / spacing)) + 1
    span = min(2 * half_window + 1, m)
    offsets = np.arange(span)

    def fun(ys: np.ndarray) -> np.ndarray:
        base = np.rint((ys - c_min) / spacing).astype(np.int64) - half_window
        base = np.clip(base, 0, m - span)
        centers = c_min + spacing * (base[:, None] + offsets[None, :])
        expo = -0.5 * (ys[:, None] - centers) ** 2
        peak = expo.max(axis=1)
        logf = peak + np.log(np.exp(expo - peak[:, None]).sum(axis=1)) - log_norm
        f = np.exp(logf)
        return -f * (logf / math.log(2.0))

    return fun


def _entropy_integrand_box(c_min: float, c_max: float, spacing: float, m: int):
    lo = c_min - 0.5 * spacing
    hi = c_max + 0.5 * spacing
    norm = m * spacing

    def fun(ys: np.ndarray) -> np.ndarray:
        f = (ndtr(ys - lo) - ndtr(ys - hi)) / norm
        out = np.zeros_like(ys)
        pos = f > 0.0
        out[pos] = -f[pos] * np.log2(f[pos])
        return out

    return fun


def _output_entropy(c_min: float, spacing: float, m: int) -> float:
    """Differential entropy (bits) of the equal-weight unit-variance comb mixture."""
    c_max = c_min + spacing * (m - 1)
    if spacing <= _BOX_SPACING:
        # Dense comb: indistinguishable from a box-smoothed density.
        fun = _entropy_integrand_box(c_min, c_max, spacing, m)
        lo = c_min - 0.5 * spacing
        hi = c_max + 0.5 * spacing
        inner = [lo - 10.0, lo - 3.0, lo + 3.0, hi - 3.0, hi + 3.0, hi + 10.0]
        if hi - lo > 20.0:
            inner += list(np.linspace(lo + 5.0, hi - 5.0, 9))
        edges = np.unique(np.clip(np.array(sorted(inner)), lo - 10.0, hi + 10.0))
        return _simpson_batched(fun, edges[:-1], edges[1:], _QUAD_TOL)

    fun = _entropy_integrand(c_min, spacing, m)
    window = int(math.ceil(40.0 / spacing)) + 1
    left_end = min(window, m)
    right_start = max(m - window, left_end)
    interior = right_start - left_end

    # Cell i spans [c_i - spacing/2, c_i + spacing/2]; interior cells (a full
    # component window from both ends) are exact translates of one another,
    # so one representative covers them all.
    def cell_edges(indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo_edge = c_min + spacing * (indices - 0.5)
        return lo_edge, lo_edge + spacing

    idx = np.concatenate([np.arange(left_end), np.arange(right_start, m)])
    a, b = cell_edges(idx)
    a = np.concatenate([[c_min - 10.0], a])
    b = np.concatenate([[c_min - 0.5 * spacing], b])
    a = np.concatenate([a, [c_max + 0.5 * spacing]])
    b = np.concatenate([b, [c_max + 10.0]])
    total = _simpson_batched(fun, a, b, 0.5 * _QUAD_TOL)
    if interior > 0:
        rep_tol = max(1e-13, 0.25 * _QUAD_TOL / interior)
        rep_lo = c_min + spacing * (m // 2 - 0.5)
        rep = _simpson_batched(
            fun, np.array([rep_lo, rep_lo + 0.5 * spacing]),
            np.array([rep_lo + 0.5 * spacing, rep_lo + spacing]), rep_tol
        )
        total += interior * rep
    return total


def mi_pam_awgn(stream: PamStream) -> float:
    """Mutual information (bits/use) of the stream's unquantized observation.

    I(x; y) with y = gain * x + n, n ~ N(0,1): the mixture output entropy is
    integrated by adaptive Simpson (absolute tolerance ~1e-4 bits) and the
    Gaussian conditional entropy subtracted.  The estimate is clamped into
    the information-theoretic range [0, n_bits]; constellations whose
    received points sit more than ~14 noise deviations apart saturate at
    exactly n_bits (residual below 1e-10 bits).
    """
    m = 2**stream.n_bits
    spacing = 2.0 * stream.amplitude * stream.gain
    if spacing <= 0.0:
        return 0.0
    if spacing >= _SEPARATED_SPACING:
        return float(stream.n_bits)
    c_min = -0.5 * spacing * (m - 1)
    entropy = _output_entropy(c_min, spacing, m)
    info = entropy - _HALF_LOG2_2PIE
    return min(float(stream.n_bits), max(0.0, info))


def matched_quantizer_step(stream: PamStream) -> float:
    """Slicer step placing decision boundaries midway between received points."""
    return 2.0 * stream.amplitude * stream.gain


def mi_quantized_pam(stream: PamStream, delta: float) -> float:
    """Mutual information of the successive-approximation slicer output.

    The channel from the PAM symbol to the bin index is a discrete
    memoryless channel whose transition probabilities are Gaussian tail
    differences across the bin boundaries delta * k,
    k in -(2^(n-1)-1) .. 2^(n-1)-1; the MI is an exact finite sum.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if stream.n_bits > _DMC_MAX_BITS:
        raise ValueError(
            f"transition matrix would be 2^{stream.n_bits} square; limit is {_DMC_MAX_BITS} bits"
        )
    m = 2**stream.n_bits
    centers = stream.gain * stream.points
    half = m // 2
    bounds = delta * np.arange(-(half - 1), half)
    lo = np.concatenate([[-np.inf], bounds])[None, :] - centers[:, None]
    hi = np.concatenate([bounds, [np.inf]])[None, :] - centers[:, None]
    with np.errstate(invalid="ignore"):
        upper_tail = hi + lo > 0  # evaluate in whichever tail keeps precision
        trans = np.where(upper_tail, ndtr(-lo) - ndtr(-hi), ndtr(hi) - ndtr(lo))
    trans = np.maximum(trans, 0.0)
    marginal = trans.mean(axis=0)
    info = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(trans > 0.0, trans / marginal[None, :], 1.0)
        info = float(np.sum(np.where(trans > 0.0, trans * np.log2(ratio), 0.0)) / m)
    return min(float(stream.n_bits), max(0.0, info))


# ---------------------------------------------------------------------------
# Slicer-budget allocation over parallel streams.
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _stream_value_table(sigmas, powers, n_q, mode, depth_of_bits):
    """value[k][b] = MI of stream k given b slicers (depth_of_bits(b) levels)."""
    table = []
    for sigma, power in zip(sigmas, powers):
        row = [0.0]
        for b in range(1, n_q + 1):
            depth = depth_of_bits(b)
            if depth < 1 or power <= 0.0:
                row.append(0.0)
                continue
            stream = PamStream(depth, float(power), float(sigma))
            if mode == "quantized":
                row.append(mi_quantized_pam(stream, matched_quantizer_step(stream)))
            else:
                row.append(mi_pam_awgn(stream))
        table.append(row)
    return table


def _search_enumerate(table, n_q: int) -> tuple[tuple[int, ...], float]:
    best_bits: tuple[int, ...] | None = None
    best = -1.0
    for bits in _compositions(n_q, len(table)):
        value = sum(table[k][b] for k, b in enumerate(bits))
        if value > best:
            best = value
            best_bits = bits
    assert best_bits is not None
    return best_bits, best


def _search_dp(table, n_q: int) -> tuple[tuple[int, ...], float]:
    streams = len(table)
    best = [[0.0] * (n_q + 1) for _ in range(streams + 1)]
    for k in range(streams - 1, -1, -1):
        row = table[k]
        nxt = best[k + 1]
        cur = best[k]
        for r in range(n_q + 1):
            cur[r] = max(row[b] + nxt[r - b] for b in range(r + 1))
    bits = []
    remaining = n_q
    for k in range(streams):
        row = table[k]
        nxt = best[k + 1]
        target = best[k][remaining]
        for b in range(remaining + 1):
            if row[b] + nxt[remaining - b] == target:
                bits.append(b)
                remaining -= b
                break
    return tuple(bits), best[0][n_q]


def allocate(
    channel: ChannelMatrix,
    total_power: float,
    n_q: int,
    mode: str = "unquantized",
    method: str = "auto",
) -> AllocationResult:
    """Best split of n_q slicers across the channel's parallel streams.

    Powers come from waterfilling the stream gains (transmitter side); the
    slicer split maximizing the summed per-stream MI is then found on the
    receiver side.  ``method="enumerate"`` walks all weak compositions in
    lexicographic order (desk scale: at most 8 streams and 32 slicers);
    ``method="dp"`` solves the same separable problem exactly by dynamic
    programming and scales to wide channels; ``"auto"`` picks for you.  Ties
    go to the lexicographically smallest composition.
    """
    if n_q < 1:
        raise ValueError(f"n_q must be >= 1, got {n_q}")
    if mode not in ("unquantized", "quantized"):
        raise ValueError(f"mode must be 'unquantized' or 'quantized', got {mode!r}")
    sigmas = channel.singular_values
    streams = sigmas.size
    powers = waterfill(sigmas, total_power).per_stream_power
    table = _stream_value_table(sigmas, powers, n_q, mode, lambda b: b)
    if method == "auto":
        method = "enumerate" if (streams <= 8 and n_q <= 32) else "dp"
    if method == "enumerate":
        if streams > 8 or n_q > 32:
            raise ValueError(
                f"composition space too large to enumerate (streams={streams}, n_q={n_q}); use method='dp'"
            )
        bits, rate = _search_enumerate(table, n_q)
    elif method == "dp":
        bits, rate = _search_dp(table, n_q)
    else:
        raise ValueError(f"method must be 'auto', 'enumerate' or 'dp', got {method!r}")
    return AllocationResult(bits, powers, float(rate))


def _check_shares(eta) -> np.ndarray:
    shares = np.asarray(eta, dtype=float)
    if np.any(shares <= 0) or np.any(shares > 1) or abs(shares.sum() - 1.0) > 1e-9:
        raise ValueError(f"shares must lie in (0, 1] and sum to 1, got {shares}")
    return shares


def bc_rates(
    channels, eta, budgets, powers, mode: str = "unquantized"
) -> list[float]:
    """Per-user downlink rates with time sharing and deepened quantization.

    During its share eta_j, user j quantizes each held observation over
    floor(b/eta_j) uses for every slicer group of size b, so a stream
    allocated b slicers carries a 2**floor(b/eta_j)-point constellation; the
    resulting best summed MI is scaled by eta_j.
    """
    shares = _check_shares(eta)
    if not (len(channels) == shares.size == len(budgets) == len(powers)):
        raise ValueError("channels, eta, budgets and powers must align")
    rates = []
    for channel, share, n_q, power in zip(channels, shares, budgets, powers):
        if n_q < 1:
            raise ValueError(f"every user budget must be >= 1, got {n_q}")
        sigmas = channel.singular_values
        stream_powers = waterfill(sigmas, power).per_stream_power
        table = _stream_value_table(
            sigmas, stream_powers, n_q, mode, lambda b: math.floor(b / share)
        )
        _, value = _search_dp(table, n_q)
        rates.append(float(share) * float(value))
    return rates


def naive_tdma_rates(
    channels, eta, budgets, powers, mode: str = "unquantized"
) -> list[float]:
    """Plain time sharing: each user runs the single-user scheme in its slot.

    No quantization deepening: user j's rate is eta_j times its single-user
    allocation-search rate.
    """
    shares = _check_shares(eta)
    if not (len(channels) == shares.size == len(budgets) == len(powers)):
        raise ValueError("channels, eta, budgets and powers must align")
    rates = []
    for channel, share, n_q, power in zip(channels, shares, budgets, powers):
        result = allocate(channel, power, n_q, mode=mode, method="auto")
        rates.append(float(share) * result.rate)
    return rates
