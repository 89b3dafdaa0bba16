"""Channel models and transmitter-side processing.

Real-valued MIMO links y = Hx + n with unit-variance Gaussian noise: Rayleigh
sampling, cached SVD, waterfilling, Shannon and truncated-Shannon capacity,
and the block lifting used by delay-network receivers.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChannelMatrix",
    "PowerAllocation",
    "rayleigh_sample",
    "waterfill",
    "shannon_capacity",
    "truncated_capacity",
    "kron_block",
    "matrix_to_text",
    "matrix_from_text",
]

# Singular values above this fraction of the largest count toward the rank.
RANK_REL_TOL = 1e-10


@dataclass(frozen=True)
class ChannelMatrix:
    """Real n_r x n_t gain matrix with its (rank-truncated) SVD cached.

    ``left`` (n_r x s), ``singular_values`` (descending, all > tolerance) and
    ``right`` (s x n_t, rows are right singular vectors) satisfy
    left @ diag(singular_values) @ right == entries up to 1e-9 * ||H||.
    """

    entries: np.ndarray
    left: np.ndarray = field(init=False, repr=False, compare=False)
    singular_values: np.ndarray = field(init=False, repr=False, compare=False)
    right: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.size == 0:
            raise ValueError("channel matrix must be a non-empty 2-D array")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)
        u, s, vt = np.linalg.svd(entries, full_matrices=False)
        keep = s > RANK_REL_TOL * (s[0] if s.size else 0.0)
        object.__setattr__(self, "left", u[:, keep])
        object.__setattr__(self, "singular_values", s[keep])
        object.__setattr__(self, "right", vt[keep])

    @property
    def n_r(self) -> int:
        return self.entries.shape[0]

    @property
    def n_t(self) -> int:
        return self.entries.shape[1]

    @property
    def rank(self) -> int:
        return int(self.singular_values.size)


@dataclass(frozen=True)
class PowerAllocation:
    """Non-negative per-stream powers summing to at most the budget."""

    per_stream_power: np.ndarray
    total_budget: float

    def __post_init__(self) -> None:
        powers = np.array(self.per_stream_power, dtype=float)
        powers.flags.writeable = False
        if np.any(powers < 0):
            raise ValueError("per-stream powers must be non-negative")
        if powers.sum() > self.total_budget + 1e-9:
            raise ValueError(
                f"allocated {powers.sum()} exceeds budget {self.total_budget}"
            )
        object.__setattr__(self, "per_stream_power", powers)
        object.__setattr__(self, "total_budget", float(self.total_budget))


def rayleigh_sample(n_r: int, n_t: int, seed: int) -> ChannelMatrix:
    """Channel with i.i.d. standard-normal entries, deterministic per seed."""
    if n_r < 1 or n_t < 1:
        raise ValueError(f"need n_r, n_t >= 1, got {n_r}, {n_t}")
    rng = np.random.default_rng(seed)
    return ChannelMatrix(rng.standard_normal((n_r, n_t)))


def waterfill(singular_values: np.ndarray, total_power: float) -> PowerAllocation:
    """Waterfilling P_k = max(0, mu - 1/sigma_k^2) with sum P_k = total_power.

    The water level is found by bisection until the power sum matches the
    budget to 1e-10 relative; streams whose inverse channel gain sits above
    the water level receive exactly zero.
    """
    sigma = np.asarray(singular_values, dtype=float).reshape(-1)
    if sigma.size == 0:
        raise ValueError("waterfill needs at least one singular value")
    if np.any(sigma <= 0):
        raise ValueError("singular values must be positive")
    if total_power <= 0:
        raise ValueError(f"total power must be positive, got {total_power}")
    inv = 1.0 / sigma**2
    lo = float(inv.min())
    hi = float(inv.max()) + total_power
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        allocated = np.maximum(0.0, mu - inv).sum()
        if abs(allocated - total_power) <= 1e-12 * total_power:
            break
        if allocated > total_power:
            hi = mu
        else:
            lo = mu
    # Polish: solve the water level exactly on the active set the bisection
    # identified, so the budget matches to machine precision.
    powers = np.maximum(0.0, 0.5 * (lo + hi) - inv)
    active = powers > 0.0
    for _ in range(sigma.size):
        mu = (total_power + inv[active].sum()) / active.sum()
        powers = np.maximum(0.0, mu - inv)
        refreshed = powers > 0.0
        if np.array_equal(refreshed, active):
            break
        active = refreshed
    excess = powers.sum() - total_power
    if excess > 0.0:
        powers *= total_power / powers.sum()
    return PowerAllocation(powers, total_power)


def shannon_capacity(channel: ChannelMatrix, total_power: float) -> float:
    """Capacity sum_k log2(1 + sigma_k^2 P_k) under waterfilled powers."""
    allocation = waterfill(channel.singular_values, total_power)
    gains = channel.singular_values**2
    return float(np.sum(np.log2(1.0 + gains * allocation.per_stream_power)))


def truncated_capacity(channel: ChannelMatrix, total_power: float, n_q: int) -> float:
    """min(n_q, Shannon capacity): the slicer-budget benchmark bound."""
    if n_q < 1:
        raise ValueError(f"n_q must be >= 1, got {n_q}")
    return min(float(n_q), shannon_capacity(channel, total_power))


def kron_block(channel: ChannelMatrix, block_length: int) -> ChannelMatrix:
    """Block-lifted channel H (x) I_l acting on l interleaved channel uses."""
    if block_length < 1:
        raise ValueError(f"block length must be >= 1, got {block_length}")
    if block_length == 1:
        return channel
    return ChannelMatrix(np.kron(channel.entries, np.eye(block_length)))


def matrix_to_text(channel: ChannelMatrix) -> str:
    """Serialize to the plain-text format: first line "n_r n_t", then rows."""
    out = io.StringIO()
    out.write(f"{channel.n_r} {channel.n_t}\n")
    for row in channel.entries:
        out.write(" ".join(repr(float(v)) for v in row) + "\n")
    return out.getvalue()


def matrix_from_text(text: str) -> ChannelMatrix:
    """Parse the plain-text matrix format produced by ``matrix_to_text``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"first line must be 'n_r n_t', got {lines[0]!r}")
    n_r, n_t = int(header[0]), int(header[1])
    values = np.array([float(v) for ln in lines[1:] for v in ln.split()])
    if values.size != n_r * n_t:
        raise ValueError(f"expected {n_r * n_t} entries, found {values.size}")
    return ChannelMatrix(values.reshape(n_r, n_t))
