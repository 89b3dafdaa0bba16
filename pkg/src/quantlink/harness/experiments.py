"""Experiment runners producing labeled rate curves.

Each runner consumes an ExperimentConfig and returns a list of RateCurve
objects.  Monte Carlo experiments draw one independent channel per trial
from a stream seeded by (master_seed, trial index), so results are identical
no matter how trials are scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from ..arrangements import enumerate_regions, random_general_position
from ..channel import ChannelMatrix, shannon_capacity, truncated_capacity
from ..combinatorics import RegionCountQuery, max_regions
from ..rates import (
    allocate,
    bc_blockwise_large_l_asymptote,
    bc_rates,
    blockwise_high_snr_bounds,
    blockwise_large_l_asymptote,
    naive_tdma_rates,
)
from .config import ExperimentConfig

__all__ = ["RateCurve", "run_experiment"]


@dataclass(frozen=True)
class RateCurve:
    """One labeled curve: scheme name, x grid, values, standard errors."""

    scheme: str
    x: tuple[float, ...]
    values: tuple[float, ...]
    stderr: tuple[float, ...]
    n_trials: int
    seed: int

    def __post_init__(self) -> None:
        if not (len(self.x) == len(self.values) == len(self.stderr)):
            raise ValueError("x, values and stderr must have matching lengths")
        if any(v < -1e-12 for v in self.values):
            raise ValueError("rates cannot be negative")


def _trial_channel(master_seed: int, trial: int, n_r: int, n_t: int, salt: int = 0) -> ChannelMatrix:
    seq = np.random.SeedSequence([master_seed, salt, trial])
    rng = np.random.default_rng(seq)
    return ChannelMatrix(rng.standard_normal((n_r, n_t)))


def _mean_stderr(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # samples: trials x grid
    mean = samples.mean(axis=0)
    n = samples.shape[0]
    if n > 1:
        err = samples.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        err = np.zeros_like(mean)
    return mean, err


def _run_trials(worker, trials: int, workers: int):
    """Evaluate worker(trial) for every trial index, in index order."""
    if workers <= 1:
        return [worker(t) for t in range(trials)]
    with get_context("fork").Pool(workers) as pool:
        return pool.map(worker, range(trials))


# ---------------------------------------------------------------------------
# High-SNR numerical figures.
# ---------------------------------------------------------------------------

def run_fig7a(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Large-block achievable high-SNR rate versus slicer count.

    One curve per receive-antenna count (full-rank channels assumed), plus
    the straight saturation line R = n_q every curve is bounded by.
    """
    grid = tuple(float(q) for q in range(1, config.n_q_max + 1))
    curves = []
    for n_r in config.n_r_list:
        rank = min(config.n_t, n_r)
        vals = tuple(
            blockwise_large_l_asymptote(int(q), rank, n_r).lower for q in grid
        )
        curves.append(
            RateCurve(f"blockwise-large-l nr={n_r}", grid, vals,
                      (0.0,) * len(grid), config.trials, config.master_seed)
        )
    curves.append(
        RateCurve("saturation R=nq", grid, grid, (0.0,) * len(grid),
                  config.trials, config.master_seed)
    )
    return curves


def run_fig7b(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """High-SNR rate loss of finite block lengths against the large-block limit."""
    grid = tuple(float(q) for q in range(1, config.n_q_max + 1))
    curves = []
    for l in config.block_lengths:
        losses = []
        for q in grid:
            asym = blockwise_large_l_asymptote(int(q), config.rank, config.n_r).lower
            exact = blockwise_high_snr_bounds(
                l, int(q), config.rank, config.n_r, config.zero_threshold
            ).lower
            losses.append(max(0.0, asym - exact))
        curves.append(
            RateCurve(f"loss l={l}", grid, tuple(losses), (0.0,) * len(grid),
                      config.trials, config.master_seed)
        )
    return curves


def run_fig8(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Two-user downlink high-SNR rate-region boundaries.

    For each slicer budget: the blockwise large-block boundary swept over
    the time share, and the rectangular adaptive-threshold region through
    (n_q, n_q).  Points are (user-1 rate, user-2 rate) pairs.
    """
    etas = np.linspace(0.0, 1.0, config.eta_points + 2)[1:-1]
    curves = []
    for n_q in config.n_q_list:
        r1 = []
        r2 = []
        for eta in etas:
            r1.append(bc_blockwise_large_l_asymptote(float(eta), n_q, config.rank, config.n_r).lower)
            r2.append(
                bc_blockwise_large_l_asymptote(float(1 - eta), n_q, config.rank, config.n_r).lower
            )
        curves.append(
            RateCurve(f"blockwise-region nq={n_q}", tuple(r1), tuple(r2),
                      (0.0,) * len(r1), config.trials, config.master_seed)
        )
        square_x = (0.0, float(n_q), float(n_q))
        square_y = (float(n_q), float(n_q), 0.0)
        curves.append(
            RateCurve(f"adaptive-region nq={n_q}", square_x, square_y,
                      (0.0,) * 3, config.trials, config.master_seed)
        )
    return curves


# ---------------------------------------------------------------------------
# Monte Carlo rate simulations.
# ---------------------------------------------------------------------------

def run_fig9a(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Single-user achievable rate of the adaptive scheme versus SNR.

    For each slicer budget: Monte Carlo average (over independent channel
    draws) of the allocation-search rate, alongside the truncated-Shannon
    benchmark min(n_q, C).
    """
    powers = [10.0 ** (db / 10.0) for db in config.snr_db]
    curves = []
    for n_q in config.n_q_list:

        def worker(trial: int, n_q=n_q):
            h = _trial_channel(config.master_seed, trial, config.n_r, config.n_t, salt=n_q)
            rates = [allocate(h, p, n_q, method="auto").rate for p in powers]
            bounds = [truncated_capacity(h, p, n_q) for p in powers]
            return rates, bounds

        results = _run_trials(worker, config.trials, workers)
        rates = np.array([r for r, _ in results])
        bounds = np.array([b for _, b in results])
        for label, block in (("adaptive", rates), ("tsc", bounds)):
            mean, err = _mean_stderr(block)
            curves.append(
                RateCurve(f"{label} nq={n_q}", tuple(config.snr_db),
                          tuple(mean.tolist()), tuple(err.tolist()),
                          config.trials, config.master_seed)
            )
    return curves


def run_fig9b(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Per-user downlink rates: proposed scheme, shared benchmark, plain TDMA.

    Runs both two- and three-user systems with equal shares and the
    configured per-user slicer budget; reports the across-users mean rate.
    """
    powers = [10.0 ** (db / 10.0) for db in config.snr_db]
    n_q = config.n_q
    curves = []
    for n_users in (2, 3):
        shares = [1.0 / n_users] * n_users
        budgets = [n_q] * n_users

        def worker(trial: int, n_users=n_users, shares=shares, budgets=budgets):
            channels = [
                _trial_channel(config.master_seed, trial, config.n_r, config.n_t,
                               salt=1000 * n_users + j)
                for j in range(n_users)
            ]
            proposed = []
            naive = []
            tsc_share = []
            for p in powers:
                user_powers = [p] * n_users
                proposed.append(np.mean(bc_rates(channels, shares, budgets, user_powers)))
                naive.append(np.mean(naive_tdma_rates(channels, shares, budgets, user_powers)))
                tsc_share.append(
                    np.mean([truncated_capacity(h, p, n_q) / n_users for h in channels])
                )
            return proposed, tsc_share, naive

        results = _run_trials(worker, config.trials, workers)
        blocks = {
            "bc-adaptive": np.array([r[0] for r in results]),
            "tsc-equal-share": np.array([r[1] for r in results]),
            "naive-tdma": np.array([r[2] for r in results]),
        }
        for label, block in blocks.items():
            mean, err = _mean_stderr(block)
            curves.append(
                RateCurve(f"{label} nu={n_users}", tuple(config.snr_db),
                          tuple(mean.tolist()), tuple(err.tolist()),
                          config.trials, config.master_seed)
            )
    return curves


def run_rate_ptp(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Configurable single-user rate curve (one slicer budget)."""
    powers = [10.0 ** (db / 10.0) for db in config.snr_db]

    def worker(trial: int):
        h = _trial_channel(config.master_seed, trial, config.n_r, config.n_t)
        rates = [allocate(h, p, config.n_q, method="auto").rate for p in powers]
        bounds = [truncated_capacity(h, p, config.n_q) for p in powers]
        shannon = [shannon_capacity(h, p) for p in powers]
        return rates, bounds, shannon

    results = _run_trials(worker, config.trials, workers)
    curves = []
    names = ("adaptive", "tsc", "shannon")
    for i, label in enumerate(names):
        block = np.array([r[i] for r in results])
        mean, err = _mean_stderr(block)
        curves.append(
            RateCurve(f"{label} nq={config.n_q}", tuple(config.snr_db),
                      tuple(mean.tolist()), tuple(err.tolist()),
                      config.trials, config.master_seed)
        )
    return curves


def run_rate_bc(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Configurable downlink run with equal shares and per-user budgets."""
    powers = [10.0 ** (db / 10.0) for db in config.snr_db]
    n_users = config.users
    shares = [1.0 / n_users] * n_users
    budgets = list(config.budgets)

    def worker(trial: int):
        channels = [
            _trial_channel(config.master_seed, trial, config.n_r, config.n_t, salt=j)
            for j in range(n_users)
        ]
        per_user = []
        naive = []
        for p in powers:
            user_powers = [p] * n_users
            per_user.append(bc_rates(channels, shares, budgets, user_powers))
            naive.append(naive_tdma_rates(channels, shares, budgets, user_powers))
        return per_user, naive

    results = _run_trials(worker, config.trials, workers)
    curves = []
    for j in range(n_users):
        block = np.array([[row[j] for row in r[0]] for r in results])
        mean, err = _mean_stderr(block)
        curves.append(
            RateCurve(f"bc-adaptive user={j + 1}", tuple(config.snr_db),
                      tuple(mean.tolist()), tuple(err.tolist()),
                      config.trials, config.master_seed)
        )
        block = np.array([[row[j] for row in r[1]] for r in results])
        mean, err = _mean_stderr(block)
        curves.append(
            RateCurve(f"naive-tdma user={j + 1}", tuple(config.snr_db),
                      tuple(mean.tolist()), tuple(err.tolist()),
                      config.trials, config.master_seed)
        )
    return curves


def run_high_snr(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Exact blockwise bounds and asymptotes over the slicer-count grid."""
    grid = tuple(float(q) for q in range(1, config.n_q_max + 1))
    curves = []
    for l in config.block_lengths:
        lows = []
        highs = []
        for q in grid:
            bounds = blockwise_high_snr_bounds(
                l, int(q), config.rank, config.n_r, config.zero_threshold
            )
            lows.append(bounds.lower)
            highs.append(bounds.upper)
        curves.append(
            RateCurve(f"lower l={l}", grid, tuple(lows), (0.0,) * len(grid),
                      config.trials, config.master_seed)
        )
        curves.append(
            RateCurve(f"upper l={l}", grid, tuple(highs), (0.0,) * len(grid),
                      config.trials, config.master_seed)
        )
    asym = tuple(
        blockwise_large_l_asymptote(int(q), config.rank, config.n_r).lower for q in grid
    )
    curves.append(
        RateCurve("large-l asymptote", grid, asym, (0.0,) * len(grid),
                  config.trials, config.master_seed)
    )
    return curves


def run_regions(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Region-count validation: enumeration oracle versus closed form.

    For every (hyperplane count, dimension, threshold mode) cell, the value
    reported is the fraction of seeds whose enumerated count matches the
    formula; anything below 1.0 is a failure.
    """
    curves = []
    seeds = range(config.seeds_per_cell)

    def cell_worker(args):
        n, d, zero = args
        expected = max_regions(RegionCountQuery(n, d, zero))
        good = 0
        for seed in seeds:
            arrangement = random_general_position(n, d, zero, seed=seed)
            if len(enumerate_regions(arrangement)) == expected:
                good += 1
        return good / config.seeds_per_cell

    for zero in (False, True):
        label = "zero" if zero else "general"
        for d in range(1, config.max_dimension + 1):
            grid = tuple(float(n) for n in range(1, config.max_hyperplanes + 1))
            cells = [(int(n), d, zero) for n in grid]
            if workers <= 1:
                vals = [cell_worker(c) for c in cells]
            else:
                with get_context("fork").Pool(workers) as pool:
                    vals = pool.map(cell_worker, cells)
            curves.append(
                RateCurve(f"match-rate {label} d={d}", grid, tuple(vals),
                          (0.0,) * len(grid), config.seeds_per_cell,
                          config.master_seed)
            )
    return curves


_RUNNERS = {
    "fig7a": run_fig7a,
    "fig7b": run_fig7b,
    "fig8": run_fig8,
    "fig9a": run_fig9a,
    "fig9b": run_fig9b,
    "regions": run_regions,
    "rate-ptp": run_rate_ptp,
    "rate-bc": run_rate_bc,
    "high-snr": run_high_snr,
}


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[RateCurve]:
    """Dispatch to the configured experiment's runner."""
    return _RUNNERS[config.experiment](config, workers=workers)
