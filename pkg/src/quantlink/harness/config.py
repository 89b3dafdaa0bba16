"""Experiment configuration: defaults per experiment and a key=value loader."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

__all__ = ["ExperimentConfig", "EXPERIMENTS", "load_config_file", "build_config"]

EXPERIMENTS = (
    "fig7a",
    "fig7b",
    "fig8",
    "fig9a",
    "fig9b",
    "regions",
    "rate-ptp",
    "rate-bc",
    "high-snr",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment run.

    Not every field matters to every experiment; the per-experiment defaults
    below pick out the relevant ones.  SNR is total transmit power against
    unit-variance noise, listed on a strictly increasing dB grid
    (10*log10(P)).
    """

    experiment: str
    n_t: int = 16
    n_r: int = 32
    n_q: int = 16
    rank: int = 16
    block_length: int = 10
    users: int = 2
    budgets: tuple[int, ...] = (16, 16)
    snr_db: tuple[float, ...] = (-10.0, 0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0)
    trials: int = 200
    master_seed: int = 2024
    out: str = ""
    zero_threshold: bool = False
    # sweep axes used by the figure-reproduction experiments
    n_r_list: tuple[int, ...] = (2, 4, 6, 8)
    n_q_list: tuple[int, ...] = (16, 32)
    block_lengths: tuple[int, ...] = (1, 2, 5, 10)
    n_q_max: int = 40
    eta_points: int = 39
    # region-validation grid
    seeds_per_cell: int = 100
    max_hyperplanes: int = 8
    max_dimension: int = 4

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if len(self.snr_db) >= 2 and any(
            b <= a for a, b in zip(self.snr_db, self.snr_db[1:])
        ):
            raise ValueError(f"SNR grid must be strictly increasing, got {self.snr_db}")
        if self.users < 1 or len(self.budgets) != self.users:
            raise ValueError(
                f"need one budget per user: users={self.users}, budgets={self.budgets}"
            )


_DEFAULTS: dict[str, dict] = {
    "fig7a": {"n_t": 10, "n_r_list": (2, 4, 6, 8), "n_q_max": 40},
    "fig7b": {"rank": 16, "n_r": 16, "block_lengths": (1, 2, 5, 10), "n_q_max": 40},
    "fig8": {"n_t": 10, "n_r": 4, "rank": 4, "n_q_list": (4, 6, 8), "eta_points": 39},
    "fig9a": {"n_t": 16, "n_r": 32, "n_q_list": (16, 32)},
    "fig9b": {"n_t": 16, "n_r": 32, "n_q": 16, "budgets": (16, 16)},
    "regions": {"seeds_per_cell": 100, "max_hyperplanes": 8, "max_dimension": 4},
    "rate-ptp": {"n_t": 16, "n_r": 32, "n_q": 16},
    "rate-bc": {"users": 2, "budgets": (16, 16)},
    "high-snr": {"rank": 4, "n_r": 4, "n_q_max": 40, "block_lengths": (1, 2, 5, 10)},
}

_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(name: str, raw: str):
    kind = _FIELD_TYPES.get(name)
    if kind is None:
        raise ValueError(f"unknown config key {name!r}")
    raw = raw.strip()
    if kind == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"{name}: expected a boolean, got {raw!r}")
    if kind == "int":
        return int(raw)
    if kind == "str":
        return raw
    if kind.startswith("tuple[int"):
        return tuple(int(v) for v in raw.replace(",", " ").split())
    if kind.startswith("tuple[float"):
        return tuple(float(v) for v in raw.replace(",", " ").split())
    raise ValueError(f"cannot parse config key {name!r} of type {kind}")


def load_config_file(path: str) -> dict:
    """Parse a plain key = value config file into an override dict.

    Blank lines and #-comments are ignored.  List values are comma- or
    whitespace-separated.
    """
    overrides: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            name, raw = line.split("=", 1)
            name = name.strip()
            overrides[name] = _parse_value(name, raw)
    return overrides


def build_config(experiment: str, overrides: dict | None = None) -> ExperimentConfig:
    """Per-experiment defaults overlaid with explicit overrides."""
    merged = dict(_DEFAULTS.get(experiment, {}))
    merged.update(overrides or {})
    merged.pop("experiment", None)
    return ExperimentConfig(experiment=experiment, **merged)


def describe(config: ExperimentConfig) -> dict[str, str]:
    """Flat metadata view of the config for output headers."""
    out = {}
    for f in fields(config):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            out[f.name] = " ".join(str(v) for v in value)
        else:
            out[f.name] = str(value)
    return out
