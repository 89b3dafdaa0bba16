"""Deterministic CSV output and terminal summaries for experiment runs."""

from __future__ import annotations

import io

from .config import ExperimentConfig, describe
from .experiments import RateCurve

__all__ = ["curves_to_csv", "write_csv", "summary_table"]

_HEADER = "x,scheme,value,stderr,n_trials,seed"


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def curves_to_csv(curves: list[RateCurve], config: ExperimentConfig) -> str:
    """Render curves as CSV text with a commented metadata preamble.

    Identical inputs produce byte-identical text: formatting is fixed and
    row order follows curve order, then grid order.
    """
    out = io.StringIO()
    out.write(f"# experiment: {config.experiment}\n")
    out.write("# snr_definition: SNR = total transmit power P against unit-variance noise; dB = 10*log10(P)\n")
    for key, value in sorted(describe(config).items()):
        if key in ("experiment", "out"):
            continue
        out.write(f"# {key}: {value}\n")
    out.write(_HEADER + "\n")
    for curve in curves:
        for x, value, err in zip(curve.x, curve.values, curve.stderr):
            out.write(
                f"{_fmt(x)},{curve.scheme},{_fmt(value)},{_fmt(err)},{curve.n_trials},{curve.seed}\n"
            )
    return out.getvalue()


def write_csv(path: str, curves: list[RateCurve], config: ExperimentConfig) -> None:
    text = curves_to_csv(curves, config)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def summary_table(curves: list[RateCurve]) -> str:
    """Compact per-scheme summary: grid size and value range."""
    lines = [f"{'scheme':<28} {'points':>6} {'min':>12} {'max':>12}"]
    for curve in curves:
        lines.append(
            f"{curve.scheme:<28} {len(curve.x):>6} {_fmt(min(curve.values)):>12} {_fmt(max(curve.values)):>12}"
        )
    return "\n".join(lines)
