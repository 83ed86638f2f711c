"""Figure rendering for sweep reports.

Renders key rate against the swept axis, one line per
(algorithm, placement) series, averaging repeat trials per point.
Figures go straight to files; no interactive backend is required.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .engine import SweepConfig, TrialResult  # noqa: E402

AXIS_LABELS = {
    "fiber_length": "fiber length per edge (km)",
    "decoherence": "decoherence probability",
    "bsm_success": "BSM success probability",
    "grid_size": "grid side length N",
    "fixed_span_grid_size": "grid side length N (fixed span)",
}


def axis_value(config, axis: str) -> float:
    if axis == "fiber_length":
        return config.fiber_length_km
    if axis == "decoherence":
        return config.decoherence
    if axis == "bsm_success":
        return config.bsm_success
    if axis in ("grid_size", "fixed_span_grid_size"):
        return config.n
    raise ValueError(f"unknown sweep axis {axis!r}")


def save_sweep_figure(sweep: SweepConfig, results: list[TrialResult], path) -> Path:
    """Plot the sweep's key rates and write the figure to ``path``."""
    series: dict[tuple[str, str], dict[float, list[float]]] = defaultdict(
        lambda: defaultdict(list)
    )
    for result in results:
        cfg = result.config
        key = (str(cfg.algorithm), str(cfg.placement))
        series[key][axis_value(cfg, sweep.sweep_axis)].append(result.key_rate)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for (algorithm, placement), points in series.items():
        xs = sorted(points)
        ys = [sum(points[x]) / len(points[x]) for x in xs]
        label = algorithm if placement == "none" else f"{algorithm}, {placement}"
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_xlabel(AXIS_LABELS.get(sweep.sweep_axis, sweep.sweep_axis))
    ax.set_ylabel("secret key bits per round")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()

    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
