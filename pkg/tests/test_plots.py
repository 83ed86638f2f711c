"""Figure rendering for sweep reports."""

import pytest

from qkdsim.engine import SweepConfig, TrialConfig, TrialResult
from qkdsim.plots import axis_value, save_sweep_figure
from qkdsim.routing import AlgorithmKind
from qkdsim.topology import Placement


def fake_result(key_rate, **config_overrides) -> TrialResult:
    config = TrialConfig(rounds=1000, **config_overrides)
    return TrialResult(
        config=config,
        key_rate=key_rate,
        flow_bits=key_rate * 1000,
        raw_bits={},
        error_bits={},
        secret_bits={},
        elapsed_seconds=0.5,
    )


def test_axis_value_mapping():
    config = TrialConfig(n=7, fiber_length_km=2.5, bsm_success=0.9, decoherence=0.04)
    assert axis_value(config, "fiber_length") == 2.5
    assert axis_value(config, "decoherence") == 0.04
    assert axis_value(config, "bsm_success") == 0.9
    assert axis_value(config, "grid_size") == 7
    assert axis_value(config, "fixed_span_grid_size") == 7
    with pytest.raises(ValueError):
        axis_value(config, "temperature")


def test_save_sweep_figure(tmp_path):
    sweep = SweepConfig(
        base=TrialConfig(rounds=1000),
        sweep_axis="decoherence",
        values=(0.0, 0.02, 0.04),
        algorithms=(AlgorithmKind.GLOBAL, AlgorithmKind.LOCAL_IA),
        placements=(Placement.none(),),
        trials_per_point=2,
    )
    results = []
    for d in sweep.values:
        for algorithm in sweep.algorithms:
            for trial in range(2):
                rate = 0.3 - 3.0 * d + (0.01 if algorithm is AlgorithmKind.GLOBAL else 0.0)
                results.append(
                    fake_result(rate + 0.001 * trial, decoherence=d, algorithm=algorithm)
                )
    out = save_sweep_figure(sweep, results, tmp_path / "fig.png")
    assert out.exists()
    assert out.stat().st_size > 5_000
