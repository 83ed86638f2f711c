"""Trial and sweep orchestration.

A trial runs M rounds of entanglement generation, routing, channel
realization and sifting against one immutable topology, then distills
once and relays key from Alice to Bob with max-flow; the key rate is
the flow divided by M.  Each round owns its own random streams derived
from (seed, round index, stage label), so a trial is bit-reproducible
and rounds could be processed in any order.  Sweeps expand a Cartesian
product of axis values, algorithms, placements and repeat trials, give
every point a distinct derived seed, and return results in product
order regardless of how the trials were scheduled.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import DECOHERENCE_EXPONENTS, LOSS_MODELS, realize_channels
from .entanglement import (
    DEFAULT_ALPHA_DB_PER_KM,
    generate_entanglement,
    link_success_probability,
)
from .errors import ConfigError, QKDSimError
from .qkd import PairKeyStore, distill, max_key_flow, sift_round
from .routing import AlgorithmKind, route_paths
from .streams import MAX_ROUND, MAX_SEED, RoundStreams
from .topology import Placement, build_grid, trusted_node_ids

STAGE_LINKS = 0
STAGE_ROUTING = 1
STAGE_CHANNELS = 2
STAGE_SIFTING = 3

SWEEP_AXES = (
    "fiber_length",
    "decoherence",
    "bsm_success",
    "grid_size",
    "fixed_span_grid_size",
)


@dataclass(frozen=True)
class TrialConfig:
    """Full parameter set of one simulated trial."""

    n: int = 5
    fiber_length_km: float = 1.0
    alpha_db_per_km: float = DEFAULT_ALPHA_DB_PER_KM
    bsm_success: float = 0.85
    decoherence: float = 0.02
    rounds: int = 100_000
    algorithm: AlgorithmKind = AlgorithmKind.GLOBAL
    placement: Placement = field(default_factory=Placement.none)
    seed: int = 0
    loss_model: str = "heralded"
    decoherence_exponent: str = "swaps"

    def validate(self) -> None:
        if self.n < 2:
            raise ConfigError(f"grid-size must be at least 2, got {self.n}")
        if self.fiber_length_km < 0:
            raise ConfigError(f"fiber-length must be non-negative, got {self.fiber_length_km}")
        if self.alpha_db_per_km < 0:
            raise ConfigError(f"alpha must be non-negative, got {self.alpha_db_per_km}")
        if not 0.0 <= self.bsm_success <= 1.0:
            raise ConfigError(f"bsm must lie in [0, 1], got {self.bsm_success}")
        if not 0.0 <= self.decoherence <= 1.0:
            raise ConfigError(f"decoherence must lie in [0, 1], got {self.decoherence}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be at least 1, got {self.rounds}")
        if self.rounds - 1 > MAX_ROUND:
            raise ConfigError(f"rounds exceeds the stream limit of {MAX_ROUND + 1}")
        if not isinstance(self.algorithm, AlgorithmKind):
            raise ConfigError(f"algorithm must be an AlgorithmKind, got {self.algorithm!r}")
        if not isinstance(self.placement, Placement):
            raise ConfigError(f"placement must be a Placement, got {self.placement!r}")
        try:
            trusted_node_ids(self.placement, self.n)
        except QKDSimError as exc:
            raise ConfigError(f"placement: {exc}") from exc
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.loss_model not in LOSS_MODELS:
            raise ConfigError(f"loss-model must be one of {LOSS_MODELS}, got {self.loss_model!r}")
        if self.decoherence_exponent not in DECOHERENCE_EXPONENTS:
            raise ConfigError(
                f"decoherence-exponent must be one of {DECOHERENCE_EXPONENTS},"
                f" got {self.decoherence_exponent!r}"
            )


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one trial: flow, per-pair key accounting and timing."""

    config: TrialConfig
    key_rate: float
    flow_bits: float
    raw_bits: dict[tuple[int, int], int]
    error_bits: dict[tuple[int, int], int]
    secret_bits: dict[tuple[int, int], float]
    elapsed_seconds: float

    def _ab(self) -> tuple[int, int]:
        return (0, self.config.n * self.config.n - 1)

    @property
    def raw_bits_ab(self) -> int:
        return self.raw_bits.get(self._ab(), 0)

    @property
    def secret_bits_ab(self) -> float:
        return self.secret_bits.get(self._ab(), 0.0)


def run_trial(config: TrialConfig) -> TrialResult:
    """Simulate one trial; deterministic for a fixed config."""
    config.validate()
    start = time.perf_counter()

    topology = build_grid(config.n, config.fiber_length_km, config.placement)
    p = link_success_probability(config.alpha_db_per_km, config.fiber_length_km)
    store = PairKeyStore(topology.parties)
    streams = RoundStreams(config.seed)
    algorithm = config.algorithm
    bsm, deco = config.bsm_success, config.decoherence
    loss_model, exponent = config.loss_model, config.decoherence_exponent

    for r in range(config.rounds):
        state = generate_entanglement(topology, p, streams.get(r, STAGE_LINKS))
        paths = route_paths(topology, state, algorithm, streams.get(r, STAGE_ROUTING))
        channels = realize_channels(
            paths, bsm, deco, streams.get(r, STAGE_CHANNELS), loss_model, exponent
        )
        sift_round(channels, store, streams.get(r, STAGE_SIFTING))

    graph = distill(store)
    flow = max_key_flow(graph, topology.alice, topology.bob)
    counts = store.counts()
    elapsed = time.perf_counter() - start
    return TrialResult(
        config=config,
        key_rate=flow / config.rounds,
        flow_bits=flow,
        raw_bits={pair: kw[0] for pair, kw in counts.items()},
        error_bits={pair: kw[1] for pair, kw in counts.items()},
        secret_bits=dict(graph.secret_bits),
        elapsed_seconds=elapsed,
    )


def derive_seed(base_seed: int, index: int) -> int:
    """Stable 64-bit child seed for sweep point ``index``."""
    return int(np.random.SeedSequence((base_seed, index)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepConfig:
    """A Cartesian sweep over one axis, several algorithms and placements."""

    base: TrialConfig
    sweep_axis: str
    values: tuple[float, ...]
    algorithms: tuple[AlgorithmKind, ...]
    placements: tuple[Placement, ...]
    trials_per_point: int = 1
    span_km: float = 10.0

    def validate(self) -> None:
        self.base.validate()
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if not self.values:
            raise ConfigError("sweep values must not be empty")
        if not self.algorithms:
            raise ConfigError("sweep algorithms must not be empty")
        if not self.placements:
            raise ConfigError("sweep placements must not be empty")
        if self.trials_per_point < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials_per_point}")
        if self.span_km <= 0:
            raise ConfigError(f"span-km must be positive, got {self.span_km}")
        for cfg in self.point_configs():
            cfg.validate()

    def _apply_axis(self, config: TrialConfig, value: float) -> TrialConfig:
        axis = self.sweep_axis
        if axis == "fiber_length":
            return replace(config, fiber_length_km=float(value))
        if axis == "decoherence":
            return replace(config, decoherence=float(value))
        if axis == "bsm_success":
            return replace(config, bsm_success=float(value))
        if axis in ("grid_size", "fixed_span_grid_size"):
            n = int(value)
            if n != value:
                raise ConfigError(f"grid sizes must be integers, got {value}")
            if axis == "grid_size":
                return replace(config, n=n)
            if n < 2:
                raise ConfigError(f"grid-size must be at least 2, got {n}")
            return replace(config, n=n, fiber_length_km=self.span_km / (n - 1))
        raise ConfigError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")

    def point_configs(self) -> list[TrialConfig]:
        """Expand the product order: values, algorithms, placements, trials."""
        configs = []
        index = 0
        for value in self.values:
            for algorithm in self.algorithms:
                for placement in self.placements:
                    for _ in range(self.trials_per_point):
                        cfg = self._apply_axis(self.base, value)
                        cfg = replace(
                            cfg,
                            algorithm=algorithm,
                            placement=placement,
                            seed=derive_seed(self.base.seed, index),
                        )
                        configs.append(cfg)
                        index += 1
        return configs


def run_sweep(sweep: SweepConfig, max_workers: int | None = None) -> list[TrialResult]:
    """Run every sweep point; results come back in product order.

    ``max_workers`` above 1 distributes trials over worker processes;
    the output is identical either way because every point carries its
    own derived seed.
    """
    sweep.validate()
    configs = sweep.point_configs()
    if max_workers is not None and max_workers > 1 and len(configs) > 1:
        workers = min(max_workers, len(configs))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_trial, configs))
    return [run_trial(cfg) for cfg in configs]
