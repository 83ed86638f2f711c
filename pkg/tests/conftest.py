"""Shared test helpers: cached parallel trial execution and oracles."""

from __future__ import annotations

import os
from dataclasses import replace
from itertools import combinations

import pytest

from qkdsim.engine import TrialConfig, TrialResult, derive_seed, run_trial


class SimCache:
    """Session-wide cache of trial results, filled in parallel batches."""

    def __init__(self):
        self._cache: dict[TrialConfig, TrialResult] = {}

    def results(self, configs) -> list[TrialResult]:
        configs = list(configs)
        missing = [cfg for cfg in dict.fromkeys(configs) if cfg not in self._cache]
        if missing:
            workers = min(os.cpu_count() or 1, len(missing))
            if workers > 1:
                from concurrent.futures import ProcessPoolExecutor

                with ProcessPoolExecutor(max_workers=workers) as pool:
                    for cfg, result in zip(missing, pool.map(run_trial, missing)):
                        self._cache[cfg] = result
            else:
                for cfg in missing:
                    self._cache[cfg] = run_trial(cfg)
        return [self._cache[cfg] for cfg in configs]

    def result(self, config: TrialConfig) -> TrialResult:
        return self.results([config])[0]


@pytest.fixture(scope="session")
def sim() -> SimCache:
    return SimCache()


def split_configs(base: TrialConfig, splits: int = 4) -> list[TrialConfig]:
    """Split one logical point into independent equal-round trials."""
    rounds = base.rounds // splits
    return [
        replace(base, rounds=rounds, seed=derive_seed(base.seed, i)) for i in range(splits)
    ]


def point_rates(sim: SimCache, base: TrialConfig, splits: int = 4) -> list[float]:
    return [r.key_rate for r in sim.results(split_configs(base, splits))]


def mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def welch_greater_p(larger, smaller) -> float:
    """One-sided p-value that mean(larger) > mean(smaller) (Welch's t)."""
    from scipy import stats

    t, p_two = stats.ttest_ind(list(larger), list(smaller), equal_var=False)
    if t <= 0:
        return 1.0 - p_two / 2.0
    return p_two / 2.0


class StopScript(Exception):
    """A scripted random stream ran out of prescribed choices."""


class ScriptedRNG:
    """Stand-in for a Generator that replays a fixed choice script.

    Only ``integers(k)`` is supported, which is the only draw the
    routing code performs.  Running past the script raises StopScript
    and records how many options the next draw had, letting callers
    enumerate every realization breadth-first.
    """

    def __init__(self, script):
        self.script = list(script)
        self.pos = 0
        self.overran_k: int | None = None

    def integers(self, k):
        k = int(k)
        if self.pos < len(self.script):
            value = self.script[self.pos]
            self.pos += 1
            assert 0 <= value < k
            return value
        self.overran_k = k
        raise StopScript


def all_realizations(fn):
    """Exhaustively enumerate fn(rng) over every possible choice script."""
    outcomes = []
    stack = [[]]
    while stack:
        script = stack.pop()
        rng = ScriptedRNG(script)
        try:
            outcomes.append(fn(rng))
        except StopScript:
            for choice in range(rng.overran_k):
                stack.append(script + [choice])
    return outcomes


def min_cut_value(parties, capacities, source, sink) -> float:
    """Brute-force max-flow oracle: minimum cut over all S/T partitions.

    ``capacities`` maps unordered pairs to non-negative reals.  The
    undirected max-flow value equals the cheapest cut separating source
    from sink, found by enumerating every subset assignment of the
    remaining nodes.
    """
    others = [v for v in parties if v not in (source, sink)]
    best = None
    for size in range(len(others) + 1):
        for subset in combinations(others, size):
            side = {source, *subset}
            cut = 0.0
            for (u, v), cap in capacities.items():
                if (u in side) != (v in side):
                    cut += cap
            if best is None or cut < best:
                best = cut
    return best if best is not None else 0.0


def assert_valid_path_set(topology, state, path_set) -> None:
    """Structural invariants every routed PathSet must satisfy."""
    used = set()
    for path in path_set:
        nodes = path.nodes
        assert len(nodes) >= 2
        assert topology.is_party(nodes[0]) and topology.is_party(nodes[-1])
        for interior in nodes[1:-1]:
            assert not topology.is_party(interior)
        for a, b in zip(nodes, nodes[1:]):
            edge = (a, b) if a < b else (b, a)
            assert b in topology.adjacency[a], f"{a}-{b} not grid-adjacent"
            assert edge in state.present, f"{edge} not entangled"
            assert edge not in used, f"{edge} reused across the path set"
            used.add(edge)
        assert path.intermediate_count == len(nodes) - 2
