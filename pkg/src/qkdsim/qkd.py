"""Stage 3 sifting, stage 4 distillation and max-flow key relay.

Raw key accrues between party pairs as channels survive sifting (one
protocol round succeeds per channel with probability 1/4).  Incoherent
channels contribute uniformly random outcomes, so their sifted bits err
with probability 1/2.  Distillation converts each pair's raw bits into
an asymptotic secret-key amount (1 - 2h(Q)) * k, clamped at zero, and
the final relay pushes the maximum key flow from Alice to Bob across
the complete party graph, trusted nodes forwarding key by publishing
XORs of segment keys.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .errors import InvalidParameter
from .topology import NodeId

SIFT_PROBABILITY = 0.25

PairKey = tuple[NodeId, NodeId]


def _pair(u: NodeId, v: NodeId) -> PairKey:
    return (u, v) if u < v else (v, u)


class PairKeyStore:
    """Raw-bit and error-bit counters for every unordered party pair."""

    __slots__ = ("_counts",)

    def __init__(self, parties):
        parties = tuple(parties)
        self._counts: dict[PairKey, list[int]] = {}
        for i, u in enumerate(parties):
            for v in parties[i + 1:]:
                self._counts[_pair(u, v)] = [0, 0]

    def add_bit(self, u: NodeId, v: NodeId, error: bool) -> None:
        counters = self._counts[_pair(u, v)]
        counters[0] += 1
        if error:
            counters[1] += 1

    def raw_bits(self, u: NodeId, v: NodeId) -> int:
        return self._counts[_pair(u, v)][0]

    def error_bits(self, u: NodeId, v: NodeId) -> int:
        return self._counts[_pair(u, v)][1]

    def pairs(self):
        return self._counts.keys()

    def counts(self) -> dict[PairKey, tuple[int, int]]:
        return {pair: (k, w) for pair, (k, w) in self._counts.items()}


def sift_round(
    channels: ChannelSet, store: PairKeyStore, rng: np.random.Generator
) -> PairKeyStore:
    """Run one sifting round over the realized channels, updating the store."""
    chans = channels.channels
    if not chans:
        return store
    sift = rng.random(len(chans))
    for i, ch in enumerate(chans):
        if sift[i] < SIFT_PROBABILITY:
            error = (not ch.coherent) and bool(rng.random() < 0.5)
            store.add_bit(ch.endpoint_a, ch.endpoint_b, error)
    return store


def binary_entropy(q: float) -> float:
    """Binary entropy h(q) in bits, with h(0) = h(1) = 0."""
    if not 0.0 <= q <= 1.0:
        raise InvalidParameter(f"entropy argument must lie in [0, 1], got {q}")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


@dataclass(frozen=True)
class SecretKeyGraph:
    """Distilled secret-key amounts per unordered party pair."""

    secret_bits: dict[PairKey, float]

    def capacity(self, u: NodeId, v: NodeId) -> float:
        return self.secret_bits.get(_pair(u, v), 0.0)


def distill(store: PairKeyStore) -> SecretKeyGraph:
    """Error correction plus privacy amplification in the asymptotic regime.

    Each pair with k raw bits and error rate Q = w/k keeps
    max(0, (1 - 2h(Q)) * k) secret bits; fractional amounts are kept.
    """
    secret: dict[PairKey, float] = {}
    for pair, (k, w) in store.counts().items():
        if k == 0:
            secret[pair] = 0.0
        else:
            secret[pair] = max(0.0, (1.0 - 2.0 * binary_entropy(w / k)) * k)
    return SecretKeyGraph(secret)


def max_key_flow(graph: SecretKeyGraph, source: NodeId, sink: NodeId) -> float:
    """Maximum key flow from source to sink over the party graph.

    Capacities are the symmetric secret-key amounts; the value is
    computed with shortest augmenting paths (Edmonds-Karp), which
    terminates for real capacities because the number of augmentations
    is bounded combinatorially.
    """
    if source == sink:
        raise InvalidParameter("source and sink must differ")
    nodes = set()
    for (u, v), cap in graph.secret_bits.items():
        if cap < 0:
            raise InvalidParameter(f"negative capacity {cap} on pair ({u}, {v})")
        nodes.add(u)
        nodes.add(v)
    nodes.add(source)
    nodes.add(sink)

    residual: dict[NodeId, dict[NodeId, float]] = {v: {} for v in nodes}
    largest = 0.0
    for (u, v), cap in graph.secret_bits.items():
        if cap > 0:
            # An undirected capacity gives full capacity in both directions.
            residual[u][v] = residual[u].get(v, 0.0) + cap
            residual[v][u] = residual[v].get(u, 0.0) + cap
            largest = max(largest, cap)
    tol = 1e-9 * max(largest, 1.0)

    flow = 0.0
    while True:
        parent: dict[NodeId, NodeId] = {source: source}
        queue = deque((source,))
        while queue and sink not in parent:
            u = queue.popleft()
            for v, cap in residual[u].items():
                if cap > tol and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow
        bottleneck = math.inf
        v = sink
        while v != source:
            u = parent[v]
            bottleneck = min(bottleneck, residual[u][v])
            v = u
        v = sink
        while v != source:
            u = parent[v]
            residual[u][v] -= bottleneck
            residual[v][u] = residual[v].get(u, 0.0) + bottleneck
            v = u
        flow += bottleneck
