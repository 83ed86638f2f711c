"""Stage 2 routing: turning the round's surviving links into party-to-party paths.

Three algorithms are provided.  The global algorithm sees the whole
link state: it repeatedly extracts a shortest path between some pair of
parties from the residual graph, breaking ties uniformly at random, and
removes its edges until no pair of parties remains connected.  The two
local algorithms let every repeater decide on its own which two of its
entangled neighbors to splice together, using only the static topology
distances of its neighbors to the parties; the Non-Intersection
Avoidant (NIA) variant breaks score ties uniformly, while the
Intersection Avoidant (IA) variant prefers splices that run straight
through the repeater.  Local pairing decisions are then chased into
maximal chains; chains with parties at both ends become paths, chains
that hit an unpaired edge end are wasted, and closed repeater cycles
never reach a party at all.

All randomness is drawn through ``rng.integers(k)`` at explicit choice
points, so a fixed stream fully determines the output.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .entanglement import EntanglementState
from .errors import InconsistentPairing, InvalidNode, InvalidParameter
from .topology import Edge, GridTopology, NodeId


class AlgorithmKind(Enum):
    GLOBAL = "global"
    LOCAL_NIA = "nia"
    LOCAL_IA = "ia"

    @classmethod
    def parse(cls, text: str) -> "AlgorithmKind":
        text = text.strip().lower()
        for kind in cls:
            if kind.value == text:
                return kind
        raise InvalidParameter(f"unknown algorithm {text!r} (expected global, nia or ia)")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Path:
    """A chain of entangled edges whose two end nodes are parties."""

    nodes: tuple[NodeId, ...]

    @property
    def intermediate_count(self) -> int:
        """Number of swapping repeaters on the path (end nodes excluded)."""
        return len(self.nodes) - 2

    def edges(self):
        for a, b in zip(self.nodes, self.nodes[1:]):
            yield (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class PathSet:
    """Edge-disjoint paths selected in one round (a multiset)."""

    paths: tuple[Path, ...] = ()

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


@dataclass(frozen=True)
class PairingSet:
    """Per-repeater splices: for each repeater, up to two pairs of neighbors.

    A pair (a, b) at repeater u means u swaps the entangled edges (u, a)
    and (u, b) into one longer link.
    """

    by_repeater: dict[NodeId, tuple[tuple[NodeId, NodeId], ...]] = field(default_factory=dict)


def _entangled_adjacency(topology: GridTopology, state: EntanglementState) -> list[list[NodeId]]:
    # Built by scanning the fixed edge order so the result is independent
    # of set iteration order.
    adj: list[list[NodeId]] = [[] for _ in range(topology.num_nodes)]
    present = state.present
    for edge in topology.edges:
        if edge in present:
            u, v = edge
            adj[u].append(v)
            adj[v].append(u)
    return adj


def _bfs_distances(adj: list[list[NodeId]], source: NodeId, total: int) -> list[int]:
    dist = [-1] * total
    dist[source] = 0
    queue = deque((source,))
    while queue:
        u = queue.popleft()
        du1 = dist[u] + 1
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = du1
                queue.append(v)
    return dist


def _trace_shortest(
    adj: list[list[NodeId]], dist: list[int], source: NodeId, sink: NodeId,
    rng: np.random.Generator,
) -> list[NodeId]:
    # Walk back from the sink along strictly decreasing BFS levels,
    # picking uniformly when several predecessors qualify.
    nodes = [sink]
    v = sink
    while v != source:
        target = dist[v] - 1
        preds = [w for w in adj[v] if dist[w] == target]
        v = preds[rng.integers(len(preds))] if len(preds) > 1 else preds[0]
        nodes.append(v)
    nodes.reverse()
    return nodes


def route_global(
    topology: GridTopology, state: EntanglementState, rng: np.random.Generator
) -> PathSet:
    """Greedy shortest-path extraction with full link-state knowledge.

    Each iteration finds the minimum hop distance over all party pairs
    in the residual graph, picks one minimal pair uniformly at random,
    samples one of its shortest paths, emits it and deletes its edges.
    """
    adj = _entangled_adjacency(topology, state)
    parties = topology.parties
    total = topology.num_nodes
    last = len(parties) - 1
    # Pairs whose endpoints were ever disconnected stay disconnected:
    # edges are only removed.
    alive = {(i, j): True for i in range(last) for j in range(i + 1, last + 1)}
    paths: list[Path] = []

    while True:
        dists: dict[int, list[int]] = {}
        best = -1
        tied: list[tuple[int, int]] = []
        for i in range(last):
            if not any(alive[(i, j)] for j in range(i + 1, last + 1)):
                continue
            dist_i = _bfs_distances(adj, parties[i], total)
            dists[i] = dist_i
            for j in range(i + 1, last + 1):
                if not alive[(i, j)]:
                    continue
                d = dist_i[parties[j]]
                if d < 0:
                    alive[(i, j)] = False
                    continue
                if best < 0 or d < best:
                    best = d
                    tied = [(i, j)]
                elif d == best:
                    tied.append((i, j))
        if best < 0:
            break
        i, j = tied[rng.integers(len(tied))] if len(tied) > 1 else tied[0]
        nodes = _trace_shortest(adj, dists[i], parties[i], parties[j], rng)
        for a, b in zip(nodes, nodes[1:]):
            adj[a].remove(b)
            adj[b].remove(a)
        paths.append(Path(tuple(nodes)))

    return PathSet(tuple(paths))


def pair_score(x: NodeId, y: NodeId, distance_tables) -> int:
    """Least total distance of {x, y} to two distinct parties.

    ``distance_tables`` holds one hop-distance table per party; the
    score is min over ordered party pairs (P, Q), P != Q, of
    D_P(x) + D_Q(y).  Symmetric in x and y by construction.
    """
    best = -1
    for i, ti in enumerate(distance_tables):
        tix = ti[x]
        for j, tj in enumerate(distance_tables):
            if i == j:
                continue
            s = tix + tj[y]
            if best < 0 or s < best:
                best = s
    return best


def minimal_score_pairs(neighbors, distance_tables) -> list[tuple[NodeId, NodeId]]:
    """All unordered neighbor pairs attaining the minimal pair_score.

    Equivalent to scoring every pair with ``pair_score`` but using each
    neighbor's best and second-best party distances: an optimal
    assignment of two distinct parties never needs more than one
    second-best choice.
    """
    nb = sorted(neighbors)
    stats = []  # (best distance, its party index, second-best distance)
    for v in nb:
        b1 = b2 = -1
        a1 = -1
        for pi, table in enumerate(distance_tables):
            d = table[v]
            if b1 < 0 or d < b1:
                b2 = b1
                b1 = d
                a1 = pi
            elif b2 < 0 or d < b2:
                b2 = d
        stats.append((b1, a1, b2))

    best = -1
    minimal: list[tuple[NodeId, NodeId]] = []
    for i, x in enumerate(nb):
        b1x, a1x, b2x = stats[i]
        for j in range(i + 1, len(nb)):
            b1y, a1y, b2y = stats[j]
            if a1x != a1y:
                s = b1x + b1y
            else:
                s = min(b1x + b2y, b2x + b1y)
            if best < 0 or s < best:
                best = s
                minimal = [(x, nb[j])]
            elif s == best:
                minimal.append((x, nb[j]))
    return minimal


def _node_rank_stats(topology: GridTopology) -> list[tuple[int, int, int]]:
    # Per node: (best party distance, that party's index, second-best
    # distance over the remaining parties).  Static per topology.
    tables = [topology.party_distance[p] for p in topology.parties]
    stats = []
    for v in range(topology.num_nodes):
        b1 = b2 = -1
        a1 = -1
        for pi, table in enumerate(tables):
            d = table[v]
            if b1 < 0 or d < b1:
                b2 = b1
                b1 = d
                a1 = pi
            elif b2 < 0 or d < b2:
                b2 = d
        stats.append((b1, a1, b2))
    return stats


def _decide(
    u: NodeId,
    neighbors: list[NodeId],
    stats: list[tuple[int, int, int]],
    straight_ties: bool,
    rng: np.random.Generator,
) -> list[tuple[NodeId, NodeId]]:
    # Core splice rule; neighbors must be sorted and have length >= 2.
    if len(neighbors) == 2:
        return [(neighbors[0], neighbors[1])]

    best = -1
    pool: list[tuple[NodeId, NodeId]] = []
    for i, x in enumerate(neighbors):
        b1x, a1x, b2x = stats[x]
        for j in range(i + 1, len(neighbors)):
            y = neighbors[j]
            b1y, a1y, b2y = stats[y]
            if a1x != a1y:
                s = b1x + b1y
            else:
                s = min(b1x + b2y, b2x + b1y)
            if best < 0 or s < best:
                best = s
                pool = [(x, y)]
            elif s == best:
                pool.append((x, y))

    if straight_ties:
        # Collinear through u: opposite neighbors sum to 2u on the grid.
        uu = 2 * u
        straight = [(x, y) for x, y in pool if x + y == uu]
        if straight:
            pool = straight
    chosen = pool[rng.integers(len(pool))] if len(pool) > 1 else pool[0]

    pairs = [chosen]
    if len(neighbors) == 4:
        rest = [v for v in neighbors if v not in chosen]
        pairs.append((rest[0], rest[1]))
    return pairs


def repeater_decision(
    u: NodeId,
    entangled_neighbors,
    topology: GridTopology,
    variant: AlgorithmKind,
    rng: np.random.Generator,
) -> list[tuple[NodeId, NodeId]]:
    """One repeater's splice decision from its own link outcomes.

    Fewer than two entangled neighbors: nothing to splice.  Exactly
    two: splice them unconditionally.  Three or four: splice the pair
    with the best party-distance score (IA restricts ties to collinear
    pairs when possible), and with four neighbors also splice the
    leftover two.
    """
    if topology.is_party(u):
        raise InvalidNode(f"node {u} is a party, not a repeater")
    if variant not in (AlgorithmKind.LOCAL_NIA, AlgorithmKind.LOCAL_IA):
        raise InvalidParameter(f"repeater decisions apply to local algorithms, not {variant}")
    neighbors = sorted(entangled_neighbors)
    if len(neighbors) < 2:
        return []
    return _decide(
        u,
        neighbors,
        _node_rank_stats(topology),
        variant is AlgorithmKind.LOCAL_IA,
        rng,
    )


def route_local(
    topology: GridTopology,
    state: EntanglementState,
    variant: AlgorithmKind,
    rng: np.random.Generator,
) -> PathSet:
    """Apply the repeater rule everywhere, then chase chains into paths."""
    if variant not in (AlgorithmKind.LOCAL_NIA, AlgorithmKind.LOCAL_IA):
        raise InvalidParameter(f"route_local expects a local algorithm, got {variant}")
    adj = _entangled_adjacency(topology, state)
    stats = _node_rank_stats(topology)
    straight_ties = variant is AlgorithmKind.LOCAL_IA
    party_set = set(topology.parties)
    by_repeater: dict[NodeId, tuple[tuple[NodeId, NodeId], ...]] = {}
    for u in range(topology.num_nodes):
        # Adjacency lists come out of the edge scan already sorted.
        if u in party_set:
            continue
        nb = adj[u]
        if len(nb) < 2:
            continue
        pairs = _decide(u, nb, stats, straight_ties, rng)
        if pairs:
            by_repeater[u] = tuple(pairs)
    return extract_paths(topology, state, PairingSet(by_repeater))


def extract_paths(
    topology: GridTopology, state: EntanglementState, pairings: PairingSet
) -> PathSet:
    """Chase repeater splices into maximal chains and keep the useful ones.

    A chain is kept only when both of its ends are distinct parties.
    Chains ending at an unpaired edge end, chains that close back on
    the party they started from, and repeater-only cycles are dropped.
    """
    present = state.present
    partner: dict[NodeId, dict[NodeId, NodeId]] = {}
    for u, pairs in pairings.by_repeater.items():
        links: dict[NodeId, NodeId] = {}
        for a, b in pairs:
            for x in (a, b):
                edge = (u, x) if u < x else (x, u)
                if edge not in present:
                    raise InconsistentPairing(f"pairing at {u} references absent edge {edge}")
                if x in links:
                    raise InconsistentPairing(f"edge ({u}, {x}) spliced twice at repeater {u}")
            links[a] = b
            links[b] = a
        partner[u] = links

    party_set = set(topology.parties)
    visited: set[Edge] = set()
    paths: list[Path] = []
    for start in topology.parties:
        for first in topology.adjacency[start]:
            edge = (start, first) if start < first else (first, start)
            if edge not in present or edge in visited:
                continue
            visited.add(edge)
            nodes = [start, first]
            prev, cur = start, first
            while cur not in party_set:
                nxt = partner.get(cur, {}).get(prev)
                if nxt is None:
                    nodes = []  # dead end, chain wasted
                    break
                nxt_edge = (cur, nxt) if cur < nxt else (nxt, cur)
                visited.add(nxt_edge)
                nodes.append(nxt)
                prev, cur = cur, nxt
            if nodes and nodes[-1] != start:
                paths.append(Path(tuple(nodes)))
    return PathSet(tuple(paths))


def route_paths(
    topology: GridTopology,
    state: EntanglementState,
    algorithm: AlgorithmKind,
    rng: np.random.Generator,
) -> PathSet:
    """Dispatch to the requested routing algorithm."""
    if algorithm is AlgorithmKind.GLOBAL:
        return route_global(topology, state, rng)
    return route_local(topology, state, algorithm, rng)
