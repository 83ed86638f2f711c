"""Static N x N repeater grid with party placement and hop-distance tables.

Nodes are indexed row-major, increasing left to right and bottom to top:
node i sits at coordinate ``(i mod n, i div n)``.  Alice always occupies
corner 0 and Bob the opposite corner n^2 - 1.  Trusted nodes are placed
by one of the named schemes below or by an explicit list of node ids.

The topology is immutable once built and safe to share across
concurrently running trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidGridSize, InvalidParameter, InvalidPlacement

NodeId = int
Edge = tuple[int, int]  # undirected, stored with the smaller id first


class PlacementKind(Enum):
    NONE = "none"
    CENTRAL = "central"
    CORNER = "corner"
    DIAGONAL = "diagonal"
    ASYMMETRIC = "asymmetric"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Placement:
    """A trusted-node placement scheme, resolved against a grid size later."""

    kind: PlacementKind
    custom: tuple[NodeId, ...] = ()

    @classmethod
    def none(cls) -> "Placement":
        return cls(PlacementKind.NONE)

    @classmethod
    def central(cls) -> "Placement":
        return cls(PlacementKind.CENTRAL)

    @classmethod
    def corner(cls) -> "Placement":
        return cls(PlacementKind.CORNER)

    @classmethod
    def diagonal(cls) -> "Placement":
        return cls(PlacementKind.DIAGONAL)

    @classmethod
    def asymmetric(cls) -> "Placement":
        return cls(PlacementKind.ASYMMETRIC)

    @classmethod
    def custom_nodes(cls, nodes) -> "Placement":
        return cls(PlacementKind.CUSTOM, tuple(int(v) for v in nodes))

    @classmethod
    def parse(cls, text: str) -> "Placement":
        """Parse the CLI/config spelling: a kind name or ``custom=3,7``."""
        text = text.strip().lower()
        if text.startswith("custom="):
            body = text[len("custom="):]
            try:
                ids = tuple(int(part) for part in body.split(",") if part != "")
            except ValueError as exc:
                raise InvalidPlacement(f"unparsable custom placement {text!r}") from exc
            if not ids:
                raise InvalidPlacement("custom placement lists no nodes")
            return cls(PlacementKind.CUSTOM, ids)
        for kind in PlacementKind:
            if kind is not PlacementKind.CUSTOM and kind.value == text:
                return cls(kind)
        raise InvalidPlacement(f"unknown placement {text!r}")

    def __str__(self) -> str:
        if self.kind is PlacementKind.CUSTOM:
            return "custom=" + ",".join(str(v) for v in self.custom)
        return self.kind.value


def _round_half_down(value: float) -> int:
    # round to nearest integer, ties (x.5) rounding down
    return math.ceil(value - 0.5)


def trusted_node_ids(placement: Placement, n: int) -> list[NodeId]:
    """Resolve a placement to concrete node ids on an n x n grid.

    Raises InvalidPlacement when the scheme degenerates for the given
    size: a resolved node coincides with Alice/Bob (e.g. central on
    n=2), two resolved nodes coincide (diagonal on n=3), or a custom id
    is out of range or duplicated.
    """
    if n < 2:
        raise InvalidGridSize(f"grid side must be at least 2, got {n}")
    alice = 0
    bob = n * n - 1

    def node(x: int, y: int) -> NodeId:
        if not (0 <= x < n and 0 <= y < n):
            raise InvalidPlacement(f"placement {placement} resolves outside the {n}x{n} grid")
        return y * n + x

    kind = placement.kind
    if kind is PlacementKind.NONE:
        return []
    if kind is PlacementKind.CUSTOM:
        ids = list(placement.custom)
        if len(set(ids)) != len(ids):
            raise InvalidPlacement(f"duplicate trusted node in {placement}")
        for v in ids:
            if not 0 <= v <= bob:
                raise InvalidPlacement(f"trusted node {v} outside the {n}x{n} grid")
            if v in (alice, bob):
                raise InvalidPlacement(f"trusted node {v} collides with Alice or Bob")
        return ids

    c = (n - 1) // 2
    if kind is PlacementKind.CENTRAL:
        ids = [node(c, c)]
    elif kind is PlacementKind.CORNER:
        ids = [node(n - 1, 0), node(0, n - 1)]
    elif kind is PlacementKind.DIAGONAL:
        lo = _round_half_down((n - 1) / 3)
        hi = _round_half_down(2 * (n - 1) / 3)
        ids = [node(lo, lo), node(hi, hi)]
    elif kind is PlacementKind.ASYMMETRIC:
        ids = [node(c, c), node(c - 1, c - 1)]
    else:  # pragma: no cover - exhaustive enum
        raise InvalidPlacement(f"unknown placement kind {kind}")

    if len(set(ids)) != len(ids):
        raise InvalidPlacement(f"placement {placement} degenerates to duplicate nodes on n={n}")
    for v in ids:
        if v in (alice, bob):
            raise InvalidPlacement(f"placement {placement} collides with Alice or Bob on n={n}")
    return ids


@dataclass(frozen=True)
class GridTopology:
    """An immutable grid network with resolved parties and distance tables."""

    n: int
    fiber_length_km: float
    alice: NodeId
    bob: NodeId
    trusted: tuple[NodeId, ...]
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[NodeId, ...], ...]
    party_distance: dict[NodeId, tuple[int, ...]]

    @property
    def num_nodes(self) -> int:
        return self.n * self.n

    @property
    def parties(self) -> tuple[NodeId, ...]:
        return (self.alice, self.bob) + self.trusted

    def coord(self, v: NodeId) -> tuple[int, int]:
        return v % self.n, v // self.n

    def is_party(self, v: NodeId) -> bool:
        return v == self.alice or v == self.bob or v in self.trusted


def build_grid(n: int, fiber_length_km: float, placement: Placement) -> GridTopology:
    """Build the grid, resolve trusted nodes and precompute hop distances.

    Every edge spans ``fiber_length_km``.  A zero fiber length is
    allowed and corresponds to lossless links.
    """
    if n < 2:
        raise InvalidGridSize(f"grid side must be at least 2, got {n}")
    if fiber_length_km < 0:
        raise InvalidParameter(f"fiber length must be non-negative, got {fiber_length_km}")

    trusted = tuple(trusted_node_ids(placement, n))
    total = n * n
    edges: list[Edge] = []
    neighbors: list[list[NodeId]] = [[] for _ in range(total)]
    for y in range(n):
        for x in range(n):
            i = y * n + x
            if x + 1 < n:
                edges.append((i, i + 1))
                neighbors[i].append(i + 1)
                neighbors[i + 1].append(i)
            if y + 1 < n:
                edges.append((i, i + n))
                neighbors[i].append(i + n)
                neighbors[i + n].append(i)

    parties = (0, total - 1) + trusted
    party_distance: dict[NodeId, tuple[int, ...]] = {}
    for p in parties:
        px, py = p % n, p // n
        party_distance[p] = tuple(abs(v % n - px) + abs(v // n - py) for v in range(total))

    return GridTopology(
        n=n,
        fiber_length_km=float(fiber_length_km),
        alice=0,
        bob=total - 1,
        trusted=trusted,
        edges=tuple(edges),
        adjacency=tuple(tuple(sorted(nb)) for nb in neighbors),
        party_distance=party_distance,
    )


def report_user_distance(topology: GridTopology) -> float:
    """Euclidean Alice-Bob separation in km: sqrt(2) * (n-1) * L."""
    return math.sqrt(2.0) * (topology.n - 1) * topology.fiber_length_km
