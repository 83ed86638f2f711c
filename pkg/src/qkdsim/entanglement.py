"""Stage 1: sample which fiber links hold a shared EPR pair this round.

Each grid edge independently succeeds with the fiber transmission
probability 10^(-alpha*L/10), one Bernoulli draw per edge per round.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import compress

import numpy as np

from .errors import InvalidParameter
from .topology import Edge, GridTopology

# Standard telecom fiber attenuation; configurable everywhere it is used.
DEFAULT_ALPHA_DB_PER_KM = 0.2


@dataclass(frozen=True)
class EntanglementState:
    """The set of grid edges holding an EPR pair in the current round."""

    present: frozenset[Edge]

    def __len__(self) -> int:
        return len(self.present)

    def __contains__(self, edge: Edge) -> bool:
        return edge in self.present


def link_success_probability(alpha_db_per_km: float, fiber_length_km: float) -> float:
    """Probability 10^(-alpha*L/10) that one elementary link succeeds."""
    if alpha_db_per_km < 0:
        raise InvalidParameter(f"attenuation must be non-negative, got {alpha_db_per_km}")
    if fiber_length_km < 0:
        raise InvalidParameter(f"fiber length must be non-negative, got {fiber_length_km}")
    return 10.0 ** (-alpha_db_per_km * fiber_length_km / 10.0)


def generate_entanglement(
    topology: GridTopology, p: float, rng: np.random.Generator
) -> EntanglementState:
    """Draw one round of link successes, each edge kept with probability p."""
    mask = rng.random(len(topology.edges)) < p
    return EntanglementState(frozenset(compress(topology.edges, mask)))
