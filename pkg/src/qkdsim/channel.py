"""Stage 2 realization: swap routed paths into end-to-end channels.

Every interior repeater on a path performs one Bell state measurement,
succeeding with probability B.  Under the default ``heralded`` loss
model a single failure destroys the path; under ``silent`` the channel
is always delivered but a failure leaves it incoherent.  A surviving
channel stays coherent when none of its swaps decohere, each draw
succeeding with probability 1 - D.  The ``links`` exponent variant
instead draws one decoherence coin per elementary link of the path
(including the single link of a direct party-to-party path).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .routing import PathSet
from .topology import NodeId

LOSS_MODELS = ("heralded", "silent")
DECOHERENCE_EXPONENTS = ("swaps", "links")


@dataclass(frozen=True)
class Channel:
    """One realized end-to-end entangled channel between two parties."""

    endpoint_a: NodeId
    endpoint_b: NodeId
    coherent: bool


@dataclass(frozen=True)
class ChannelSet:
    channels: tuple[Channel, ...] = ()

    def __len__(self) -> int:
        return len(self.channels)

    def __iter__(self):
        return iter(self.channels)


def realize_channels(
    paths: PathSet,
    bsm_success: float,
    decoherence: float,
    rng: np.random.Generator,
    loss_model: str = "heralded",
    decoherence_exponent: str = "swaps",
) -> ChannelSet:
    """Sample swap success and decoherence for every routed path."""
    if not 0.0 <= bsm_success <= 1.0:
        raise InvalidParameter(f"bsm_success must lie in [0, 1], got {bsm_success}")
    if not 0.0 <= decoherence <= 1.0:
        raise InvalidParameter(f"decoherence must lie in [0, 1], got {decoherence}")
    if loss_model not in LOSS_MODELS:
        raise InvalidParameter(f"loss_model must be one of {LOSS_MODELS}, got {loss_model!r}")
    if decoherence_exponent not in DECOHERENCE_EXPONENTS:
        raise InvalidParameter(
            f"decoherence_exponent must be one of {DECOHERENCE_EXPONENTS},"
            f" got {decoherence_exponent!r}"
        )

    keep = 1.0 - decoherence
    channels = []
    for path in paths:
        k = path.intermediate_count
        m = k if decoherence_exponent == "swaps" else len(path.nodes) - 1
        swaps_ok = bool((rng.random(k) < bsm_success).all())
        if loss_model == "heralded":
            if not swaps_ok:
                continue
            coherent = bool((rng.random(m) < keep).all())
        else:
            coherent = swaps_ok and bool((rng.random(m) < keep).all())
        channels.append(Channel(path.nodes[0], path.nodes[-1], coherent))
    return ChannelSet(tuple(channels))
