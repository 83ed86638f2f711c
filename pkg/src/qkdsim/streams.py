"""Deterministic random streams, one per (seed, round, stage).

Streams are counter-based (Philox): the 128-bit key encodes the master
seed together with the round index and a small stage label, so any
round can be sampled independently of every other round and in any
order.  Identical construction parameters always yield identical
sequences, which is the entire reproducibility contract of the
simulator.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter

_LABEL_BITS = 3
MAX_LABEL = (1 << _LABEL_BITS) - 1
MAX_SEED = 2**64 - 1
MAX_ROUND = 2 ** (64 - _LABEL_BITS) - 1


def _key(master_seed: int, round_index: int, label: int) -> np.ndarray:
    if not 0 <= master_seed <= MAX_SEED:
        raise InvalidParameter(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
    if not 0 <= round_index <= MAX_ROUND:
        raise InvalidParameter(f"round_index out of range: {round_index}")
    if not 0 <= label <= MAX_LABEL:
        raise InvalidParameter(f"stream label must be in [0, {MAX_LABEL}], got {label}")
    key = np.empty(2, dtype=np.uint64)
    key[0] = master_seed
    key[1] = (round_index << _LABEL_BITS) | label
    return key


def stream(master_seed: int, round_index: int = 0, label: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, round, label) triple."""
    return np.random.Generator(np.random.Philox(key=_key(master_seed, round_index, label)))


class RoundStreams:
    """Fast re-keyed view over the streams of one master seed.

    ``get(round_index, label)`` returns a generator whose draws are
    bit-identical to ``stream(seed, round_index, label)`` but without
    paying bit-generator construction cost on every round.  The
    returned generator is a shared object that is only valid until the
    next ``get`` call; it must not be stored across stages.
    """

    __slots__ = ("_bg", "_gen", "_key", "_state")

    def __init__(self, master_seed: int):
        self._key = _key(master_seed, 0, 0)
        self._bg = np.random.Philox(key=self._key)
        self._gen = np.random.Generator(self._bg)
        zeros = np.zeros(4, dtype=np.uint64)
        # Philox copies these arrays when the state is assigned.
        self._state = {
            "bit_generator": "Philox",
            "state": {"counter": zeros, "key": self._key},
            "buffer": zeros,
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }

    def get(self, round_index: int, label: int) -> np.random.Generator:
        if not 0 <= round_index <= MAX_ROUND:
            raise InvalidParameter(f"round_index out of range: {round_index}")
        if not 0 <= label <= MAX_LABEL:
            raise InvalidParameter(f"stream label must be in [0, {MAX_LABEL}], got {label}")
        self._key[1] = (round_index << _LABEL_BITS) | label
        self._bg.state = self._state
        return self._gen
