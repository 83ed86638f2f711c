"""Channel realization: swap success, decoherence, loss-model variants."""

import math

import pytest

from qkdsim.channel import realize_channels
from qkdsim.errors import InvalidParameter
from qkdsim.routing import Path, PathSet
from qkdsim.streams import stream

PATH2 = Path((0, 1))           # direct party link, no swaps
PATH3 = Path((0, 1, 2))        # one swap
PATH5 = Path((0, 1, 2, 3, 4))  # three swaps


def binom_sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


def test_perfect_parameters_keep_every_path():
    paths = PathSet((PATH2, PATH3, PATH5))
    channels = realize_channels(paths, 1.0, 0.0, stream(1))
    assert len(channels) == 3
    assert all(ch.coherent for ch in channels)
    assert [(ch.endpoint_a, ch.endpoint_b) for ch in channels] == [(0, 1), (0, 2), (0, 4)]


def test_two_node_path_always_survives():
    paths = PathSet((PATH2,))
    for i in range(200):
        channels = realize_channels(paths, 0.5, 0.9, stream(2, i, 0))
        assert len(channels) == 1
        assert channels.channels[0].coherent


def test_one_swap_path_statistics():
    b, d = 0.85, 0.02
    samples = 100_000
    produced = coherent = 0
    paths = PathSet((PATH3,))
    for i in range(samples):
        channels = realize_channels(paths, b, d, stream(3, i, 0))
        if len(channels):
            produced += 1
            coherent += channels.channels[0].coherent
    assert abs(produced / samples - b) <= 3 * binom_sigma(b, samples)
    assert abs(coherent / produced - (1 - d)) <= 3 * binom_sigma(1 - d, produced)


def test_three_swap_path_statistics():
    b, d = 0.9, 0.1
    samples = 100_000
    produced = coherent = 0
    paths = PathSet((PATH5,))
    for i in range(samples):
        channels = realize_channels(paths, b, d, stream(4, i, 0))
        if len(channels):
            produced += 1
            coherent += channels.channels[0].coherent
    assert abs(produced / samples - b**3) <= 3 * binom_sigma(b**3, samples)
    p_coh = (1 - d) ** 3
    assert abs(coherent / produced - p_coh) <= 3 * binom_sigma(p_coh, produced)


def test_channel_count_bounds():
    paths = PathSet((PATH3, PATH5, PATH3))
    for i in range(100):
        channels = realize_channels(paths, 0.6, 0.5, stream(5, i, 0))
        assert len(channels) <= len(paths.paths)
    assert len(realize_channels(paths, 1.0, 0.5, stream(6))) == 3
    assert all(
        ch.coherent for ch in realize_channels(paths, 0.4, 0.0, stream(7))
    )


def test_silent_loss_model_always_emits():
    b, d = 0.7, 0.0
    samples = 50_000
    coherent = 0
    paths = PathSet((PATH5,))
    for i in range(samples):
        channels = realize_channels(paths, b, d, stream(8, i, 0), loss_model="silent")
        assert len(channels) == 1
        coherent += channels.channels[0].coherent
    # with no decoherence the channel stays coherent iff every swap worked
    p_coh = b**3
    assert abs(coherent / samples - p_coh) <= 3 * binom_sigma(p_coh, samples)


def test_links_exponent_counts_every_elementary_pair():
    d = 0.3
    samples = 50_000
    coherent2 = coherent3 = 0
    for i in range(samples):
        # a direct party link carries one EPR pair and may now decohere
        ch2 = realize_channels(PathSet((PATH2,)), 1.0, d, stream(9, i, 0),
                               decoherence_exponent="links")
        coherent2 += ch2.channels[0].coherent
        ch3 = realize_channels(PathSet((PATH3,)), 1.0, d, stream(9, i, 1),
                               decoherence_exponent="links")
        coherent3 += ch3.channels[0].coherent
    assert abs(coherent2 / samples - (1 - d)) <= 3 * binom_sigma(1 - d, samples)
    assert abs(coherent3 / samples - (1 - d) ** 2) <= 3 * binom_sigma((1 - d) ** 2, samples)


def test_parameter_validation():
    paths = PathSet((PATH2,))
    with pytest.raises(InvalidParameter):
        realize_channels(paths, -0.1, 0.0, stream(0))
    with pytest.raises(InvalidParameter):
        realize_channels(paths, 0.5, 1.5, stream(0))
    with pytest.raises(InvalidParameter):
        realize_channels(paths, 0.5, 0.5, stream(0), loss_model="lossy")
    with pytest.raises(InvalidParameter):
        realize_channels(paths, 0.5, 0.5, stream(0), decoherence_exponent="hops")


def test_determinism():
    paths = PathSet((PATH3, PATH5))
    a = realize_channels(paths, 0.8, 0.1, stream(10, 4, 2))
    b = realize_channels(paths, 0.8, 0.1, stream(10, 4, 2))
    assert a == b
