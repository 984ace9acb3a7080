import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmahh_lab.bitstring import (
    BitString,
    distance_to_optimum,
    hamming,
    ones_count,
    random_one_bit_flip,
    random_source,
    uniform_bitstring,
    zeros_count,
)

bitlists = st.lists(st.integers(0, 1), min_size=1, max_size=80)


def test_from_str_roundtrip():
    x = BitString.from_str("10110")
    assert str(x) == "10110"
    assert x.bits() == [1, 0, 1, 1, 0]
    assert len(x) == 5


@pytest.mark.parametrize("text, expected", [("11111", 0), ("0000000", 7), ("10110", 2)])
def test_distance_to_optimum(text, expected):
    assert distance_to_optimum(BitString.from_str(text)) == expected


def test_invalid_construction():
    with pytest.raises(ValueError):
        BitString(0, 0)
    with pytest.raises(ValueError):
        BitString(0b100, 2)
    with pytest.raises(ValueError):
        BitString.from_bits([0, 2])
    with pytest.raises(ValueError):
        uniform_bitstring(0, random_source(0))
    with pytest.raises(ValueError):
        random_source(-1)


@given(bitlists)
def test_counts_partition_length(bits):
    x = BitString.from_bits(bits)
    assert ones_count(x) + zeros_count(x) == x.n == len(bits)
    assert 0 <= distance_to_optimum(x) <= x.n


@given(bitlists, st.integers(0, 2**32))
def test_flip_changes_one_position(bits, seed):
    x = BitString.from_bits(bits)
    y = random_one_bit_flip(x, random_source(seed))
    assert y.n == x.n
    assert hamming(x, y) == 1
    assert abs(distance_to_optimum(y) - distance_to_optimum(x)) == 1
    assert x.bits() == bits  # the input is not mutated


def test_flip_of_single_bit():
    rng = random_source(3)
    for _ in range(20):
        assert str(random_one_bit_flip(BitString.from_str("0"), rng)) == "1"


def test_same_seed_same_strings():
    a = uniform_bitstring(50, random_source(11, 4))
    b = uniform_bitstring(50, random_source(11, 4))
    c = uniform_bitstring(50, random_source(11, 5))
    assert a == b
    assert a != c


def test_streams_are_distinct():
    draws = {tuple(random_source(5, i).integers(0, 2**62, size=4)) for i in range(100)}
    assert len(draws) == 100


def test_uniform_mean_ones():
    rng = random_source(1)
    samples = 10**5
    counts = np.array([uniform_bitstring(64, rng).ones for _ in range(samples)])
    se = math.sqrt(64 * 0.25 / samples)
    assert abs(counts.mean() - 32) <= 3 * se
    assert counts.min() >= 0


def test_single_bit_is_fair():
    rng = random_source(2)
    ones = sum(uniform_bitstring(1, rng).ones for _ in range(20000))
    assert abs(ones / 20000 - 0.5) <= 3 * math.sqrt(0.25 / 20000)


def test_flip_positions_uniform():
    rng = random_source(9)
    x = BitString.from_str("0110100101")
    flips = 10**5
    hits = np.zeros(10, dtype=int)
    for _ in range(flips):
        y = random_one_bit_flip(x, rng)
        hits[(x.word ^ y.word).bit_length() - 1] += 1
    band = 3 * math.sqrt(flips * 0.1 * 0.9)
    assert np.all(np.abs(hits - 10**4) <= band)


def test_downward_move_probability():
    # from layer y the flip hits a zero with probability y/n
    rng = random_source(4)
    x = BitString.from_str("0001111111")
    trials = 50000
    down = sum(distance_to_optimum(random_one_bit_flip(x, rng)) < 3 for _ in range(trials))
    assert abs(down / trials - 0.3) <= 3 * math.sqrt(0.21 / trials)
