"""Bit-strings, one-bit-flip mutation and seeded random streams.

Bits are packed into a Python ``int`` (bit ``i`` is position ``i``), so a
flip is a single XOR and the ones count is cached at construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RandomSource = np.random.Generator


def random_source(seed: int, stream: int | None = None) -> RandomSource:
    """Return the generator for ``(seed, stream)``.

    Distinct ``(seed, stream)`` pairs give statistically independent streams
    (``SeedSequence`` hashing), and the same pair always gives the same draws.
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    entropy = [int(seed)] if stream is None else [int(seed), int(stream)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class BitString:
    """Immutable fixed-length bit-string."""

    word: int
    n: int
    ones: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"length must be positive, got {self.n}")
        if self.word < 0 or self.word >> self.n:
            raise ValueError("word has bits outside the string length")
        object.__setattr__(self, "ones", self.word.bit_count())

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        word = 0
        for i, b in enumerate(bits):
            word |= b << i
        return cls(word, len(bits))

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def ones_string(cls, n: int) -> "BitString":
        return cls((1 << n) - 1, n)

    @classmethod
    def zeros_string(cls, n: int) -> "BitString":
        return cls(0, n)

    def __len__(self):
        return self.n

    def __getitem__(self, i: int) -> int:
        if not -self.n <= i < self.n:
            raise IndexError(i)
        return (self.word >> (i % self.n)) & 1

    def __str__(self):
        return "".join(str(b) for b in self.bits())

    def bits(self) -> list[int]:
        return [(self.word >> i) & 1 for i in range(self.n)]

    def flip(self, i: int) -> "BitString":
        if not 0 <= i < self.n:
            raise IndexError(i)
        return BitString(self.word ^ (1 << i), self.n)


def ones_count(x: BitString) -> int:
    return x.ones


def zeros_count(x: BitString) -> int:
    return x.n - x.ones


def hamming(x: BitString, y: BitString) -> int:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")
    return (x.word ^ y.word).bit_count()


def distance_to_optimum(x: BitString) -> int:
    """Hamming distance to the all-ones string, i.e. the layer index of ``x``."""
    return x.n - x.ones


def uniform_bitstring(n: int, rng: RandomSource) -> BitString:
    if n < 1:
        raise ValueError(f"length must be positive, got {n}")
    bits = rng.integers(0, 2, size=n)
    return BitString.from_bits(bits)


def random_one_bit_flip(x: BitString, rng: RandomSource) -> BitString:
    """Copy of ``x`` with one uniformly chosen position flipped."""
    return x.flip(int(rng.integers(0, x.n)))
