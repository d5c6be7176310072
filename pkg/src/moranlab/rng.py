"""Reproducible random streams for parallel replicates.

Every simulation replicate draws from its own stream, derived
deterministically from ``(master_seed, *key)`` via numpy's
``SeedSequence`` spawn mechanism. Results are therefore bit-identical
no matter how replicates are scheduled across workers.

Bounded integer draws use Lemire's multiply-shift rejection over
buffered 64-bit words, so vertex and neighbour selection probabilities
are exactly ``w/total`` and ``1/d`` with no floating-point bias.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 4096
_WORD = 1 << 64


class ReplicateRng:
    """One replicate's random stream with unbiased bounded draws."""

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, bit_generator):
        self._gen = np.random.Generator(bit_generator)
        self._buf = ()
        self._pos = 0

    def _word(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = self._gen.integers(
                0, _WORD, size=_BLOCK, dtype=np.uint64
            ).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), exact for arbitrary-size bounds."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        if bound == 1:
            return 0
        if bound <= _WORD:
            # Lemire: accept x*bound >> 64 unless the low half falls in the
            # biased residue range.
            threshold = (_WORD - bound) % bound
            while True:
                m = self._word() * bound
                if (m & (_WORD - 1)) >= threshold:
                    return m >> 64
        # Wide bound: assemble enough 64-bit words, mask, reject.
        bits = (bound - 1).bit_length()
        words = -(-bits // 64)
        mask = (1 << bits) - 1
        while True:
            x = 0
            for _ in range(words):
                x = (x << 64) | self._word()
            x &= mask
            if x < bound:
                return x

    def random_open(self) -> float:
        """Uniform float in the open interval (0, 1)."""
        while True:
            u = self._gen.random()
            if u > 0.0:
                return u

    def exponential(self, rate: float) -> float:
        """Exp(rate) holding time via inverse CDF on an open-interval draw."""
        if rate <= 0.0:
            raise ValueError(f"rate must be positive, got {rate}")
        return -np.log(self.random_open()) / rate


def stream(master_seed: int, *key: int) -> ReplicateRng:
    """Derive the stream keyed by (master_seed, *key)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    return ReplicateRng(np.random.PCG64(ss))
