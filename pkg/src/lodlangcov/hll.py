"""Mergeable HyperLogLog sketch for distinct-subject counting.

Used when exact per-tag subject sets would not fit in memory (full
Wikidata-scale dumps). Memory is 2^p one-byte registers per sketch,
independent of stream length.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np


def _alpha(m: int) -> float:
    # Bias-correction constant from the original HyperLogLog analysis.
    if m >= 128:
        return 0.7213 / (1 + 1.079 / m)
    if m >= 64:
        return 0.709
    if m >= 32:
        return 0.697
    return 0.673


class HyperLogLog:
    """Register-based cardinality sketch with register-wise max merge."""

    __slots__ = ("p", "m", "seed", "registers", "_key")

    def __init__(self, precision: int = 14, seed: int = 0):
        if not 4 <= precision <= 18:
            raise ValueError(f"precision must be in [4, 18], got {precision}")
        self.p = precision
        self.m = 1 << precision
        self.seed = seed
        self.registers = np.zeros(self.m, dtype=np.uint8)
        # keyed hash keeps estimates deterministic for a fixed seed
        self._key = seed.to_bytes(8, "little", signed=True)

    def _hash(self, item: str) -> int:
        digest = hashlib.blake2b(item.encode("utf-8"), digest_size=8, key=self._key).digest()
        return int.from_bytes(digest, "little")

    def add(self, item: str) -> None:
        h = self._hash(item)
        j = h & (self.m - 1)
        w = h >> self.p
        # rank = position of first 1-bit in the remaining 64-p bits
        rank = (64 - self.p) - w.bit_length() + 1
        if rank > self.registers[j]:
            self.registers[j] = rank

    def count(self) -> int:
        raw = _alpha(self.m) * self.m * self.m / np.sum(np.exp2(-self.registers.astype(np.float64)))
        if raw <= 2.5 * self.m:
            zeros = int(np.count_nonzero(self.registers == 0))
            if zeros:
                return int(round(self.m * math.log(self.m / zeros)))
        if raw <= (1 << 32) / 30:
            return int(round(raw))
        return int(round(-(1 << 32) * math.log(1 - raw / (1 << 32))))

    def merge(self, other: "HyperLogLog") -> "HyperLogLog":
        """Union of the two multisets: element-wise register maximum."""
        if self.p != other.p:
            raise ValueError(f"precision mismatch: {self.p} != {other.p}")
        if self.seed != other.seed:
            raise ValueError(f"hash seed mismatch: {self.seed} != {other.seed}")
        out = HyperLogLog(self.p, self.seed)
        np.maximum(self.registers, other.registers, out=out.registers)
        return out

    def copy(self) -> "HyperLogLog":
        out = HyperLogLog(self.p, self.seed)
        out.registers[:] = self.registers
        return out
