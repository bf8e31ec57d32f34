"""Extremum encoder: the index of the maximum-magnitude sample as a k-bit message.

The encoder looks at its n = 2**k samples, finds

    j = argmax over 0 <= i < n of |x[i]|^2,

and transmits j as k bits, most-significant bit first.  Ties are broken
toward the smallest index so that results are reproducible under floating
point (exact ties have probability zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def pack(j: int, k: int) -> tuple[int, ...]:
    """Big-endian k-bit encoding of j. Requires 0 <= j < 2**k."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if not 0 <= j < (1 << k):
        raise ValueError(f"index {j} does not fit in {k} bits")
    return tuple((j >> (k - 1 - b)) & 1 for b in range(k))


def unpack(bits) -> int:
    """Inverse of :func:`pack`."""
    j = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        j = (j << 1) | b
    return j


@dataclass(frozen=True)
class Message:
    """A k-bit message carrying the extremum index ``j`` (MSB first)."""

    bits: tuple[int, ...]
    j: int

    def __post_init__(self) -> None:
        if unpack(self.bits) != self.j:
            raise ValueError("bits do not encode j")

    @property
    def k(self) -> int:
        return len(self.bits)

    @classmethod
    def from_index(cls, j: int, k: int) -> "Message":
        return cls(bits=pack(j, k), j=j)

    @classmethod
    def from_bits(cls, bits) -> "Message":
        bits = tuple(int(b) for b in bits)
        return cls(bits=bits, j=unpack(bits))

    def to_bytes(self) -> bytes:
        """Byte serialization: k bits MSB-first, zero-padded on the right."""
        nbytes = (self.k + 7) // 8
        padded = self.bits + (0,) * (8 * nbytes - self.k)
        return bytes(unpack(padded[8 * i : 8 * i + 8]) for i in range(nbytes))

    @classmethod
    def from_bytes(cls, data: bytes, k: int) -> "Message":
        if len(data) != (k + 7) // 8:
            raise ValueError(f"expected {(k + 7) // 8} bytes for k={k}, got {len(data)}")
        bits = []
        for byte in data:
            bits.extend((byte >> (7 - b)) & 1 for b in range(8))
        if any(bits[k:]):
            raise ValueError("nonzero padding bits")
        return cls.from_bits(bits[:k])


def encode_max_index(x_window) -> Message:
    """Encode the argmax of |x|^2 over the window as a k-bit message.

    The window length must be a power of two (n = 2**k); ties break to
    the smallest index.
    """
    x = np.asarray(x_window[:])
    n = x.size
    if n < 1:
        raise ValueError("empty encoder window")
    if n & (n - 1):
        raise ValueError(f"window length must be a power of two, got {n}")
    k = n.bit_length() - 1
    mags = x.real * x.real + x.imag * x.imag if np.iscomplexobj(x) else x * x
    j = int(np.argmax(mags))
    return Message.from_index(j, k)
