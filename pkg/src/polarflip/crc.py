"""Bit-level CRC arithmetic with a configurable generator polynomial.

The reference implementation is the classic MSB-first shift register working
one bit at a time.  Because every supported option (initial register value,
input/output reflection, final xor) is affine over GF(2), a matrix form of the
same CRC can be precomputed for a fixed message length; that form is what the
decoder uses in its hot path (see PolarCode), and it is derived from the
bitwise engine so the two can never disagree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# 24-bit generator used on 5G control channels (x^24 + x^23 + x^18 + x^17 +
# x^14 + x^11 + x^10 + x^7 + x^6 + x^5 + x^4 + x^3 + x + 1), zero init.
CRC24_POLY = 0x1864CFB


@dataclass(frozen=True)
class CrcSpec:
    """Generator polynomial of degree ``width``, given as width+1 bits MSB-first."""

    width: int
    poly: int
    init: int = 0
    reflect_in: bool = False
    reflect_out: bool = False
    xor_out: int = 0

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("CRC width must be >= 0")
        if self.width == 0:
            if self.poly != 1:
                raise ValueError("width-0 CRC must use the trivial polynomial 1")
            return
        if self.poly.bit_length() != self.width + 1:
            raise ValueError(
                f"polynomial 0x{self.poly:X} does not have degree {self.width}"
            )
        mask = (1 << self.width) - 1
        if not 0 <= self.init <= mask or not 0 <= self.xor_out <= mask:
            raise ValueError("init/xor_out must fit in the CRC width")

    def remainder(self, bits) -> np.ndarray:
        """CRC of a bit sequence, returned as ``width`` bits MSB-first."""
        if self.width == 0:
            return np.zeros(0, dtype=np.uint8)
        bits = np.asarray(bits, dtype=np.uint8)
        if self.reflect_in:
            bits = bits[::-1]
        mask = (1 << self.width) - 1
        top = 1 << (self.width - 1)
        gen = self.poly & mask
        reg = self.init
        for b in bits:
            msb = bool(reg & top)
            reg = (reg << 1) & mask
            if msb != bool(b):
                reg ^= gen
        out = [(reg >> (self.width - 1 - k)) & 1 for k in range(self.width)]
        if self.reflect_out:
            out = out[::-1]
        arr = np.array(out, dtype=np.uint8)
        if self.xor_out:
            xor = [(self.xor_out >> (self.width - 1 - k)) & 1 for k in range(self.width)]
            arr ^= np.array(xor, dtype=np.uint8)
        return arr

    def check(self, bits) -> bool:
        """True when the trailing ``width`` bits equal the CRC of the rest."""
        bits = np.asarray(bits, dtype=np.uint8)
        if self.width == 0:
            return True
        if bits.size < self.width:
            raise ValueError("message shorter than the CRC field")
        return bool(np.array_equal(self.remainder(bits[: -self.width]), bits[-self.width :]))


def crc_matrix(spec: CrcSpec, length: int) -> tuple[np.ndarray, np.ndarray]:
    """Affine form of ``spec`` for ``length``-bit messages.

    Returns (M, c0) with M of shape (length, width) such that
    remainder(x) == (x @ M) % 2 ^ c0 for every bit vector x.
    """
    c0 = spec.remainder(np.zeros(length, dtype=np.uint8))
    rows = np.empty((length, spec.width), dtype=np.uint8)
    unit = np.zeros(length, dtype=np.uint8)
    for j in range(length):
        unit[j] = 1
        rows[j] = spec.remainder(unit) ^ c0
        unit[j] = 0
    return rows, c0
