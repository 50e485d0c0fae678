"""Integrity primitives: the fingerprint hash and the firmware CRC.

SHA-1 (per the Secure Hash Standard) fingerprints the code image and the
tally data; CRC-32 in its ISO-HDLC form (reflected, init and final xor
all-ones, check value of b"123456789" is 0xCBF43926) guards the firmware
readout. Both are backed by the standard library and cross-checked in the
test suite against independent bit-level implementations.
"""

from __future__ import annotations

import hashlib
import zlib

from .types import Digest160


def sha1_digest(data: bytes) -> Digest160:
    """Fingerprint a byte string. Deterministic, empty input allowed."""
    return Digest160(hashlib.sha1(data).digest())


def crc32_of(data: bytes) -> int:
    """CRC-32/ISO-HDLC of a byte string."""
    return zlib.crc32(data) & 0xFFFFFFFF
