"""Fault injections for robustness scenarios.

Four disturbance kinds are modeled:

* DISCONNECT    -- the link goes dead; later sends get no response.
* TAMPER_CODE   -- one firmware byte is flipped on the device.
* PRELOAD_MEM   -- a counter is written into data memory out of band.
* FLIP_BIT      -- one bit of an exported memory artifact is flipped.

The first three happen on the device or link during a run; FLIP_BIT is
applied to the export artifact after the run (transport or storage
tampering).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .canonical import DATA_SIZE
from .device import EXPORT_IMAGE_SIZE
from .integrity import crc32_of
from .types import CandidateNumber


@dataclass(frozen=True)
class Disconnect:
    pass


@dataclass(frozen=True)
class TamperCode:
    offset: int = 0


@dataclass(frozen=True)
class PreloadMem:
    contest: int
    candidate: CandidateNumber
    count: int


@dataclass(frozen=True)
class FlipBit:
    offset: int
    bit: int


Fault = Disconnect | TamperCode | PreloadMem | FlipBit

FAULT_NAMES = {
    Disconnect: "DISCONNECT",
    TamperCode: "TAMPER_CODE",
    PreloadMem: "PRELOAD_MEM",
    FlipBit: "FLIP_BIT",
}


def describe_fault(fault: Fault) -> str:
    name = FAULT_NAMES[type(fault)]
    if isinstance(fault, TamperCode):
        return f"{name} offset={fault.offset}"
    if isinstance(fault, PreloadMem):
        return f"{name} {fault.contest};{fault.candidate};{fault.count}"
    if isinstance(fault, FlipBit):
        return f"{name} offset={fault.offset} bit={fault.bit}"
    return name


def flip_bit_in_export(
    artifact: bytes, offset: int, bit: int, fix_crc: bool = False
) -> bytes:
    """Flip one bit of an export artifact.

    With fix_crc the trailing image CRC is recomputed, producing an
    artifact that reads fine but whose content no longer matches the
    recorded fingerprint; without it the artifact is transport-corrupt
    and fails the CRC check outright.
    """
    if len(artifact) != EXPORT_IMAGE_SIZE:
        raise ValueError(f"export artifact must be {EXPORT_IMAGE_SIZE} bytes")
    if not 0 <= offset < DATA_SIZE:
        raise ValueError(f"offset {offset} outside the data image")
    if not 0 <= bit <= 7:
        raise ValueError("bit index must be 0..7")
    mutated = bytearray(artifact)
    mutated[offset] ^= 1 << bit
    if fix_crc:
        mutated[DATA_SIZE:] = struct.pack(">I", crc32_of(bytes(mutated[:DATA_SIZE])))
    return bytes(mutated)
