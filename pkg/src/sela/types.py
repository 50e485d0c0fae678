"""Shared domain types for the ballot-audit device simulator."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

MAX_CANDIDATE = 99_999      # largest number the 5-digit visor can show
BLANK_CODE = 0xFFFF_FFFE    # wire code for a BRANCO (blank) vote
NULL_CODE = 0xFFFF_FFFF     # wire code for a NULO (spoiled) vote
MAX_CONTEST = 255
MAX_CODE_SIZE = 65_531      # a code readout must fit one response frame

BLANK_LABEL = "BRANCO"
NULL_LABEL = "NULO"


@dataclass(frozen=True, order=True)
class CandidateNumber:
    """A voter's selection: up to five decimal digits, or BRANCO/NULO.

    The two special votes are carried as sentinel wire codes above the
    numeric range, so ordering instances sorts numeric candidates
    ascending followed by BRANCO and then NULO. That ordering is what
    the canonical tally serialization relies on.
    """

    code: int

    def __post_init__(self) -> None:
        if self.code in (BLANK_CODE, NULL_CODE):
            return
        if not 0 <= self.code <= MAX_CANDIDATE:
            raise ValueError(f"candidate number out of range: {self.code}")

    @classmethod
    def of(cls, number: int) -> CandidateNumber:
        if not 0 <= number <= MAX_CANDIDATE:
            raise ValueError(f"candidate number out of range: {number}")
        return cls(number)

    @classmethod
    def parse(cls, token: str) -> CandidateNumber:
        text = token.strip().upper()
        if text == BLANK_LABEL:
            return BLANK
        if text == NULL_LABEL:
            return NULL
        if not text.isdigit():
            raise ValueError(f"not a candidate token: {token!r}")
        return cls.of(int(text))

    @property
    def is_blank(self) -> bool:
        return self.code == BLANK_CODE

    @property
    def is_null(self) -> bool:
        return self.code == NULL_CODE

    @property
    def label(self) -> str:
        return candidate_label(self.code)

    @property
    def visor_text(self) -> str:
        if self.is_blank:
            return "BBBBB"
        if self.is_null:
            return "NNNNN"
        return f"{self.code:05d}"

    def __str__(self) -> str:
        return self.label


BLANK = CandidateNumber(BLANK_CODE)
NULL = CandidateNumber(NULL_CODE)


def candidate_label(code: int) -> str:
    """Tally-line rendering for any 32-bit candidate code.

    Total over the full code space on purpose: audit tooling must be able
    to re-serialize whatever a (possibly tampered) memory image contains.
    """
    if code == BLANK_CODE:
        return BLANK_LABEL
    if code == NULL_CODE:
        return NULL_LABEL
    return str(code)


def check_contest(contest: int) -> int:
    """Validate a contest id (1..255; 0 is reserved)."""
    if not 1 <= contest <= MAX_CONTEST:
        raise ValueError(f"contest id out of range: {contest}")
    return contest


@dataclass(frozen=True)
class SectionInfo:
    """Electoral zone and section, both nonzero 16-bit values."""

    zone: int
    section: int

    def __post_init__(self) -> None:
        for name, value in (("zone", self.zone), ("section", self.section)):
            if not 1 <= value <= 0xFFFF:
                raise ValueError(f"{name} out of range: {value}")

    def __str__(self) -> str:
        return f"{self.zone}:{self.section}"


@dataclass(frozen=True)
class Digest160:
    """A 160-bit fingerprint value."""

    value: bytes

    def __post_init__(self) -> None:
        if len(self.value) != 20:
            raise ValueError(f"digest must be 20 bytes, got {len(self.value)}")

    @classmethod
    def from_hex(cls, text: str) -> Digest160:
        return cls(bytes.fromhex(text))

    @property
    def hex(self) -> str:
        return self.value.hex()

    def __str__(self) -> str:
        return self.hex


@dataclass(frozen=True)
class CodeImage:
    """The device firmware bytes plus their CRC-32."""

    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) > MAX_CODE_SIZE:
            raise ValueError(
                f"code image larger than {MAX_CODE_SIZE} bytes: {len(self.data)}"
            )

    @property
    def crc32(self) -> int:
        return zlib.crc32(self.data) & 0xFFFFFFFF

    def with_flipped_byte(self, offset: int, mask: int = 0xFF) -> CodeImage:
        """Return a copy with one byte xor-ed, for tamper scenarios."""
        if not self.data:
            raise ValueError("cannot flip a byte of an empty code image")
        off = offset % len(self.data)
        mutated = bytearray(self.data)
        mutated[off] ^= mask & 0xFF
        return CodeImage(bytes(mutated))


# Deterministic stand-in firmware used when no code image is supplied.
_REFERENCE_FIRMWARE = b"SELA-FIRMWARE-0001\n" + bytes(range(256)) * 8


def reference_code() -> CodeImage:
    return CodeImage(_REFERENCE_FIRMWARE)
