"""Byte-level framing and command codec for the controller/device link.

The link is an ordered byte stream (a plain serial line in hardware).
Every unit travels in one frame:

    STX(0x02) | kind(1) | length(2 BE) | payload | crc16(2 BE) | ETX(0x03)

where crc16 is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, check value
of b"123456789" is 0x29B1) computed over kind || length || payload. There
is no byte stuffing: the explicit length makes binary payloads safe. The
link is half duplex; every well-framed command gets exactly one response.

Command payloads:

    INIT, ZERESIMA, OPEN_VOTER, CLOSE_VOTER, FINALIZE,
    AUDIT_READ_DATA, AUDIT_READ_CODE, PING        -> empty
    SECTION_INFO                                  -> zone(2 BE) section(2 BE)
    VOTE                                          -> contest(1) candidate(4 BE)
    CORRECT, CONFIRM                              -> contest(1)

Candidate codes 0xFFFFFFFE and 0xFFFFFFFF mean BRANCO and NULO; any other
value above 99999 is rejected as malformed. Responses are ACK (optional
payload), NAK (one status byte) and DATA (payload).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum, IntEnum

from .types import (
    BLANK_CODE,
    MAX_CANDIDATE,
    NULL_CODE,
    CandidateNumber,
)

STX = 0x02
ETX = 0x03
MAX_PAYLOAD = 0xFFFF
FRAME_OVERHEAD = 7  # STX + kind + length + crc16 + ETX


class Opcode(IntEnum):
    INIT = 0x01
    ZERESIMA = 0x02
    SECTION_INFO = 0x03
    OPEN_VOTER = 0x04
    VOTE = 0x05
    CORRECT = 0x06
    CONFIRM = 0x07
    CLOSE_VOTER = 0x08
    FINALIZE = 0x09
    AUDIT_READ_DATA = 0x0A
    AUDIT_READ_CODE = 0x0B
    PING = 0x0C
    ACK = 0x40
    NAK = 0x41
    DATA = 0x42


COMMAND_OPCODES = frozenset(op for op in Opcode if op < Opcode.ACK)
RESPONSE_OPCODES = frozenset((Opcode.ACK, Opcode.NAK, Opcode.DATA))


class NakCode(IntEnum):
    """Status byte carried by a NAK response."""

    ERR_BAD_PHASE = 0x01
    ERR_NO_PENDING = 0x02
    ERR_ACC_FULL = 0x03
    ERR_WRITE_IN_AUDIT = 0x04
    ERR_SECTION_UNSET = 0x05


class FrameErrorCode(Enum):
    BAD_SOF = "BAD_SOF"
    BAD_LENGTH = "BAD_LENGTH"
    BAD_CRC = "BAD_CRC"
    UNKNOWN_OPCODE = "UNKNOWN_OPCODE"
    BAD_SCHEMA = "BAD_SCHEMA"
    PAYLOAD_TOO_LONG = "PAYLOAD_TOO_LONG"


class FrameError(Exception):
    """Decode (or encode) failure; .code names the first failed check."""

    def __init__(self, code: FrameErrorCode, detail: str = "") -> None:
        self.code = code
        super().__init__(f"{code.value}{': ' + detail if detail else ''}")


def _build_crc16_table() -> list[int]:
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021 if crc & 0x8000 else crc << 1) & 0xFFFF
        table.append(crc)
    return table


_CRC16_TABLE = _build_crc16_table()


def crc16_ccitt_false(data: bytes) -> int:
    crc = 0xFFFF
    for byte in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC16_TABLE[(crc >> 8) ^ byte]
    return crc


@dataclass(frozen=True)
class Command:
    """A decoded controller-to-device command."""

    op: Opcode
    contest: int | None = None
    candidate: CandidateNumber | None = None
    zone: int | None = None
    section: int | None = None

    # -- constructors -------------------------------------------------
    @classmethod
    def init(cls) -> Command:
        return cls(Opcode.INIT)

    @classmethod
    def zeresima(cls) -> Command:
        return cls(Opcode.ZERESIMA)

    @classmethod
    def section_info(cls, zone: int, section: int) -> Command:
        return cls(Opcode.SECTION_INFO, zone=zone, section=section)

    @classmethod
    def open_voter(cls) -> Command:
        return cls(Opcode.OPEN_VOTER)

    @classmethod
    def vote(cls, contest: int, candidate: CandidateNumber) -> Command:
        return cls(Opcode.VOTE, contest=contest, candidate=candidate)

    @classmethod
    def correct(cls, contest: int) -> Command:
        return cls(Opcode.CORRECT, contest=contest)

    @classmethod
    def confirm(cls, contest: int) -> Command:
        return cls(Opcode.CONFIRM, contest=contest)

    @classmethod
    def close_voter(cls) -> Command:
        return cls(Opcode.CLOSE_VOTER)

    @classmethod
    def finalize(cls) -> Command:
        return cls(Opcode.FINALIZE)

    @classmethod
    def audit_read_data(cls) -> Command:
        return cls(Opcode.AUDIT_READ_DATA)

    @classmethod
    def audit_read_code(cls) -> Command:
        return cls(Opcode.AUDIT_READ_CODE)

    @classmethod
    def ping(cls) -> Command:
        return cls(Opcode.PING)

    # -- wire payload -------------------------------------------------
    def payload(self) -> bytes:
        if self.op == Opcode.SECTION_INFO:
            return struct.pack(">HH", self.zone, self.section)
        if self.op == Opcode.VOTE:
            assert self.candidate is not None
            return struct.pack(">BI", self.contest, self.candidate.code)
        if self.op in (Opcode.CORRECT, Opcode.CONFIRM):
            return struct.pack(">B", self.contest)
        return b""

    def describe(self) -> str:
        if self.op == Opcode.SECTION_INFO:
            return f"SECTION_INFO zone={self.zone} section={self.section}"
        if self.op == Opcode.VOTE:
            return f"VOTE contest={self.contest} candidate={self.candidate}"
        if self.op in (Opcode.CORRECT, Opcode.CONFIRM):
            return f"{self.op.name} contest={self.contest}"
        return self.op.name


@dataclass(frozen=True)
class Response:
    """A device-to-controller response."""

    op: Opcode
    payload: bytes = b""

    @classmethod
    def ack(cls, payload: bytes = b"") -> Response:
        return cls(Opcode.ACK, payload)

    @classmethod
    def nak(cls, code: NakCode) -> Response:
        return cls(Opcode.NAK, bytes([code]))

    @classmethod
    def data(cls, payload: bytes) -> Response:
        return cls(Opcode.DATA, payload)

    @property
    def is_ack(self) -> bool:
        return self.op == Opcode.ACK

    @property
    def is_nak(self) -> bool:
        return self.op == Opcode.NAK

    @property
    def is_data(self) -> bool:
        return self.op == Opcode.DATA

    @property
    def nak_code(self) -> NakCode | None:
        if not self.is_nak:
            return None
        return NakCode(self.payload[0])

    def describe(self) -> str:
        if self.is_nak:
            return f"NAK {self.nak_code.name}"
        if self.is_data:
            return f"DATA {len(self.payload)}B"
        return "ACK"


# ---------------------------------------------------------------------------
# Framing
# ---------------------------------------------------------------------------

def frame(kind: int, payload: bytes) -> bytes:
    """Wrap one unit for the wire."""
    if len(payload) > MAX_PAYLOAD:
        raise FrameError(
            FrameErrorCode.PAYLOAD_TOO_LONG, f"{len(payload)} bytes"
        )
    body = bytes([kind]) + struct.pack(">H", len(payload)) + payload
    crc = crc16_ccitt_false(body)
    return bytes([STX]) + body + struct.pack(">H", crc) + bytes([ETX])


def unframe(data: bytes) -> tuple[int, bytes]:
    """Strip framing, verify structure and CRC; returns (kind, payload)."""
    if not data or data[0] != STX:
        raise FrameError(FrameErrorCode.BAD_SOF)
    if len(data) < FRAME_OVERHEAD:
        raise FrameError(FrameErrorCode.BAD_LENGTH, "frame too short")
    declared = struct.unpack(">H", data[2:4])[0]
    if len(data) != FRAME_OVERHEAD + declared:
        raise FrameError(
            FrameErrorCode.BAD_LENGTH,
            f"declared {declared}, frame holds {len(data) - FRAME_OVERHEAD}",
        )
    if data[-1] != ETX:
        raise FrameError(FrameErrorCode.BAD_LENGTH, "missing end of frame")
    body = data[1:4 + declared]
    received = struct.unpack(">H", data[-3:-1])[0]
    if crc16_ccitt_false(body) != received:
        raise FrameError(FrameErrorCode.BAD_CRC)
    return data[1], data[4:4 + declared]


_FIXED_LENGTHS = {
    Opcode.INIT: 0,
    Opcode.ZERESIMA: 0,
    Opcode.SECTION_INFO: 4,
    Opcode.OPEN_VOTER: 0,
    Opcode.VOTE: 5,
    Opcode.CORRECT: 1,
    Opcode.CONFIRM: 1,
    Opcode.CLOSE_VOTER: 0,
    Opcode.FINALIZE: 0,
    Opcode.AUDIT_READ_DATA: 0,
    Opcode.AUDIT_READ_CODE: 0,
    Opcode.PING: 0,
}


def encode_frame(command: Command) -> bytes:
    """Serialize a command into its wire frame."""
    return frame(command.op, command.payload())


def decode_frame(data: bytes) -> Command:
    """Parse a command frame; raises FrameError naming the failed check."""
    kind, payload = unframe(data)
    if kind not in _FIXED_LENGTHS:
        raise FrameError(FrameErrorCode.UNKNOWN_OPCODE, f"0x{kind:02X}")
    op = Opcode(kind)
    if len(payload) != _FIXED_LENGTHS[op]:
        raise FrameError(
            FrameErrorCode.BAD_SCHEMA,
            f"{op.name} payload must be {_FIXED_LENGTHS[op]} bytes",
        )

    if op == Opcode.SECTION_INFO:
        zone, section = struct.unpack(">HH", payload)
        if zone == 0 or section == 0:
            raise FrameError(FrameErrorCode.BAD_SCHEMA, "zone/section zero")
        return Command.section_info(zone, section)
    if op == Opcode.VOTE:
        contest, code = struct.unpack(">BI", payload)
        if contest == 0:
            raise FrameError(FrameErrorCode.BAD_SCHEMA, "contest zero")
        if code > MAX_CANDIDATE and code not in (BLANK_CODE, NULL_CODE):
            raise FrameError(
                FrameErrorCode.BAD_SCHEMA, f"candidate code {code}"
            )
        return Command.vote(contest, CandidateNumber(code))
    if op in (Opcode.CORRECT, Opcode.CONFIRM):
        contest = payload[0]
        if contest == 0:
            raise FrameError(FrameErrorCode.BAD_SCHEMA, "contest zero")
        return Command(op, contest=contest)
    return Command(op)


def encode_response(response: Response) -> bytes:
    """Serialize a response into its wire frame."""
    return frame(response.op, response.payload)


def decode_response(data: bytes) -> Response:
    """Parse a response frame; raises FrameError on any malformation."""
    kind, payload = unframe(data)
    if kind not in (Opcode.ACK, Opcode.NAK, Opcode.DATA):
        raise FrameError(FrameErrorCode.UNKNOWN_OPCODE, f"0x{kind:02X}")
    op = Opcode(kind)
    if op == Opcode.NAK:
        if len(payload) != 1:
            raise FrameError(FrameErrorCode.BAD_SCHEMA, "NAK needs 1 byte")
        try:
            NakCode(payload[0])
        except ValueError:
            raise FrameError(
                FrameErrorCode.BAD_SCHEMA, f"NAK code 0x{payload[0]:02X}"
            ) from None
    return Response(op, payload)
