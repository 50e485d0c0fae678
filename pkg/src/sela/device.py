"""The audit device proper: lifecycle state machine and memory export.

Lifecycle: POWERED -> (INIT) READY -> (ZERESIMA) ZERESIMA_SHOWN ->
(SECTION_INFO) SESSION_OPEN <-> (OPEN_VOTER/CLOSE_VOTER) VOTER_OPEN ->
(FINALIZE) FINALIZED_AUDIT. In FINALIZED_AUDIT the device is read only:
every mutating command is refused and only the two audit reads, which
return the data memory image and the code image, are served.

A selection is pending from the moment a VOTE names it until it is
either confirmed (counted), corrected (erased), or the voter is closed
(discarded). Closing a voter never counts anything.

Memory export image (DATA_SIZE bytes, then a 4-byte CRC)::

    "SELADATA" | version(1)=0x01 | phase(1) | zone(2 BE) | section(2 BE)
    | record_count(2 BE) | records in physical slot order | zero padding

Each record is contest(1) | candidate(4 BE) | count(4 BE). The CRC-32 is
computed over the whole DATA_SIZE image. On the wire the zero padding is
elided (header, records and CRC only) because a frame payload is capped
at 65535 bytes; padding is reinstated on receipt before the CRC check,
so the artifact on disk is always the full image.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from .accumulator import Accumulator, AccumulatorFull
from .canonical import (
    DATA_SIZE,
    final_digest,
    render_digest_pages,
    zeresima_digest_over,
)
from .integrity import crc32_of
from .protocol import Command, NakCode, Opcode, Response
from .types import CandidateNumber, CodeImage, Digest160, SectionInfo

EXPORT_MAGIC = b"SELADATA"
EXPORT_VERSION = 0x01
HEADER_SIZE = 16
RECORD_SIZE = 9
EXPORT_IMAGE_SIZE = DATA_SIZE + 4


class DevicePhase(IntEnum):
    POWERED = 0
    READY = 1
    ZERESIMA_SHOWN = 2
    SESSION_OPEN = 3
    VOTER_OPEN = 4
    FINALIZED_AUDIT = 5


class ExportError(ValueError):
    """The bytes do not decode as a well-formed memory export."""


@dataclass(frozen=True)
class MemoryExport:
    """Decoded form of the device's exported data memory."""

    phase: int
    zone: int
    section: int
    records: tuple[tuple[int, int, int], ...]

    def entries(self) -> dict[tuple[int, int], int]:
        merged: dict[tuple[int, int], int] = {}
        for contest, code, count in self.records:
            key = (contest, code)
            merged[key] = merged.get(key, 0) + count
        return merged

    def _image(self) -> bytes:
        header = EXPORT_MAGIC + struct.pack(
            ">BBHHH", EXPORT_VERSION, self.phase, self.zone, self.section,
            len(self.records),
        )
        body = b"".join(
            struct.pack(">BII", contest, code, count)
            for contest, code, count in self.records
        )
        image = header + body
        return image + bytes(DATA_SIZE - len(image))

    def encode(self) -> bytes:
        """Full artifact: DATA_SIZE image plus trailing CRC-32."""
        image = self._image()
        return image + struct.pack(">I", crc32_of(image))

    def wire_payload(self) -> bytes:
        """Padding-free form carried in a DATA response."""
        image = self._image()
        used = HEADER_SIZE + len(self.records) * RECORD_SIZE
        return image[:used] + struct.pack(">I", crc32_of(image))

    @classmethod
    def _parse(cls, image: bytes, crc: int) -> MemoryExport:
        if crc32_of(image) != crc:
            raise ExportError("image CRC mismatch")
        version, phase, zone, section, count = struct.unpack(
            ">BBHHH", image[8:HEADER_SIZE]
        )
        if version != EXPORT_VERSION:
            raise ExportError(f"unsupported export version {version}")
        end = HEADER_SIZE + count * RECORD_SIZE
        if end > DATA_SIZE:
            raise ExportError(f"record count {count} exceeds the data region")
        records = tuple(
            struct.unpack(">BII", image[off:off + RECORD_SIZE])
            for off in range(HEADER_SIZE, end, RECORD_SIZE)
        )
        return cls(phase=phase, zone=zone, section=section, records=records)

    @classmethod
    def decode(cls, data: bytes) -> MemoryExport:
        """Parse a full artifact. Structural checks only: record fields are
        taken as found, so content tampering surfaces later as a digest or
        tally mismatch rather than as an unreadable image."""
        if len(data) != EXPORT_IMAGE_SIZE:
            raise ExportError(
                f"artifact must be {EXPORT_IMAGE_SIZE} bytes, got {len(data)}"
            )
        if data[:8] != EXPORT_MAGIC:
            raise ExportError("bad magic")
        return cls._parse(data[:DATA_SIZE], struct.unpack(">I", data[DATA_SIZE:])[0])

    @classmethod
    def from_wire(cls, payload: bytes) -> MemoryExport:
        """Parse a DATA response payload (padding elided on the wire)."""
        if len(payload) < HEADER_SIZE + 4 or payload[:8] != EXPORT_MAGIC:
            raise ExportError("bad export payload")
        body, crc = payload[:-4], struct.unpack(">I", payload[-4:])[0]
        if (len(body) - HEADER_SIZE) % RECORD_SIZE:
            raise ExportError("truncated record region")
        image = body + bytes(DATA_SIZE - len(body))
        export = cls._parse(image, crc)
        if len(export.records) != (len(body) - HEADER_SIZE) // RECORD_SIZE:
            raise ExportError("record count disagrees with payload size")
        return export


class SelaDevice:
    """One audit device instance. Single owner, strictly sequential."""

    def __init__(self, code: CodeImage) -> None:
        self.code = code
        self.phase = DevicePhase.POWERED
        self.section: SectionInfo | None = None
        self.pending: dict[int, CandidateNumber] = {}
        self.accumulator = Accumulator()
        self.seal_intact = True
        self._visor = ""
        self._digest: Digest160 | None = None
        self._page = 0

    # -- introspection (what a human at the device can see) -----------
    @property
    def visor(self) -> str:
        """Current visor content: candidate, digest page, or blank."""
        return self._visor

    @property
    def displayed_digest(self) -> Digest160 | None:
        return self._digest

    @property
    def digest_pages(self) -> list[str]:
        if self._digest is None:
            return []
        return render_digest_pages(self._digest)

    def advance_digest_page(self) -> str:
        """Step the visor to the next digest page (a local button, not a
        link command)."""
        pages = self.digest_pages
        if not pages:
            return self._visor
        self._page = (self._page + 1) % len(pages)
        self._visor = pages[self._page]
        return self._visor

    # -- memory ---------------------------------------------------------
    def data_region(self) -> bytes:
        """Live data memory: records in slot order, zero padded."""
        body = b"".join(
            struct.pack(">BII", contest, code, count)
            for contest, code, count in self.accumulator.records()
        )
        return body + bytes(DATA_SIZE - len(body))

    def memory_export(self) -> MemoryExport:
        if self.phase != DevicePhase.FINALIZED_AUDIT:
            raise RuntimeError("export is only served in the audit phase")
        assert self.section is not None
        return MemoryExport(
            phase=int(self.phase),
            zone=self.section.zone,
            section=self.section.section,
            records=tuple(self.accumulator.records()),
        )

    # -- tamper hooks (simulation only; nothing on the link does this) --
    def tamper_code(self, offset: int = 0, mask: int = 0xFF) -> None:
        self.code = self.code.with_flipped_byte(offset, mask)

    def preload_memory(
        self, contest: int, candidate: CandidateNumber, count: int
    ) -> None:
        self.accumulator.preload(contest, candidate, count)

    # -- the state machine ----------------------------------------------
    def step(self, command: Command) -> Response:
        """Apply one command; returns exactly one response."""
        op = command.op
        if op == Opcode.PING:
            return Response.ack()

        if self.phase == DevicePhase.FINALIZED_AUDIT:
            if op == Opcode.AUDIT_READ_DATA:
                return Response.data(self.memory_export().wire_payload())
            if op == Opcode.AUDIT_READ_CODE:
                return Response.data(
                    self.code.data + struct.pack(">I", self.code.crc32)
                )
            return Response.nak(NakCode.ERR_WRITE_IN_AUDIT)

        if op == Opcode.INIT:
            self.accumulator.clear()
            self.pending.clear()
            self.section = None
            self._visor = ""
            self._digest = None
            self._page = 0
            self.phase = DevicePhase.READY
            return Response.ack()

        if op == Opcode.ZERESIMA:
            if self.phase != DevicePhase.READY:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            self._show_digest(zeresima_digest_over(self.code, self.data_region()))
            self.phase = DevicePhase.ZERESIMA_SHOWN
            return Response.ack()

        if op == Opcode.SECTION_INFO:
            if self.phase != DevicePhase.ZERESIMA_SHOWN:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            self.section = SectionInfo(command.zone, command.section)
            self._clear_visor()
            self.phase = DevicePhase.SESSION_OPEN
            return Response.ack()

        if op == Opcode.OPEN_VOTER:
            if self.phase != DevicePhase.SESSION_OPEN:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            self.pending.clear()
            self._clear_visor()
            self.phase = DevicePhase.VOTER_OPEN
            return Response.ack()

        if op == Opcode.VOTE:
            if self.phase != DevicePhase.VOTER_OPEN:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            self.pending[command.contest] = command.candidate
            self._visor = command.candidate.visor_text
            return Response.ack()

        if op == Opcode.CORRECT:
            if self.phase != DevicePhase.VOTER_OPEN:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            if command.contest not in self.pending:
                return Response.nak(NakCode.ERR_NO_PENDING)
            del self.pending[command.contest]
            self._visor = ""
            return Response.ack()

        if op == Opcode.CONFIRM:
            if self.phase != DevicePhase.VOTER_OPEN:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            candidate = self.pending.get(command.contest)
            if candidate is None:
                return Response.nak(NakCode.ERR_NO_PENDING)
            try:
                self.accumulator.increment(command.contest, candidate)
            except AccumulatorFull:
                return Response.nak(NakCode.ERR_ACC_FULL)
            del self.pending[command.contest]
            self._visor = ""
            return Response.ack()

        if op == Opcode.CLOSE_VOTER:
            if self.phase != DevicePhase.VOTER_OPEN:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            self.pending.clear()
            self._clear_visor()
            self.phase = DevicePhase.SESSION_OPEN
            return Response.ack()

        if op == Opcode.FINALIZE:
            if self.phase != DevicePhase.SESSION_OPEN:
                return Response.nak(NakCode.ERR_BAD_PHASE)
            if self.section is None:
                return Response.nak(NakCode.ERR_SECTION_UNSET)
            self._show_digest(
                final_digest(self.section, self.accumulator.records())
            )
            self.phase = DevicePhase.FINALIZED_AUDIT
            return Response.ack()

        # AUDIT_READ_* outside the audit phase
        return Response.nak(NakCode.ERR_BAD_PHASE)

    def _show_digest(self, digest: Digest160) -> None:
        self._digest = digest
        self._page = 0
        self._visor = render_digest_pages(digest)[0]

    def _clear_visor(self) -> None:
        self._visor = ""
        self._digest = None
        self._page = 0
