"""Section artifacts produced on election day.

Boletim de urna (.bu), the voting machine's own result sheet::

    BU-V1
    SECTION=<zone>:<section>
    <contest>;<candidate>;<count>      sorted like the canonical tally
    END

Ata (.ata), the section minutes where the poll workers write down the
fingerprints shown on the visor::

    ATA-V1
    SECTION=<zone>:<section>
    ZERESIMA=<40 hex>         when annotated
    FINAL=<40 hex>            when annotated
    SIGNER=<name>             zero or more
    ALARM=<step index>        when the machine alarmed
    NOTE=<free text>          zero or more

Both parse strictly; a malformed file is a parse error, which audit
reports differently from an unreadable memory export.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .types import BLANK_CODE, BLANK_LABEL, NULL_CODE, NULL_LABEL, candidate_label

_HEX40 = re.compile(r"^[0-9a-f]{40}$")
_SECTION = re.compile(r"^SECTION=(\d+):(\d+)$")


class ArtifactParseError(ValueError):
    pass


def _parse_candidate_token(token: str) -> int:
    if token == BLANK_LABEL:
        return BLANK_CODE
    if token == NULL_LABEL:
        return NULL_CODE
    if not token.isdigit():
        raise ArtifactParseError(f"bad candidate token: {token!r}")
    return int(token)


def _parse_section_line(line: str, where: str) -> tuple[int, int]:
    match = _SECTION.match(line)
    if not match:
        raise ArtifactParseError(f"{where}: bad section line: {line!r}")
    return int(match.group(1)), int(match.group(2))


@dataclass(frozen=True)
class BoletimUrna:
    """The voting machine's independent per-section tally."""

    zone: int
    section: int
    tallies: dict[tuple[int, int], int]

    def render(self) -> str:
        lines = ["BU-V1", f"SECTION={self.zone}:{self.section}"]
        for (contest, code), count in sorted(self.tallies.items()):
            lines.append(f"{contest};{candidate_label(code)};{count}")
        lines.append("END")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> BoletimUrna:
        lines = text.splitlines()
        if not lines or lines[0] != "BU-V1":
            raise ArtifactParseError("bu: missing BU-V1 header")
        if len(lines) < 3:
            raise ArtifactParseError("bu: truncated")
        zone, section = _parse_section_line(lines[1], "bu")
        if lines[-1] != "END":
            raise ArtifactParseError("bu: missing END line")
        tallies: dict[tuple[int, int], int] = {}
        for line in lines[2:-1]:
            parts = line.split(";")
            if len(parts) != 3:
                raise ArtifactParseError(f"bu: bad tally line: {line!r}")
            contest_s, candidate_s, count_s = parts
            if not contest_s.isdigit() or not count_s.isdigit():
                raise ArtifactParseError(f"bu: bad tally line: {line!r}")
            key = (int(contest_s), _parse_candidate_token(candidate_s))
            if key in tallies:
                raise ArtifactParseError(f"bu: duplicate entry: {line!r}")
            tallies[key] = int(count_s)
        return cls(zone=zone, section=section, tallies=tallies)


@dataclass
class AtaRecord:
    """The section minutes: fingerprints, signatures, incidents."""

    zone: int
    section: int
    zeresima_hex: str | None = None
    final_hex: str | None = None
    signers: list[str] = field(default_factory=list)
    alarm_step: int | None = None
    notes: list[str] = field(default_factory=list)

    def render(self) -> str:
        lines = ["ATA-V1", f"SECTION={self.zone}:{self.section}"]
        if self.zeresima_hex is not None:
            lines.append(f"ZERESIMA={self.zeresima_hex}")
        if self.final_hex is not None:
            lines.append(f"FINAL={self.final_hex}")
        lines.extend(f"SIGNER={name}" for name in self.signers)
        if self.alarm_step is not None:
            lines.append(f"ALARM={self.alarm_step}")
        lines.extend(f"NOTE={note}" for note in self.notes)
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> AtaRecord:
        lines = text.splitlines()
        if not lines or lines[0] != "ATA-V1":
            raise ArtifactParseError("ata: missing ATA-V1 header")
        if len(lines) < 2:
            raise ArtifactParseError("ata: truncated")
        zone, section = _parse_section_line(lines[1], "ata")
        record = cls(zone=zone, section=section)
        for line in lines[2:]:
            key, _, value = line.partition("=")
            if key in ("ZERESIMA", "FINAL"):
                if not _HEX40.match(value):
                    raise ArtifactParseError(f"ata: bad digest line: {line!r}")
                if key == "ZERESIMA":
                    record.zeresima_hex = value
                else:
                    record.final_hex = value
            elif key == "SIGNER":
                record.signers.append(value)
            elif key == "ALARM":
                if not value.isdigit():
                    raise ArtifactParseError(f"ata: bad alarm line: {line!r}")
                record.alarm_step = int(value)
            elif key == "NOTE":
                record.notes.append(value)
            else:
                raise ArtifactParseError(f"ata: unknown line: {line!r}")
        return record


def load_bu(path: str | Path) -> BoletimUrna:
    return BoletimUrna.parse(Path(path).read_text(encoding="utf-8"))


def load_ata(path: str | Path) -> AtaRecord:
    return AtaRecord.parse(Path(path).read_text(encoding="utf-8"))
