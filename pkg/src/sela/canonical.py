"""Canonical byte serializations that every fingerprint is computed over.

Two byte formats are normative and must never change silently:

Zero-state commitment input::

    "SELA-ZERO-V1\\n" || code bytes || "\\n" || data region (DATA_SIZE bytes)

The published zero-state constant for a code image hashes this with an
all-zero data region, so it depends on the firmware alone and is the same
for every device and every section.

Canonical tally text (ASCII, LF line endings)::

    SELA-TALLY-V1
    SECTION=<zone>:<section>          decimal, no leading zeros
    <contest>;<candidate>;<count>     one line per entry
    END

Entry lines sort by contest, then by candidate code (numbers ascending,
BRANCO, then NULO). The text is a pure function of the entry multiset, so
anyone holding the extracted records can recompute the final fingerprint
by hand, with no knowledge of the device's internal memory layout.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .integrity import sha1_digest
from .types import CodeImage, Digest160, SectionInfo, candidate_label

DATA_SIZE = 65_536

ZERO_PREFIX = b"SELA-ZERO-V1\n"
TALLY_MAGIC = "SELA-TALLY-V1"

_CLEAR_REGION = bytes(DATA_SIZE)

# (contest, candidate code) -> count; iterables of (contest, code, count)
# rows are accepted anywhere a TallyEntries is.
TallyEntries = Mapping[tuple[int, int], int]
TallyRows = Iterable[tuple[int, int, int]]


class SectionUnsetError(ValueError):
    """Raised when a tally serialization is requested with no section."""


def _as_entry_map(entries: TallyEntries | TallyRows) -> dict[tuple[int, int], int]:
    if isinstance(entries, Mapping):
        return dict(entries)
    merged: dict[tuple[int, int], int] = {}
    for contest, code, count in entries:
        key = (contest, code)
        merged[key] = merged.get(key, 0) + count
    return merged


def canonical_tally_bytes(
    section: SectionInfo | tuple[int, int] | None,
    entries: TallyEntries | TallyRows,
) -> bytes:
    """Serialize a tally to its canonical, order-free text form."""
    if section is None:
        raise SectionUnsetError("section information was never recorded")
    if isinstance(section, SectionInfo):
        zone, sect = section.zone, section.section
    else:
        zone, sect = section

    lines = [TALLY_MAGIC, f"SECTION={zone}:{sect}"]
    merged = _as_entry_map(entries)
    for (contest, code), count in sorted(merged.items()):
        lines.append(f"{contest};{candidate_label(code)};{count}")
    lines.append("END")
    return ("\n".join(lines) + "\n").encode("ascii")


def zeresima_digest_over(code: CodeImage, data_region: bytes) -> Digest160:
    """Zero-state fingerprint over an explicit data region snapshot.

    The device computes this over its live memory, which is what makes a
    pre-loaded data region show up as a mismatch against the published
    constant.
    """
    if len(data_region) != DATA_SIZE:
        raise ValueError(f"data region must be {DATA_SIZE} bytes")
    return sha1_digest(ZERO_PREFIX + code.data + b"\n" + data_region)


def zeresima_digest(code: CodeImage) -> Digest160:
    """The published zero-state constant for a code image."""
    return zeresima_digest_over(code, _CLEAR_REGION)


def final_digest(
    section: SectionInfo | tuple[int, int] | None,
    entries: TallyEntries | TallyRows,
) -> Digest160:
    """Fingerprint of the canonical tally text."""
    return sha1_digest(canonical_tally_bytes(section, entries))


def render_digest_pages(digest: Digest160) -> list[str]:
    """Split a fingerprint into the ten 4-hex-digit visor pages."""
    text = digest.hex
    return [f"{i + 1}:{text[i * 4:i * 4 + 4]}" for i in range(10)]
