"""Post-election verification of one section's artifact set.

Five checks run in order:

1. seal          physical seal evidence intact
2. code          firmware CRC against the published value, and the
                 zero-state fingerprint: published constant vs the value
                 the poll workers annotated vs a recomputation from the
                 firmware readout
3. export        the memory export is present, structurally sound and
                 passes its image CRC
4. final-digest  the final fingerprint recomputed from the extracted
                 records alone matches the annotated value
5. tally         extracted counters against the boletim de urna, line
                 by line

Every check appears in the report with a pass/fail/skipped verdict. The
overall verdict is the most severe failure; severity ranks UNREADABLE
above SEAL_VIOLATION, CODE_MISMATCH, DIGEST_MISMATCH, TALLY_MISMATCH and
NOT_AUDITABLE, with OK last. A section whose device never reached the
audit phase is NOT_AUDITABLE, never OK. We classify; the follow-up on a
violated seal or a diverging count is a legal matter, not a software one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .artifacts import AtaRecord, BoletimUrna
from .canonical import final_digest, zeresima_digest
from .device import ExportError, MemoryExport
from .types import CodeImage, Digest160, candidate_label


class Verdict(Enum):
    OK = "OK"
    SEAL_VIOLATION = "SEAL_VIOLATION"
    CODE_MISMATCH = "CODE_MISMATCH"
    DIGEST_MISMATCH = "DIGEST_MISMATCH"
    TALLY_MISMATCH = "TALLY_MISMATCH"
    UNREADABLE = "UNREADABLE"
    NOT_AUDITABLE = "NOT_AUDITABLE"


# Most severe first; OK must stay last.
SEVERITY = [
    Verdict.UNREADABLE,
    Verdict.SEAL_VIOLATION,
    Verdict.CODE_MISMATCH,
    Verdict.DIGEST_MISMATCH,
    Verdict.TALLY_MISMATCH,
    Verdict.NOT_AUDITABLE,
    Verdict.OK,
]

# CLI exit status per verdict (0 only for OK).
EXIT_CODES = {
    Verdict.OK: 0,
    Verdict.UNREADABLE: 2,
    Verdict.SEAL_VIOLATION: 3,
    Verdict.CODE_MISMATCH: 4,
    Verdict.DIGEST_MISMATCH: 5,
    Verdict.TALLY_MISMATCH: 6,
    Verdict.NOT_AUDITABLE: 7,
}


@dataclass(frozen=True)
class Finding:
    check: str
    verdict: str          # "pass" | "fail" | "skipped"
    detail: str

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"


@dataclass(frozen=True)
class Discrepancy:
    contest: int
    candidate_code: int
    sela_count: int
    bu_count: int

    def __str__(self) -> str:
        return (
            f"contest {self.contest} candidate "
            f"{candidate_label(self.candidate_code)}: "
            f"sela={self.sela_count} bu={self.bu_count}"
        )


@dataclass(frozen=True)
class AuditReport:
    findings: tuple[Finding, ...]
    overall: Verdict

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.overall]

    def render_text(self) -> str:
        lines = ["AUDIT REPORT"]
        for finding in self.findings:
            lines.append(
                f"  [{finding.verdict.upper():7s}] {finding.check}: "
                f"{finding.detail}"
            )
        lines.append(f"OVERALL: {self.overall.value}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "overall": self.overall.value,
            "exit_code": self.exit_code,
            "findings": [
                {"check": f.check, "verdict": f.verdict, "detail": f.detail}
                for f in self.findings
            ],
        }
        return json.dumps(payload, indent=2) + "\n"


def verify_published_zero(code: CodeImage) -> Digest160:
    """Recompute the zero-state constant for a firmware image.

    Anyone can run this against the open firmware to reproduce the
    nationally published value.
    """
    return zeresima_digest(code)


def compare_tallies(
    sela: dict[tuple[int, int], int], bu: dict[tuple[int, int], int]
) -> list[Discrepancy]:
    """Symmetric difference of two count mappings; empty iff they agree."""
    discrepancies = []
    for key in sorted(set(sela) | set(bu)):
        left, right = sela.get(key, 0), bu.get(key, 0)
        if left != right:
            discrepancies.append(Discrepancy(key[0], key[1], left, right))
    return discrepancies


def audit_section(
    export_image: bytes | None,
    code: CodeImage | None,
    published_zero: Digest160,
    published_code_crc: int,
    ata: AtaRecord,
    bu: BoletimUrna,
    seal_intact: bool = True,
) -> AuditReport:
    """Run the full checklist over one section's artifacts."""
    findings: list[Finding] = []
    failures: list[Verdict] = []

    def record(check: str, ok: bool, detail: str, on_fail: Verdict) -> bool:
        findings.append(Finding(check, "pass" if ok else "fail", detail))
        if not ok:
            failures.append(on_fail)
        return ok

    def skip(check: str, detail: str) -> None:
        findings.append(Finding(check, "skipped", detail))

    # 1. seal evidence
    record(
        "seal", seal_intact,
        "seal evidence intact" if seal_intact else "seal evidence violated",
        Verdict.SEAL_VIOLATION,
    )

    # 2. code: CRC and zero-state fingerprint
    problems: list[str] = []
    if ata.zeresima_hex is None:
        record(
            "zeresima", False,
            "no zero-state fingerprint annotated in the ata",
            Verdict.NOT_AUDITABLE,
        )
    else:
        if ata.zeresima_hex != published_zero.hex:
            problems.append(
                f"annotated {ata.zeresima_hex} != published {published_zero.hex}"
            )
        if code is not None:
            recomputed = verify_published_zero(code)
            if code.crc32 != published_code_crc:
                problems.append(
                    f"code CRC {code.crc32:08x} != published "
                    f"{published_code_crc:08x}"
                )
            if recomputed.hex != published_zero.hex:
                problems.append(
                    f"recomputed {recomputed.hex} != published {published_zero.hex}"
                )
        record(
            "zeresima", not problems,
            "; ".join(problems) if problems else
            "zero-state fingerprint and code CRC match the published values",
            Verdict.CODE_MISMATCH,
        )

    # 3. export readable
    export: MemoryExport | None = None
    if export_image is None:
        record(
            "export", False,
            "no memory export: the device never reached the audit phase",
            Verdict.NOT_AUDITABLE,
        )
    else:
        try:
            export = MemoryExport.decode(export_image)
        except ExportError as exc:
            record("export", False, f"unreadable export: {exc}", Verdict.UNREADABLE)
        else:
            record(
                "export", True,
                f"export readable, image CRC ok, {len(export.records)} records",
                Verdict.UNREADABLE,
            )

    # 4. final fingerprint recomputed from the extracted records
    if export is None:
        skip("final-digest", "no readable export to recompute from")
    elif ata.final_hex is None:
        record(
            "final-digest", False,
            "no final fingerprint annotated in the ata",
            Verdict.NOT_AUDITABLE,
        )
    else:
        recomputed = final_digest((export.zone, export.section), export.records)
        record(
            "final-digest", recomputed.hex == ata.final_hex,
            f"recomputed {recomputed.hex}, annotated {ata.final_hex}",
            Verdict.DIGEST_MISMATCH,
        )

    # 5. extracted counters against the boletim de urna
    if export is None:
        skip("tally", "no readable export to compare")
    else:
        discrepancies = compare_tallies(export.entries(), bu.tallies)
        record(
            "tally", not discrepancies,
            "; ".join(str(d) for d in discrepancies)
            if discrepancies else "extracted counters match the boletim de urna",
            Verdict.TALLY_MISMATCH,
        )

    overall = Verdict.OK
    for verdict in SEVERITY:
        if verdict in failures:
            overall = verdict
            break
    return AuditReport(findings=tuple(findings), overall=overall)
