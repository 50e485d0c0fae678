"""Ballot-audit companion device simulator.

A deterministic model of the auditor box that rides alongside an
electronic voting machine: it mirrors every confirmed vote into
order-free counters, commits to its firmware and cleared memory before
the first vote, commits to the final tally afterwards, and exposes a
read-only extraction mode so third parties can recompute both
fingerprints from the artifacts alone.
"""

from .accumulator import CAP, MAX_ENTRIES, Accumulator, AccumulatorFull
from .artifacts import ArtifactParseError, AtaRecord, BoletimUrna
from .audit import (
    AuditReport,
    Discrepancy,
    Finding,
    Verdict,
    audit_section,
    compare_tallies,
    verify_published_zero,
)
from .canonical import (
    DATA_SIZE,
    SectionUnsetError,
    canonical_tally_bytes,
    final_digest,
    render_digest_pages,
    zeresima_digest,
    zeresima_digest_over,
)
from .device import (
    DevicePhase,
    ExportError,
    MemoryExport,
    SelaDevice,
)
from .faults import (
    Disconnect,
    FlipBit,
    PreloadMem,
    TamperCode,
    flip_bit_in_export,
)
from .integrity import crc32_of, sha1_digest
from .protocol import (
    Command,
    FrameError,
    FrameErrorCode,
    NakCode,
    Opcode,
    Response,
    crc16_ccitt_false,
    decode_frame,
    decode_response,
    encode_frame,
    encode_response,
)
from .scripts import ScenarioScript, ScriptError, load_script, parse_script
from .simulator import (
    RunResult,
    ScenarioAbort,
    SerialLink,
    Transcript,
    run_scenario,
)
from .types import (
    BLANK,
    NULL,
    CandidateNumber,
    CodeImage,
    Digest160,
    SectionInfo,
    reference_code,
)

__version__ = "0.1.0"
