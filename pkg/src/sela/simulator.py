"""Voting-machine-side driver: runs a scenario against one device.

The runner plays the controller role over the byte link, executing the
election-day sequence: self test, memory init, zero-state fingerprint
(written to the ata), section info, one open/close cycle per voter,
finalization (final fingerprint to the ata) and the audit readout.

The controller keeps its own shadow tally from the key presses it
forwards; that independent count becomes the boletim de urna, so the
later device-versus-bu comparison checks two genuinely separate counts.

A dead link is noticed at the next send: one alarm is raised, recorded
in the transcript and the ata, and the section stops being auditable
(no device finalization, no export). The run itself continues, because
the voting machine keeps collecting votes with or without the auditor
box attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .artifacts import AtaRecord, BoletimUrna
from .device import MemoryExport, SelaDevice
from .faults import (
    Disconnect,
    Fault,
    FlipBit,
    PreloadMem,
    TamperCode,
    describe_fault,
    flip_bit_in_export,
)
from .protocol import (
    Command,
    Response,
    decode_frame,
    decode_response,
    encode_frame,
    encode_response,
)
from .scripts import (
    Confirm,
    Correct,
    Finalize,
    InjectFault,
    ScenarioScript,
    Section,
    Vote,
    VoterBlock,
)
from .types import CandidateNumber, CodeImage

ALARM_NOTE = "link to audit device lost; section cannot be audited"


class ScenarioAbort(RuntimeError):
    """The device refused a command the script expected to succeed."""

    def __init__(self, step: int, command: Command, response: Response) -> None:
        self.step = step
        self.command = command
        self.response = response
        super().__init__(
            f"step {step}: {command.describe()} -> {response.describe()}"
        )


class SerialLink:
    """Byte link between controller and device.

    Every send round-trips through the real codec so the framing layer
    is exercised on every command. A disconnected link swallows sends.
    """

    def __init__(self, device: SelaDevice) -> None:
        self.device = device
        self.connected = True

    def disconnect(self) -> None:
        self.connected = False

    def send(self, command: Command) -> Response | None:
        if not self.connected:
            return None
        wire = encode_frame(command)
        response = self.device.step(decode_frame(wire))
        return decode_response(encode_response(response))


@dataclass(frozen=True)
class TranscriptStep:
    index: int
    command: str
    response: str
    visor: str


@dataclass
class Transcript:
    """Ordered log of one run: commands, responses, visor, incidents."""

    steps: list[TranscriptStep] = field(default_factory=list)
    alarms: list[tuple[int, str]] = field(default_factory=list)
    injected: list[tuple[int, str]] = field(default_factory=list)

    def render(self) -> str:
        lines = ["SELA-TRANSCRIPT-V1"]
        injected = dict(self.injected)
        alarms = dict(self.alarms)
        for step in self.steps:
            if step.index in injected:
                lines.append(f"# fault injected: {injected[step.index]}")
            lines.append(
                f"{step.index:04d} {step.command} -> {step.response}"
                f" visor={step.visor!r}"
            )
            if step.index in alarms:
                lines.append(f"ALARM step={step.index} {alarms[step.index]}")
        lines.append("END")
        return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    transcript: Transcript
    bu: BoletimUrna | None
    ata: AtaRecord
    export_image: bytes | None
    code_readout: bytes | None
    device: SelaDevice

    def export(self) -> MemoryExport | None:
        if self.export_image is None:
            return None
        return MemoryExport.decode(self.export_image)


class _Controller:
    """Run state: link, shadow tally, transcript, ata draft."""

    def __init__(self, device: SelaDevice) -> None:
        self.link = SerialLink(device)
        self.device = device
        self.transcript = Transcript()
        self.step_index = 0
        self.alarmed = False
        self.shadow: dict[tuple[int, int], int] = {}
        self.pending: dict[int, CandidateNumber] = {}
        self.section: tuple[int, int] | None = None
        self.zeresima_hex: str | None = None
        self.final_hex: str | None = None
        self.alarm_step: int | None = None
        self.export: MemoryExport | None = None
        self.code_readout: bytes | None = None

    def send(self, command: Command) -> Response | None:
        self.step_index += 1
        response = self.link.send(command)
        self.transcript.steps.append(TranscriptStep(
            index=self.step_index,
            command=command.describe(),
            response=response.describe() if response else "NO RESPONSE",
            visor=self.device.visor,
        ))
        if response is None:
            if not self.alarmed:
                self.alarmed = True
                self.alarm_step = self.step_index
                self.transcript.alarms.append(
                    (self.step_index, "no response from audit device")
                )
            return None
        if response.is_nak:
            raise ScenarioAbort(self.step_index, command, response)
        return response

    def inject(self, fault: Fault, flips: list[FlipBit]) -> None:
        self.transcript.injected.append(
            (self.step_index + 1, describe_fault(fault))
        )
        if isinstance(fault, Disconnect):
            self.link.disconnect()
        elif isinstance(fault, TamperCode):
            self.device.tamper_code(fault.offset)
        elif isinstance(fault, PreloadMem):
            self.device.preload_memory(fault.contest, fault.candidate, fault.count)
        elif isinstance(fault, FlipBit):
            flips.append(fault)


def run_scenario(script: ScenarioScript, code: CodeImage) -> RunResult:
    """Execute one scenario end to end and collect every artifact."""
    if not any(isinstance(item, Section) for item in script.items):
        raise ValueError("script has no SECTION directive")
    device = SelaDevice(code)
    run = _Controller(device)
    flips: list[FlipBit] = []

    run.send(Command.ping())   # self test
    run.send(Command.init())

    for item in script.items:
        if isinstance(item, InjectFault):
            run.inject(item.fault, flips)

        elif isinstance(item, Section):
            if run.send(Command.zeresima()) is not None:
                digest = device.displayed_digest
                assert digest is not None
                run.zeresima_hex = digest.hex
            run.send(Command.section_info(item.zone, item.section))
            run.section = (item.zone, item.section)

        elif isinstance(item, VoterBlock):
            run.send(Command.open_voter())
            run.pending = {}
            for step in item.steps:
                if isinstance(step, InjectFault):
                    run.inject(step.fault, flips)
                elif isinstance(step, Vote):
                    run.send(Command.vote(step.contest, step.candidate))
                    run.pending[step.contest] = step.candidate
                elif isinstance(step, Correct):
                    run.send(Command.correct(step.contest))
                    run.pending.pop(step.contest, None)
                elif isinstance(step, Confirm):
                    run.send(Command.confirm(step.contest))
                    candidate = run.pending.pop(step.contest, None)
                    if candidate is not None:
                        key = (step.contest, candidate.code)
                        run.shadow[key] = run.shadow.get(key, 0) + 1
            run.send(Command.close_voter())

        elif isinstance(item, Finalize):
            if run.send(Command.finalize()) is not None:
                digest = device.displayed_digest
                assert digest is not None
                run.final_hex = digest.hex
            response = run.send(Command.audit_read_data())
            if response is not None:
                run.export = MemoryExport.from_wire(response.payload)
            response = run.send(Command.audit_read_code())
            if response is not None:
                run.code_readout = response.payload[:-4]

    assert run.section is not None
    zone, section = run.section
    bu = BoletimUrna(zone=zone, section=section, tallies=dict(run.shadow))
    ata = AtaRecord(
        zone=zone,
        section=section,
        zeresima_hex=run.zeresima_hex,
        final_hex=run.final_hex,
        alarm_step=run.alarm_step,
        notes=[ALARM_NOTE] if run.alarmed else [],
    )

    export_image = run.export.encode() if run.export is not None else None
    for flip in flips:
        if export_image is not None:
            export_image = flip_bit_in_export(export_image, flip.offset, flip.bit)

    return RunResult(
        transcript=run.transcript,
        bu=bu,
        ata=ata,
        export_image=export_image,
        code_readout=run.code_readout,
        device=device,
    )
