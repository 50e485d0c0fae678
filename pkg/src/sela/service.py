"""Interactive session service for the booth, poll-worker and auditor UIs.

Endpoints (JSON bodies):

    POST /sessions                     {zone, section, code_hex?} -> {id, ...}
    GET  /sessions/{id}                full visible state
    POST /sessions/{id}/pollworker     {action: init|zeresima|section|
                                        open_voter|close_voter|finalize|
                                        annotate_ata}
    POST /sessions/{id}/voter          {contest, keys: digits|BRANCO|NULO|
                                        CORRIGE|CONFIRMA}
    GET  /sessions/{id}/artifacts      bu/ata/export/transcript when available
    POST /audit                        artifact refs -> audit report
    WS   /sessions/{id}/stream         {seq, phase, ue_display, sela_visor,
                                        last_response} on every state change

Unknown session: 404. Action refused by the device in the current phase:
409 carrying the device status name. Malformed body: 400. Each session is
mutated under its own lock, so events are strictly ordered and their
sequence numbers have no gaps.

Both displays are exposed on purpose: the voter's check is comparing the
machine's display with the device visor, and the UI renders them side by
side exactly as the stream reports them.
"""

from __future__ import annotations

import asyncio
import secrets
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request, WebSocket, WebSocketDisconnect
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .artifacts import ArtifactParseError, AtaRecord, BoletimUrna
from .audit import audit_section
from .canonical import zeresima_digest
from .device import DevicePhase, MemoryExport, SelaDevice
from .protocol import Command, NakCode, Response
from .simulator import SerialLink
from .types import (
    BLANK,
    BLANK_LABEL,
    MAX_CONTEST,
    NULL,
    NULL_LABEL,
    CandidateNumber,
    CodeImage,
    Digest160,
    reference_code,
)

VOTER_WORDS = (BLANK_LABEL, NULL_LABEL, "CORRIGE", "CONFIRMA")


class CreateSessionBody(BaseModel):
    zone: int = Field(ge=1, le=0xFFFF)
    section: int = Field(ge=1, le=0xFFFF)
    code_hex: str | None = None


class PollworkerBody(BaseModel):
    action: str


class VoterBody(BaseModel):
    contest: int = Field(ge=1, le=MAX_CONTEST)
    keys: str


class AuditBody(BaseModel):
    session_id: str | None = None
    export_hex: str | None = None
    code_hex: str | None = None
    ata_text: str | None = None
    bu_text: str | None = None
    published_zero: str | None = None
    published_crc: str | None = None
    seal_intact: bool = True


@dataclass
class SessionState:
    """One live election session: device, link, controller shadow."""

    id: str
    code: CodeImage
    zone: int
    section: int
    device: SelaDevice
    link: SerialLink
    published_zero: str
    published_crc: int
    seq: int = 0
    last_response: str = ""
    ue_display: str = ""
    active_contest: int | None = None
    buffers: dict[int, str] = field(default_factory=dict)
    ue_pending: dict[int, CandidateNumber] = field(default_factory=dict)
    shadow: dict[tuple[int, int], int] = field(default_factory=dict)
    ata: AtaRecord | None = None
    bu: BoletimUrna | None = None
    export_image: bytes | None = None
    code_readout: bytes | None = None
    transcript_lines: list[str] = field(default_factory=list)
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    subscribers: list[asyncio.Queue] = field(default_factory=list)

    def event_payload(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "phase": self.device.phase.name,
            "ue_display": self.ue_display,
            "sela_visor": self.device.visor,
            "last_response": self.last_response,
        }

    def full_state(self) -> dict[str, Any]:
        state = self.event_payload()
        state.update({
            "id": self.id,
            "zone": self.zone,
            "section": self.section,
            "pending_contest": self.active_contest,
            "digest_pages": self.device.digest_pages,
            "published_zero": self.published_zero,
            "published_crc": f"{self.published_crc:08x}",
            "ata_zeresima": self.ata.zeresima_hex if self.ata else None,
            "ata_final": self.ata.final_hex if self.ata else None,
            "artifacts_ready": self.export_image is not None,
        })
        return state

    def emit(self) -> None:
        self.seq += 1
        payload = self.event_payload()
        for queue in self.subscribers:
            queue.put_nowait(payload)

    def send(self, command: Command) -> Response:
        response = self.link.send(command)
        if response is None:  # pragma: no cover - service links stay up
            raise HTTPException(status_code=409, detail="LINK_DOWN")
        self.transcript_lines.append(
            f"{command.describe()} -> {response.describe()}"
            f" visor={self.device.visor!r}"
        )
        return response

    def send_or_409(self, command: Command) -> Response:
        response = self.send(command)
        if response.is_nak:
            code = response.nak_code
            self.last_response = f"NAK:{code.name}"
            raise HTTPException(status_code=409, detail=code.name)
        self.last_response = response.describe()
        return response


def create_app(
    workdir: Path | None = None, ui_dir: Path | None = None
) -> FastAPI:
    app = FastAPI(title="sela session service")
    sessions: dict[str, SessionState] = {}

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def get_session(session_id: str) -> SessionState:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def persist(session: SessionState) -> None:
        if workdir is None:
            return
        workdir.mkdir(parents=True, exist_ok=True)
        base = workdir / session.id
        if session.ata is not None:
            base.with_suffix(".ata").write_text(session.ata.render())
        if session.bu is not None:
            base.with_suffix(".bu").write_text(session.bu.render())
        if session.export_image is not None:
            base.with_suffix(".selamem").write_bytes(session.export_image)
        if session.code_readout is not None:
            base.with_suffix(".code.bin").write_bytes(session.code_readout)
        base.with_suffix(".transcript.txt").write_text(
            "\n".join(session.transcript_lines) + "\n"
        )

    @app.post("/sessions", status_code=201)
    async def create_session(body: CreateSessionBody):
        try:
            code = (
                CodeImage(bytes.fromhex(body.code_hex))
                if body.code_hex else reference_code()
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        sid = secrets.token_hex(8)
        device = SelaDevice(code)
        session = SessionState(
            id=sid,
            code=code,
            zone=body.zone,
            section=body.section,
            device=device,
            link=SerialLink(device),
            published_zero=zeresima_digest(code).hex,
            published_crc=code.crc32,
        )
        session.ata = AtaRecord(zone=body.zone, section=body.section)
        sessions[sid] = session
        return {"id": sid, **session.full_state()}

    @app.get("/sessions/{session_id}")
    async def get_state(session_id: str):
        session = get_session(session_id)
        async with session.lock:
            return session.full_state()

    @app.post("/sessions/{session_id}/pollworker")
    async def pollworker(session_id: str, body: PollworkerBody):
        session = get_session(session_id)
        async with session.lock:
            action = body.action
            if action == "init":
                session.send_or_409(Command.init())
                # the controller-side shadow resets with the device
                session.shadow.clear()
                session.buffers.clear()
                session.ue_pending.clear()
                session.ue_display = ""
                session.active_contest = None
                session.ata = AtaRecord(zone=session.zone, section=session.section)
                session.bu = None
                session.export_image = None
                session.code_readout = None
            elif action == "zeresima":
                session.send_or_409(Command.zeresima())
            elif action == "section":
                session.send_or_409(
                    Command.section_info(session.zone, session.section)
                )
            elif action == "open_voter":
                session.send_or_409(Command.open_voter())
                session.buffers.clear()
                session.ue_pending.clear()
                session.ue_display = ""
            elif action == "close_voter":
                session.send_or_409(Command.close_voter())
                session.buffers.clear()
                session.ue_pending.clear()
                session.ue_display = ""
                session.active_contest = None
            elif action == "finalize":
                session.send_or_409(Command.finalize())
                session.bu = BoletimUrna(
                    zone=session.zone, section=session.section,
                    tallies=dict(session.shadow),
                )
                data = session.send(Command.audit_read_data())
                if data.is_data:
                    export = MemoryExport.from_wire(data.payload)
                    session.export_image = export.encode()
                code = session.send(Command.audit_read_code())
                if code.is_data:
                    session.code_readout = code.payload[:-4]
                persist(session)
            elif action == "annotate_ata":
                digest = session.device.displayed_digest
                if digest is None or session.ata is None:
                    raise HTTPException(
                        status_code=409, detail="NOTHING_TO_ANNOTATE"
                    )
                if session.device.phase == DevicePhase.ZERESIMA_SHOWN:
                    session.ata.zeresima_hex = digest.hex
                elif session.device.phase == DevicePhase.FINALIZED_AUDIT:
                    session.ata.final_hex = digest.hex
                else:
                    raise HTTPException(
                        status_code=409, detail="NOTHING_TO_ANNOTATE"
                    )
                session.last_response = "ACK"
                persist(session)
            else:
                raise HTTPException(status_code=400, detail="unknown action")
            session.emit()
            return session.full_state()

    @app.post("/sessions/{session_id}/voter")
    async def voter(session_id: str, body: VoterBody):
        session = get_session(session_id)
        keys = body.keys.strip().upper()
        if not keys or (not keys.isdigit() and keys not in VOTER_WORDS):
            raise HTTPException(status_code=400, detail="unknown keys")
        async with session.lock:
            contest = body.contest
            session.active_contest = contest

            if keys.isdigit():
                for digit in keys:
                    buffer = session.buffers.get(contest, "")
                    if buffer in (BLANK_LABEL, NULL_LABEL):
                        buffer = ""
                    if len(buffer) >= 5:
                        raise HTTPException(
                            status_code=400, detail="visor holds 5 digits"
                        )
                    buffer += digit
                    candidate = CandidateNumber.of(int(buffer))
                    session.send_or_409(Command.vote(contest, candidate))
                    session.buffers[contest] = buffer
                    session.ue_pending[contest] = candidate
                    session.ue_display = buffer
                    session.emit()
            elif keys in (BLANK_LABEL, NULL_LABEL):
                candidate = BLANK if keys == BLANK_LABEL else NULL
                session.send_or_409(Command.vote(contest, candidate))
                session.buffers[contest] = keys
                session.ue_pending[contest] = candidate
                session.ue_display = keys
                session.emit()
            elif keys == "CORRIGE":
                session.send_or_409(Command.correct(contest))
                session.buffers.pop(contest, None)
                session.ue_pending.pop(contest, None)
                session.ue_display = ""
                session.emit()
            else:  # CONFIRMA
                session.send_or_409(Command.confirm(contest))
                candidate = session.ue_pending.pop(contest, None)
                if candidate is not None:
                    key = (contest, candidate.code)
                    session.shadow[key] = session.shadow.get(key, 0) + 1
                session.buffers.pop(contest, None)
                session.ue_display = ""
                session.emit()
            return session.full_state()

    @app.get("/sessions/{session_id}/artifacts")
    async def artifacts(session_id: str):
        session = get_session(session_id)
        async with session.lock:
            return {
                "bu": session.bu.render() if session.bu else None,
                "ata": session.ata.render() if session.ata else None,
                "export_hex": (
                    session.export_image.hex()
                    if session.export_image else None
                ),
                "code_hex": (
                    session.code_readout.hex()
                    if session.code_readout is not None else None
                ),
                "transcript": "\n".join(session.transcript_lines) + "\n",
            }

    @app.post("/audit")
    async def run_audit(body: AuditBody):
        export_image = None
        code = None
        ata_text = body.ata_text
        bu_text = body.bu_text
        published_zero = body.published_zero
        published_crc = body.published_crc
        seal_intact = body.seal_intact

        if body.session_id is not None:
            session = get_session(body.session_id)
            async with session.lock:
                export_image = session.export_image
                code = CodeImage(session.code_readout) \
                    if session.code_readout is not None else None
                ata_text = ata_text or (
                    session.ata.render() if session.ata else None
                )
                bu_text = bu_text or (
                    session.bu.render() if session.bu else None
                )
                published_zero = published_zero or session.published_zero
                published_crc = published_crc or f"{session.published_crc:08x}"

        try:
            if body.export_hex is not None:
                export_image = bytes.fromhex(body.export_hex)
            if body.code_hex is not None:
                code = CodeImage(bytes.fromhex(body.code_hex))
            if not (ata_text and bu_text and published_zero and published_crc):
                raise ValueError("audit needs ata, bu and the published values")
            report = audit_section(
                export_image=export_image,
                code=code,
                published_zero=Digest160.from_hex(published_zero),
                published_code_crc=int(published_crc, 16),
                ata=AtaRecord.parse(ata_text),
                bu=BoletimUrna.parse(bu_text),
                seal_intact=seal_intact,
            )
        except (ArtifactParseError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {
            "overall": report.overall.value,
            "exit_code": report.exit_code,
            "findings": [
                {"check": f.check, "verdict": f.verdict, "detail": f.detail}
                for f in report.findings
            ],
        }

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        session = sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        async with session.lock:
            snapshot = session.event_payload()
            session.subscribers.append(queue)
        try:
            await websocket.send_json(snapshot)
            while True:
                await websocket.send_json(await queue.get())
        except WebSocketDisconnect:
            pass
        finally:
            if queue in session.subscribers:
                session.subscribers.remove(queue)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
