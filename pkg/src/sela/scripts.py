"""Scenario script parsing.

A scenario is a line-based text file mirroring one election day::

    # comments and blank lines are ignored
    SECTION <zone> <section>
    VOTER
        VOTE <contest> <candidate|BRANCO|NULO>
        CORRECT <contest>
        CONFIRM <contest>
    END_VOTER
    FAULT <DISCONNECT|TAMPER_CODE [offset]|PRELOAD_MEM c cand n|FLIP_BIT off bit>
    FINALIZE

FAULT lines may appear at the top level or inside a voter block. The
parser validates structure and value ranges; ordering mistakes (say, a
voter block before SECTION) surface at run time as a refused command.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .faults import Disconnect, Fault, FlipBit, PreloadMem, TamperCode
from .types import CandidateNumber, check_contest


class ScriptError(ValueError):
    def __init__(self, line_no: int, message: str) -> None:
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


@dataclass(frozen=True)
class Vote:
    contest: int
    candidate: CandidateNumber


@dataclass(frozen=True)
class Correct:
    contest: int


@dataclass(frozen=True)
class Confirm:
    contest: int


@dataclass(frozen=True)
class InjectFault:
    fault: Fault


VoterStep = Vote | Correct | Confirm | InjectFault


@dataclass(frozen=True)
class VoterBlock:
    steps: tuple[VoterStep, ...]


@dataclass(frozen=True)
class Section:
    zone: int
    section: int


@dataclass(frozen=True)
class Finalize:
    pass


ScriptItem = Section | VoterBlock | InjectFault | Finalize


@dataclass(frozen=True)
class ScenarioScript:
    items: tuple[ScriptItem, ...]

    @property
    def voter_count(self) -> int:
        return sum(1 for item in self.items if isinstance(item, VoterBlock))


def _parse_int(token: str, what: str, line_no: int, lo: int, hi: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ScriptError(line_no, f"{what} is not a number: {token!r}") from None
    if not lo <= value <= hi:
        raise ScriptError(line_no, f"{what} out of range: {value}")
    return value


def _parse_contest(token: str, line_no: int) -> int:
    value = _parse_int(token, "contest", line_no, 0, 10**9)
    try:
        return check_contest(value)
    except ValueError as exc:
        raise ScriptError(line_no, str(exc)) from None


def _parse_candidate(token: str, line_no: int) -> CandidateNumber:
    try:
        return CandidateNumber.parse(token)
    except ValueError as exc:
        raise ScriptError(line_no, str(exc)) from None


def _parse_fault(args: list[str], line_no: int) -> Fault:
    if not args:
        raise ScriptError(line_no, "FAULT needs a kind")
    kind, rest = args[0].upper(), args[1:]
    if kind == "DISCONNECT":
        if rest:
            raise ScriptError(line_no, "DISCONNECT takes no arguments")
        return Disconnect()
    if kind == "TAMPER_CODE":
        if len(rest) > 1:
            raise ScriptError(line_no, "TAMPER_CODE takes at most an offset")
        offset = _parse_int(rest[0], "offset", line_no, 0, 2**31) if rest else 0
        return TamperCode(offset=offset)
    if kind == "PRELOAD_MEM":
        if len(rest) != 3:
            raise ScriptError(
                line_no, "PRELOAD_MEM needs contest, candidate and count"
            )
        return PreloadMem(
            contest=_parse_contest(rest[0], line_no),
            candidate=_parse_candidate(rest[1], line_no),
            count=_parse_int(rest[2], "count", line_no, 1, 2**31),
        )
    if kind == "FLIP_BIT":
        if len(rest) != 2:
            raise ScriptError(line_no, "FLIP_BIT needs offset and bit")
        return FlipBit(
            offset=_parse_int(rest[0], "offset", line_no, 0, 2**31),
            bit=_parse_int(rest[1], "bit", line_no, 0, 7),
        )
    raise ScriptError(line_no, f"unknown fault kind: {kind}")


def parse_script(text: str) -> ScenarioScript:
    items: list[ScriptItem] = []
    voter_steps: list[VoterStep] | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        word = parts[0].upper()
        args = parts[1:]

        if word == "SECTION":
            if voter_steps is not None:
                raise ScriptError(line_no, "SECTION inside a voter block")
            if len(args) != 2:
                raise ScriptError(line_no, "SECTION needs zone and section")
            items.append(Section(
                zone=_parse_int(args[0], "zone", line_no, 1, 0xFFFF),
                section=_parse_int(args[1], "section", line_no, 1, 0xFFFF),
            ))
        elif word == "VOTER":
            if voter_steps is not None:
                raise ScriptError(line_no, "voter blocks cannot nest")
            if args:
                raise ScriptError(line_no, "VOTER takes no arguments")
            voter_steps = []
        elif word == "END_VOTER":
            if voter_steps is None:
                raise ScriptError(line_no, "END_VOTER without VOTER")
            items.append(VoterBlock(steps=tuple(voter_steps)))
            voter_steps = None
        elif word == "VOTE":
            if voter_steps is None:
                raise ScriptError(line_no, "VOTE outside a voter block")
            if len(args) != 2:
                raise ScriptError(line_no, "VOTE needs contest and candidate")
            voter_steps.append(Vote(
                contest=_parse_contest(args[0], line_no),
                candidate=_parse_candidate(args[1], line_no),
            ))
        elif word in ("CORRECT", "CONFIRM"):
            if voter_steps is None:
                raise ScriptError(line_no, f"{word} outside a voter block")
            if len(args) != 1:
                raise ScriptError(line_no, f"{word} needs a contest")
            contest = _parse_contest(args[0], line_no)
            voter_steps.append(
                Correct(contest) if word == "CORRECT" else Confirm(contest)
            )
        elif word == "FAULT":
            step = InjectFault(_parse_fault(args, line_no))
            if voter_steps is not None:
                voter_steps.append(step)
            else:
                items.append(step)
        elif word == "FINALIZE":
            if voter_steps is not None:
                raise ScriptError(line_no, "FINALIZE inside a voter block")
            if args:
                raise ScriptError(line_no, "FINALIZE takes no arguments")
            items.append(Finalize())
        else:
            raise ScriptError(line_no, f"unknown directive: {word}")

    if voter_steps is not None:
        raise ScriptError(len(text.splitlines()), "unterminated voter block")
    return ScenarioScript(items=tuple(items))


def load_script(path: str | Path) -> ScenarioScript:
    return parse_script(Path(path).read_text(encoding="utf-8"))
