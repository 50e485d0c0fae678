"""Scenario script parser."""

from __future__ import annotations

import pytest

from sela import BLANK, CandidateNumber, ScriptError, parse_script
from sela.faults import Disconnect, FlipBit, PreloadMem, TamperCode
from sela.scripts import Confirm, Finalize, InjectFault, Section, Vote, VoterBlock


def test_parse_basic_script():
    script = parse_script(
        """
        # election day
        SECTION 10 42
        VOTER
          VOTE 1 13
          CONFIRM 1
        END_VOTER
        FINALIZE
        """
    )
    section, voter, finalize = script.items
    assert section == Section(zone=10, section=42)
    assert isinstance(finalize, Finalize)
    assert voter == VoterBlock(steps=(
        Vote(contest=1, candidate=CandidateNumber.of(13)), Confirm(contest=1),
    ))
    assert script.voter_count == 1


def test_parse_sentinel_candidates_and_faults():
    script = parse_script(
        """
        FAULT TAMPER_CODE 5
        FAULT PRELOAD_MEM 1 BRANCO 3
        SECTION 1 1
        VOTER
          VOTE 2 NULO
          FAULT DISCONNECT
          CONFIRM 2
        END_VOTER
        FINALIZE
        FAULT FLIP_BIT 20 3
        """
    )
    tamper, preload = script.items[0], script.items[1]
    assert tamper == InjectFault(TamperCode(offset=5))
    assert preload == InjectFault(PreloadMem(1, BLANK, 3))
    voter = script.items[3]
    assert InjectFault(Disconnect()) in voter.steps
    assert script.items[-1] == InjectFault(FlipBit(offset=20, bit=3))


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("WAT 1", "unknown directive"),
        ("VOTE 1 13", "outside a voter block"),
        ("VOTER\nVOTER", "cannot nest"),
        ("VOTER\nVOTE 1 13", "unterminated"),
        ("END_VOTER", "without VOTER"),
        ("SECTION 1", "needs zone and section"),
        ("SECTION 0 1", "out of range"),
        ("VOTER\nVOTE 1 100000\nEND_VOTER", "out of range"),
        ("VOTER\nVOTE 0 13\nEND_VOTER", "contest id out of range"),
        ("VOTER\nVOTE 1 x\nEND_VOTER", "not a candidate token"),
        ("FAULT EMP", "unknown fault kind"),
        ("FAULT FLIP_BIT 3", "needs offset and bit"),
        ("FAULT PRELOAD_MEM 1 13", "needs contest, candidate and count"),
        ("FINALIZE now", "takes no arguments"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ScriptError) as err:
        parse_script(text)
    assert fragment in str(err.value)


def test_error_reports_line_number():
    with pytest.raises(ScriptError) as err:
        parse_script("SECTION 1 1\nVOTER\n  VOTE 1 13\n  WRONG\nEND_VOTER")
    assert err.value.line_no == 4
