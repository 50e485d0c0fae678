"""Per-(contest, candidate) confirmed-vote counters.

Counters live in a fixed table of CAP slots and each entry's slot is
derived from its key alone (hash placement with deterministic collision
resolution), never from arrival order. Reading the table front to back
therefore reveals nothing about who voted when: two sessions that confirm
the same multiset of votes in any order produce bit-identical tables.

The entry limit is lower than CAP: an exported record is 9 bytes and the
export image must stay within the data region, which caps usable entries
at 7279 (that also keeps the hash table comfortably below full).
"""

from __future__ import annotations

from .types import CandidateNumber, check_contest

CAP = 8_192               # physical slots in the counter table
RECORD_SIZE = 9           # contest(1) + candidate(4) + count(4)
MAX_ENTRIES = 7_279       # bounded by the export image and wire framing
MAX_COUNT = 0xFFFFFFFF

_FNV_OFFSET = 0x811C9DC5
_FNV_PRIME = 0x01000193


class AccumulatorFull(Exception):
    """No room for another distinct (contest, candidate) entry."""


def _home_slot(contest: int, code: int) -> int:
    """Keyed home position: FNV-1a over the 5 key bytes, mod CAP."""
    h = _FNV_OFFSET
    for byte in (contest, code >> 24 & 0xFF, code >> 16 & 0xFF,
                 code >> 8 & 0xFF, code & 0xFF):
        h = ((h ^ byte) * _FNV_PRIME) & 0xFFFFFFFF
    return h % CAP


class Accumulator:
    """Confirmed-vote counter table with order-free keyed placement."""

    def __init__(self) -> None:
        self._counts: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self._counts)

    def clear(self) -> None:
        self._counts.clear()

    def increment(self, contest: int, candidate: CandidateNumber) -> int:
        """Add one confirmed vote; returns the new count for the entry."""
        check_contest(contest)
        key = (contest, candidate.code)
        if key not in self._counts and len(self._counts) >= MAX_ENTRIES:
            raise AccumulatorFull(f"counter table holds {MAX_ENTRIES} entries")
        count = self._counts.get(key, 0) + 1
        if count > MAX_COUNT:
            raise AccumulatorFull("entry count overflow")
        self._counts[key] = count
        return count

    def preload(self, contest: int, candidate: CandidateNumber, count: int) -> None:
        """Write a counter directly, bypassing the vote path.

        Exists for tamper simulation only; the protocol never does this.
        """
        if count <= 0:
            raise ValueError("preloaded count must be positive")
        if len(self._counts) >= MAX_ENTRIES:
            raise AccumulatorFull(f"counter table holds {MAX_ENTRIES} entries")
        self._counts[(contest, candidate.code)] = count

    def entries(self) -> dict[tuple[int, int], int]:
        """Snapshot of (contest, candidate code) -> count."""
        return dict(self._counts)

    def records(self) -> list[tuple[int, int, int]]:
        """(contest, candidate code, count) rows in physical slot order.

        Slot placement: every key goes to its home slot (FNV-1a mod CAP),
        colliding keys are placed by linear probing in a fixed key order,
        so the layout is a pure function of the key set.
        """
        table: list[tuple[int, int] | None] = [None] * CAP
        for key in sorted(self._counts, key=lambda k: (_home_slot(*k), k)):
            slot = _home_slot(*key)
            while table[slot] is not None:
                slot = (slot + 1) % CAP
            table[slot] = key
        return [
            (key[0], key[1], self._counts[key])
            for key in table
            if key is not None
        ]
