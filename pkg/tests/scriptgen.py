"""Random scenario generators shared by the property and acceptance tests.

Generated scripts are always structurally valid and never confirm a
contest with nothing pending, so a run can only abort on a real device
bug. The expected tally for any generated text comes from the
independent oracle in oracles.py.
"""

from __future__ import annotations

import random


def candidate_token(rng: random.Random) -> str:
    roll = rng.random()
    if roll < 0.08:
        return "BRANCO"
    if roll < 0.14:
        return "NULO"
    if roll < 0.6:
        return str(rng.randint(0, 99))
    return str(rng.randint(0, 99999))


def _voter_lines(rng: random.Random, contests: list[int]) -> list[str]:
    ops_by_contest: list[list[str]] = []
    for contest in contests:
        if rng.random() < 0.2:
            continue  # abstains from this contest
        ops = [f"VOTE {contest} {candidate_token(rng)}"]
        pending = True
        for _ in range(rng.randint(0, 2)):
            if pending and rng.random() < 0.3:
                ops.append(f"CORRECT {contest}")
                pending = False
                if rng.random() < 0.8:
                    ops.append(f"VOTE {contest} {candidate_token(rng)}")
                    pending = True
        if pending and rng.random() < 0.9:
            ops.append(f"CONFIRM {contest}")
        # otherwise the selection is abandoned and must never be counted
        ops_by_contest.append(ops)

    # interleave the per-contest sequences, preserving each one's order
    merged: list[str] = []
    cursors = [0] * len(ops_by_contest)
    while True:
        open_lists = [
            i for i in range(len(cursors))
            if cursors[i] < len(ops_by_contest[i])
        ]
        if not open_lists:
            break
        pick = rng.choice(open_lists)
        merged.append(ops_by_contest[pick][cursors[pick]])
        cursors[pick] += 1
    return merged


def random_scenario(
    rng: random.Random,
    min_voters: int = 1,
    max_voters: int = 50,
    max_contests: int = 3,
) -> str:
    zone = rng.randint(1, 9999)
    section = rng.randint(1, 9999)
    contests = list(range(1, rng.randint(1, max_contests) + 1))
    lines = [f"SECTION {zone} {section}"]
    for _ in range(rng.randint(min_voters, max_voters)):
        lines.append("VOTER")
        lines.extend(f"  {op}" for op in _voter_lines(rng, contests))
        lines.append("END_VOTER")
    lines.append("FINALIZE")
    return "\n".join(lines) + "\n"


def scenario_for_multiset(
    rng: random.Random,
    votes: list[tuple[int, str]],
    zone: int,
    section: int,
    noise: bool = True,
) -> str:
    """Script confirming exactly the given (contest, candidate) multiset.

    Voter grouping, ordering and any unconfirmed noise are randomized,
    so two calls with the same multiset give behaviourally equivalent
    but differently ordered sessions.
    """
    remaining = list(votes)
    rng.shuffle(remaining)
    lines = [f"SECTION {zone} {section}"]
    while remaining:
        lines.append("VOTER")
        seen: set[int] = set()
        batch = rng.randint(1, min(4, len(remaining)))
        taken = 0
        for vote in list(remaining):
            if taken == batch:
                break
            contest, token = vote
            if contest in seen:
                continue
            seen.add(contest)
            remaining.remove(vote)
            taken += 1
            if noise and rng.random() < 0.3:
                lines.append(f"  VOTE {contest} {candidate_token(rng)}")
                lines.append(f"  CORRECT {contest}")
            lines.append(f"  VOTE {contest} {token}")
            lines.append(f"  CONFIRM {contest}")
        if noise and rng.random() < 0.25:
            extra = rng.randint(1, 3)
            if extra not in seen:
                lines.append(f"  VOTE {extra} {candidate_token(rng)}")
                # abandoned on purpose: discarded when the voter closes
        lines.append("END_VOTER")
    lines.append("FINALIZE")
    return "\n".join(lines) + "\n"
