"""Counter table: keyed placement, capacity, order independence."""

from __future__ import annotations

import random

import pytest

from sela import MAX_ENTRIES, Accumulator, AccumulatorFull, CandidateNumber


def test_counts_accumulate():
    acc = Accumulator()
    assert acc.increment(1, CandidateNumber.of(13)) == 1
    assert acc.increment(1, CandidateNumber.of(13)) == 2
    assert acc.increment(2, CandidateNumber.of(13)) == 1
    assert acc.entries() == {(1, 13): 2, (2, 13): 1}


def test_no_zero_count_entries():
    acc = Accumulator()
    acc.increment(1, CandidateNumber.of(5))
    assert all(count >= 1 for count in acc.entries().values())
    assert all(count >= 1 for _, _, count in acc.records())


def test_contest_zero_rejected():
    with pytest.raises(ValueError):
        Accumulator().increment(0, CandidateNumber.of(1))


def test_slot_order_is_a_function_of_the_key_set():
    rng = random.Random(99)
    keys = [(rng.randint(1, 255), rng.randint(0, 99999)) for _ in range(200)]
    keys = list(dict.fromkeys(keys))
    layouts = set()
    for _ in range(5):
        rng.shuffle(keys)
        acc = Accumulator()
        for contest, code in keys:
            acc.increment(contest, CandidateNumber(code))
        layouts.add(tuple(acc.records()))
    assert len(layouts) == 1


def test_slot_order_differs_from_insertion_order():
    # with enough entries, hash placement cannot match arrival order
    acc = Accumulator()
    inserted = [(contest, contest * 17 % 1000) for contest in range(1, 101)]
    for contest, code in inserted:
        acc.increment(contest, CandidateNumber(code))
    stored = [(contest, code) for contest, code, _ in acc.records()]
    assert sorted(stored) == sorted(inserted)
    assert stored != inserted


def test_capacity_limit():
    acc = Accumulator()
    for i in range(MAX_ENTRIES):
        acc.preload(1 + i % 255, CandidateNumber.of(i // 255), 1)
    assert len(acc) == MAX_ENTRIES
    with pytest.raises(AccumulatorFull):
        acc.increment(255, CandidateNumber.of(99_999))
    # existing entries still count up fine
    acc.increment(1, CandidateNumber.of(0))


def test_clear():
    acc = Accumulator()
    acc.increment(1, CandidateNumber.of(7))
    acc.clear()
    assert len(acc) == 0
    assert acc.records() == []
