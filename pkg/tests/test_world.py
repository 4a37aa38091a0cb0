import random

import pytest
from hypothesis import given, settings, strategies as st

from akalab.core import HarnessError, ProtocolMode
from akalab.transcript import DRAW, INJECTED
from akalab.world import ERROR_BYTES, World, run_honest_schedule, sqn_dominance_holds

MODES = list(ProtocolMode)


@pytest.mark.parametrize("mode", MODES)
def test_honest_schedule_all_accept(mode):
    w = World.create(mode, ["A", "B", "C"], 1)
    results = run_honest_schedule(w, 3, 7)
    assert len(results) == 9 and all(results)


@pytest.mark.parametrize("mode", MODES)
def test_same_seed_same_transcript(mode):
    def once():
        w = World.create(mode, ["A", "B"], "s")
        run_honest_schedule(w, 2, random.Random(3))
        return w.transcript.to_jsonl()
    assert once() == once()


def test_different_seeds_differ():
    a = World.create(ProtocolMode.AKA_PLUS, ["A"], 1)
    b = World.create(ProtocolMode.AKA_PLUS, ["A"], 2)
    assert a.subscribers["A"].k != b.subscribers["A"].k


def test_rejects_reserved_and_duplicate_ids():
    with pytest.raises(ValueError):
        World.create(ProtocolMode.AKA_PLUS, ["A", "A"], 0)


@pytest.mark.parametrize("mode", MODES)
@settings(max_examples=40)
@given(data=st.binary(max_size=64))
def test_garbage_leaves_state_unchanged(mode, data):
    w = World.create(mode, ["A"], 0)
    run_honest_schedule(w, 1, 0)
    ue_before = w.subscribers["A"]
    j = w.new_session()
    hn_before = w.hn
    out_ue = w.deliver_to_ue("A", b"\xff" + data)
    out_hn = w.deliver_to_hn(j, b"\xee" + data)
    assert out_ue == out_hn == ERROR_BYTES
    assert w.subscribers["A"] == ue_before and w.hn == hn_before
    assert [e.dir for e in w.transcript][-2:] == [INJECTED, INJECTED]


def test_unknown_session_is_rejected():
    w = World.create(ProtocolMode.AKA_PLUS, ["A"], 0)
    assert w.deliver_to_hn(5, b"") == ERROR_BYTES


def test_draw_unlink_clears_guti_use():
    w = World.create(ProtocolMode.AKA_PLUS, ["A"], 0)
    run_honest_schedule(w, 1, 0)
    assert w.subscribers["A"].success_ue
    w.apply_draw("A", unlink=True)
    assert not w.subscribers["A"].success_ue
    assert w.transcript[-1].dir == DRAW and w.transcript[-1].data == b"\x01"


def test_step_budget():
    w = World.create(ProtocolMode.FIVEG_AKA, ["A"], 0, step_budget=3)
    with pytest.raises(HarnessError):
        run_honest_schedule(w, 1, 0)


def test_observer_sees_every_accepted_step():
    w = World.create(ProtocolMode.AKA_PLUS, ["A", "B"], 0)
    seen = []
    w.observers.append(lambda world: seen.append(sqn_dominance_holds(world)))
    run_honest_schedule(w, 5, 1)
    assert len(seen) == w.steps and all(seen)


def test_counters_never_decrease():
    w = World.create(ProtocolMode.AKA_PLUS, ["A", "B"], 0)
    last = {"A": 0, "B": 0}

    def check(world):
        for s, st_ in world.subscribers.items():
            assert st_.sqn_ue >= last[s]
            last[s] = st_.sqn_ue
    w.observers.append(check)
    run_honest_schedule(w, 6, 2)


def test_auth_log_pairs_each_session():
    w = World.create(ProtocolMode.AKA_PLUS, ["A"], 0)
    run_honest_schedule(w, 2, 0)
    kinds = [e.kind for e in w.auth_log]
    assert kinds.count("ue_e") == 2 and kinds.count("hn_e") == 2
