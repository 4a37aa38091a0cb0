import pytest

from akalab import privaka
from akalab.attacks import attack_privaka_desync
from akalab.core import HnPhase, IllegalStep, ProtocolMode, UePhase, sqn_bytes
from akalab.crypto import xor
from akalab.fiveg import f1, f5
from akalab.messages import AuthFailure, Error, FiveGAuthVector, PrivConfirm
from akalab.world import World, honest_session


def make(**kw):
    return World.create(ProtocolMode.PRIV_AKA, ["A", "B"], 0, **kw)


def vector(st, sqn, n=bytes(range(16))):
    return FiveGAuthVector(n, xor(sqn_bytes(sqn), f5(n, st.k)), f1(sqn, n, st.k))


def test_honest_runs_keep_counters_equal():
    w = make()
    for _ in range(4):
        gen = honest_session(w, "A")
        with pytest.raises(StopIteration) as stop:
            while True:
                next(gen)
        assert stop.value.value
    assert w.subscribers["A"].sqn_ue == w.hn.record("A").sqn_hn == 4


def test_vector_does_not_advance_hn_counter():
    w = make()
    j = w.new_session()
    w.deliver_to_hn(j, w.deliver_to_ue("A", b""))
    assert w.hn.record("A").sqn_hn == 0
    assert w.hn.session(j).sqn_sent == 0


@pytest.mark.parametrize("drift,accepted", [(-1, True), (0, True), (1, True), (2, False), (-2, False)])
def test_drift_tolerance(drift, accepted):
    st = make(initial_sqn={"A": (5, 5)}).subscribers["A"].update(phase=UePhase.AWAIT_VECTOR)
    st2, out = privaka.priv_ue_verify(st, vector(st, 5 + drift))
    if accepted:
        assert isinstance(out, PrivConfirm) and st2.sqn_ue == 6 + drift
    else:
        assert out == Error() and st2.sqn_ue == 5


def test_bad_mac_is_auth_failure():
    w = make()
    st = w.subscribers["A"].update(phase=UePhase.AWAIT_VECTOR)
    other = w.subscribers["B"]
    _, out = privaka.priv_ue_verify(st, vector(other, 0))
    assert out == AuthFailure()


def test_commit_advances_and_closes_session():
    w = make()
    w, confirm, j = privaka.priv_run_to_confirm(w, "A")
    w, ok = privaka.priv_hn_confirm(w, j, confirm)
    assert ok and w.hn.record("A").sqn_hn == 1
    assert w.hn.session(j).phase is HnPhase.DONE
    # second delivery is not accepted
    assert not privaka.priv_hn_confirm(w, j, confirm)[1]
    assert not privaka.priv_hn_confirm(w, 99, confirm)[1]


def test_invalid_confirm_leaves_session_open():
    w = make()
    j = w.new_session()
    w.deliver_to_hn(j, w.deliver_to_ue("A", b""))
    before = w.hn
    hn, out = privaka.priv_hn_commit(before, j, PrivConfirm(bytes(16)))
    assert out == Error() and hn == before


def test_commit_on_closed_session_is_illegal():
    w = make()
    with pytest.raises(IllegalStep):
        privaka.priv_hn_commit(w.hn.with_session(3), 3, PrivConfirm(bytes(16)))


def test_desync_attack_and_control():
    res = attack_privaka_desync(make(), "A")
    assert res.delta == 2 and res.subsequent_runs_fail
    ctl = attack_privaka_desync(make(), "A", control=True)
    assert ctl.delta == 0 and not ctl.subsequent_runs_fail


def test_desync_needs_priv_mode():
    with pytest.raises(ValueError):
        attack_privaka_desync(World.create(ProtocolMode.FIVEG_AKA, ["A"], 0), "A")


def test_ue_emits_confirm_for_next_counter():
    w = make()
    _, confirm, j = privaka.priv_run_to_confirm(w, "A")
    st = w.subscribers["A"]
    assert confirm == PrivConfirm(privaka.confirm_mac(w.hn.session(j).nonce, st.sqn_ue, st.k))
