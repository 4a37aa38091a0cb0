import pytest

from akalab import fiveg
from akalab.core import FAIL, HnPhase, IllegalStep, ProtocolMode, UePhase, sqn_bytes
from akalab.crypto import xor
from akalab.messages import (FIVEG_ID_GUTI, FIVEG_ID_SUCI, AuthFailure, FiveGAuthVector,
                             FiveGId, FiveGRes, PermanentIdRequest, PlainImsi, RefreshAssign,
                             ResyncRequest, Tmsi, decode_message, encode_message)
from akalab.world import ERROR_BYTES, World, honest_session


def make(mode=ProtocolMode.FIVEG_AKA, seed=0, **kw):
    return World.create(mode, ["A", "B"], seed, **kw)


def run(world, supi):
    gen = honest_session(world, supi)
    try:
        while True:
            next(gen)
    except StopIteration as stop:
        return stop.value


def test_honest_session_assigns_guti():
    w = make()
    assert run(w, "A")
    st = w.subscribers["A"]
    assert st.success_ue and st.guti_ue is not None
    assert w.hn.record("A").guti_hn == st.guti_ue


def test_identify_sends_guti_once_then_suci():
    w = make()
    run(w, "A")
    st, m = fiveg.fg_ue_identify(w.subscribers["A"], w.rng)
    assert m.kind == FIVEG_ID_GUTI and st.guti_ue is None
    _, m2 = fiveg.fg_ue_identify(st, w.rng)
    assert m2.kind == FIVEG_ID_SUCI


def test_suci_ciphertexts_differ():
    w = make()
    st = w.subscribers["A"]
    _, m1 = fiveg.fg_ue_identify(st, w.rng)
    _, m2 = fiveg.fg_ue_identify(st, w.rng)
    assert m1.payload != m2.payload


def test_legacy_sends_plain_identity_and_answers_requests():
    w = make(ProtocolMode.FIVEG_AKA_LEGACY)
    assert decode_message(w.deliver_to_ue("A", b"")) == PlainImsi("A")
    assert decode_message(w.deliver_to_ue("A", encode_message(PermanentIdRequest()))) == PlainImsi("A")
    run(w, "A")
    assert isinstance(decode_message(w.deliver_to_ue("A", b"")), Tmsi)


def test_permanent_id_request_refused_outside_legacy():
    w = make()
    assert w.deliver_to_ue("A", encode_message(PermanentIdRequest())) == ERROR_BYTES


def test_vector_advances_counter_before_sending():
    w = make()
    j = w.new_session()
    vec = decode_message(w.deliver_to_hn(j, w.deliver_to_ue("A", b"")))
    assert w.hn.record("A").sqn_hn == 1
    k = w.subscribers["A"].k
    assert fiveg.unmask_sqn(vec.masked_sqn, fiveg.f5(vec.n, k)) == 1


def test_unknown_guti_gets_error():
    w = make()
    j = w.new_session()
    assert w.deliver_to_hn(j, encode_message(FiveGId(FIVEG_ID_GUTI, bytes(16)))) == ERROR_BYTES
    assert w.hn.session(j).verdict is False


def test_replayed_identity_gets_fresh_nonce():
    w = make()
    ident = w.deliver_to_ue("A", b"")
    j0, j1 = w.new_session(), w.new_session()
    v0 = decode_message(w.deliver_to_hn(j0, ident))
    v1 = decode_message(w.deliver_to_hn(j1, ident))
    assert v0.n != v1.n


def test_wrong_key_vector_gives_auth_failure():
    w = make()
    j = w.new_session()
    vec = w.deliver_to_hn(j, w.deliver_to_ue("B", b""))
    w.deliver_to_ue("A", b"")
    assert decode_message(w.deliver_to_ue("A", vec)) == AuthFailure()
    assert w.subscribers["A"].e_auth is FAIL


def test_replay_triggers_resync_and_hn_recovers():
    w = make()
    j = w.new_session()
    w.deliver_to_ue("A", b"")
    ident = w.deliver_to_ue("A", b"")
    vec = w.deliver_to_hn(j, ident)
    res = w.deliver_to_ue("A", vec)
    w.deliver_to_hn(j, res)
    # replay the same vector in a later session
    w.deliver_to_ue("A", b"")
    resync = decode_message(w.deliver_to_ue("A", vec))
    assert isinstance(resync, ResyncRequest)
    ue_sqn = w.subscribers["A"].sqn_ue
    # deliver the resync to a session that sent that vector's nonce
    hn = w.hn.with_session(7, nonce=decode_message(vec).n, b_auth="A",
                           phase=HnPhase.AWAIT_RESPONSE, sqn_sent=1)
    hn, ok = fiveg.fg_hn_finalize(hn, 7, resync)
    assert not ok and hn.record("A").sqn_hn == ue_sqn + 1


def test_garbage_resync_leaves_counter():
    w = make()
    j = w.new_session()
    w.deliver_to_hn(j, w.deliver_to_ue("A", b""))
    before = w.hn.record("A").sqn_hn
    assert w.deliver_to_hn(j, encode_message(ResyncRequest(bytes(16), bytes(16)))) == ERROR_BYTES
    assert w.hn.record("A").sqn_hn == before


def test_window_rejects_far_ahead_counter():
    w = make(window_c=4)
    st = w.subscribers["A"].update(phase=UePhase.AWAIT_VECTOR)
    n = bytes(range(16))
    for sqn, accepted in [(4, True), (5, False)]:
        vec = FiveGAuthVector(n, xor(sqn_bytes(sqn), fiveg.f5(n, st.k)), fiveg.f1(sqn, n, st.k))
        _, out = fiveg.fg_ue_verify(st, vec)
        assert isinstance(out, FiveGRes) is accepted


def test_bad_response_fails_session():
    w = make()
    j = w.new_session()
    w.deliver_to_ue("A", b"")
    w.deliver_to_hn(j, w.deliver_to_ue("A", b""))
    assert w.deliver_to_hn(j, encode_message(FiveGRes(bytes(16)))) == ERROR_BYTES
    assert w.hn.session(j).e_auth is FAIL


def test_verify_outside_session_is_illegal():
    w = make()
    with pytest.raises(IllegalStep):
        fiveg.fg_ue_verify(w.subscribers["A"], FiveGRes(bytes(16)))


def test_forged_guti_assignment_rejected():
    w = make()
    j = w.new_session()
    vec = w.deliver_to_hn(j, w.deliver_to_ue("A", b""))
    w.deliver_to_ue("A", vec)
    assert w.subscribers["A"].phase is UePhase.AWAIT_GUTI
    forged = encode_message(RefreshAssign(bytes(16), bytes(16)))
    assert w.deliver_to_ue("A", forged) == ERROR_BYTES
    st = w.subscribers["A"]
    assert st.guti_ue is None and not st.success_ue and st.phase is UePhase.IDLE
