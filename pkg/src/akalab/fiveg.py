"""5G-AKA state machines: identification, authentication vector, MAC and
range checks, re-synchronization and GUTI assignment.  The legacy mode
sends the permanent identity in clear and answers identity requests.
"""

from __future__ import annotations

from . import crypto
from .core import (FAIL, HnPhase, IllegalStep, HnSession, NetworkState, NonceSource, ProtocolMode,
                   SubscriberState, UePhase, Guti, range_check, sqn_bytes,
                   sqn_from_bytes, sqn_suc)
from .crypto import TAG_5G_F1, TAG_5G_F1_STAR, TAG_5G_F2, TAG_5G_F5, TAG_5G_F5_STAR, prf, pack, xor
from .messages import (FIVEG_ID_GUTI, FIVEG_ID_SUCI, AuthFailure, Error, FiveGAuthVector,
                       FiveGId, FiveGRes, Message, Ok, PlainImsi, RefreshAssign,
                       ResyncRequest, Tmsi)


def f1(sqn: int, n: bytes, k: bytes) -> bytes:
    return prf(TAG_5G_F1, pack(sqn_bytes(sqn), n), k)


def f1_star(sqn: int, n: bytes, k: bytes) -> bytes:
    return prf(TAG_5G_F1_STAR, pack(sqn_bytes(sqn), n), k)


def f2(n: bytes, k: bytes) -> bytes:
    return prf(TAG_5G_F2, n, k)


def f5(n: bytes, k: bytes) -> bytes:
    return prf(TAG_5G_F5, n, k)


def f5_star(n: bytes, k: bytes) -> bytes:
    return prf(TAG_5G_F5_STAR, n, k)


def unmask_sqn(masked: bytes, stream: bytes) -> int | None:
    if len(masked) != len(stream):
        return None
    return sqn_from_bytes(xor(masked, stream))


# -- UE ------------------------------------------------------------------

def fg_ue_identify(state: SubscriberState, rng: NonceSource) -> tuple[SubscriberState, Message]:
    """Start a session by sending the GUTI if one is held, else the concealed SUPI.

    A GUTI is single-use: it is cleared as soon as it has been sent.
    """
    legacy = state.mode is ProtocolMode.FIVEG_AKA_LEGACY
    st = state.update(phase=UePhase.AWAIT_VECTOR, b_auth=None, e_auth=None)
    if state.guti_ue is not None:
        msg = Tmsi(state.guti_ue.value) if legacy else FiveGId(FIVEG_ID_GUTI, state.guti_ue.value)
        return st.update(guti_ue=None, success_ue=False), msg
    if legacy:
        return st, PlainImsi(state.id)
    c = crypto.pke_enc(state.id.encode(), state.pk_hn, rng.nonce())
    return st, FiveGId(FIVEG_ID_SUCI, c.to_bytes())


def fg_ue_handle_permanent_id_request(state: SubscriberState) -> Message:
    if state.mode is ProtocolMode.FIVEG_AKA_LEGACY:
        return PlainImsi(state.id)
    return Error()


def fg_ue_verify(state: SubscriberState, v: Message) -> tuple[SubscriberState, Message]:
    if state.phase is not UePhase.AWAIT_VECTOR:
        raise IllegalStep("no authentication vector expected")
    if not isinstance(v, FiveGAuthVector):
        raise IllegalStep("expected an authentication vector")
    idle = state.update(phase=UePhase.IDLE, e_auth=FAIL)
    sqn_r = unmask_sqn(v.masked_sqn, f5(v.n, state.k))
    if sqn_r is None or v.mac != f1(sqn_r, v.n, state.k):
        return idle, AuthFailure()
    if not range_check(state.sqn_ue, sqn_r, state.mode, state.window_c):
        resync = ResyncRequest(xor(sqn_bytes(state.sqn_ue), f5_star(v.n, state.k)),
                               f1_star(state.sqn_ue, v.n, state.k))
        return idle, resync
    st = state.update(sqn_ue=sqn_r, b_auth=v.n, e_auth=v.n, phase=UePhase.AWAIT_GUTI)
    return st, FiveGRes(f2(v.n, state.k))


def fg_ue_accept_guti(state: SubscriberState, m: Message) -> tuple[SubscriberState, Message]:
    """Store the GUTI assigned after a successful session."""
    if state.phase is not UePhase.AWAIT_GUTI:
        raise IllegalStep("no GUTI assignment expected")
    st = state.update(phase=UePhase.IDLE)
    n = state.e_auth
    if not isinstance(m, RefreshAssign) or not isinstance(n, bytes) or len(m.masked_guti) != crypto.SIZE:
        return st, Error()
    value = xor(m.masked_guti, crypto.mask_fr(n, state.k))
    if m.mac5 != crypto.mac_tagged(5, pack(value, n), state.mk):
        return st, Error()
    return st.update(guti_ue=Guti(value, 0), success_ue=True), Ok()


# -- HN ------------------------------------------------------------------

def _resolve(hn: NetworkState, id_msg: Message, legacy: bool) -> tuple[NetworkState, str | None]:
    if isinstance(id_msg, FiveGId) and id_msg.kind == FIVEG_ID_SUCI:
        try:
            plain = crypto.pke_dec(crypto.Ciphertext.from_bytes(id_msg.payload), hn.sk_hn)
            supi = plain.decode()
        except (crypto.DecryptFailure, ValueError):
            return hn, None
        return hn, supi if supi in hn.real_ids() else None
    if isinstance(id_msg, FiveGId) and id_msg.kind == FIVEG_ID_GUTI or legacy and isinstance(id_msg, Tmsi):
        value = id_msg.payload if isinstance(id_msg, FiveGId) else id_msg.guti
        supi = hn.lookup_guti(value)
        if supi is None:
            return hn, None
        return hn.with_record(supi, guti_hn=None), supi
    if legacy and isinstance(id_msg, PlainImsi):
        return hn, id_msg.id if id_msg.id in hn.real_ids() else None
    return hn, None


def fg_hn_auth_vector(hn: NetworkState, j: int, id_msg: Message, rng: NonceSource,
                      legacy: bool = False) -> tuple[NetworkState, Message]:
    """Answer an identification message with an authentication vector.

    The stored sequence number is advanced before it is sent, so the value
    in the vector is always strictly above the last one the UE accepted.
    """
    if hn.sessions.get(j, HnSession()).phase is not HnPhase.NEW:
        raise IllegalStep(f"session {j} already used")
    if not isinstance(id_msg, (FiveGId, Tmsi, PlainImsi)):
        raise IllegalStep("expected an identification message")
    hn, supi = _resolve(hn, id_msg, legacy)
    if supi is None:
        return hn.with_session(j, phase=HnPhase.DONE, verdict=False), Error()
    rec = hn.record(supi)
    sqn = sqn_suc(rec.sqn_hn)
    n = rng.nonce()
    hn = hn.with_record(supi, sqn_hn=sqn)
    hn = hn.with_session(j, nonce=n, b_auth=supi, phase=HnPhase.AWAIT_RESPONSE,
                         sqn_sent=sqn, guti_j=rng.guti())
    vec = FiveGAuthVector(n, xor(sqn_bytes(sqn), f5(n, rec.k)), f1(sqn, n, rec.k))
    return hn, vec


def fg_hn_finalize(hn: NetworkState, j: int, m: Message) -> tuple[NetworkState, bool]:
    """Process the UE's answer: a response, a re-synchronization request or junk."""
    sess = hn.sessions.get(j)
    if sess is None or sess.phase is not HnPhase.AWAIT_RESPONSE:
        raise IllegalStep(f"session {j} is not awaiting a response")
    supi = sess.b_auth
    rec = hn.record(supi)
    if isinstance(m, FiveGRes) and m.mac == f2(sess.nonce, rec.k):
        hn = hn.with_record(supi, guti_hn=sess.guti_j)
        return hn.with_session(j, e_auth=supi, phase=HnPhase.DONE, verdict=True), True
    if isinstance(m, ResyncRequest):
        sqn_star = unmask_sqn(m.masked_sqn, f5_star(sess.nonce, rec.k))
        if sqn_star is not None and m.mac == f1_star(sqn_star, sess.nonce, rec.k):
            hn = hn.with_record(supi, sqn_hn=sqn_suc(sqn_star))
    return hn.with_session(j, e_auth=FAIL, phase=HnPhase.DONE, verdict=False), False


def fg_hn_guti_message(hn: NetworkState, j: int) -> Message:
    """The masked fresh GUTI sent after a successful session."""
    sess = hn.session(j)
    if not sess.verdict:
        return Error()
    rec = hn.record(sess.e_auth)
    value = sess.guti_j.value
    return RefreshAssign(xor(value, crypto.mask_fr(sess.nonce, rec.k)),
                         crypto.mac_tagged(5, pack(value, sess.nonce), rec.mk))
