"""AKA+: the SUPI, GUTI and Refresh sub-protocols.

Every function is a pure step ``(state, input) -> (state', output)``.  The
``AKA_PLUS_MINUS`` mode differs in one predicate only, the freshness test in
:func:`hn_guti_confirm`.
"""

from __future__ import annotations

from . import crypto
from .core import (DUMMY_ID, FAIL, UNKNOWN, Guti, HnPhase, IllegalStep, HnSession, NetworkState,
                   NonceSource, ProtocolMode, SubscriberState, UePhase, range_check,
                   sqn_bytes, sqn_from_bytes, sqn_suc)
from .crypto import mac_tagged, mask_f, mask_fr, pack, xor
from .messages import (ChallengeRequest, Error, GutiAuthVector, GutiConfirm, GutiId,
                       HnNonce, Message, NoSuci, Ok, RefreshAssign, SupiConfirm, SupiResponse)


def unpack(raw: bytes) -> list[bytes]:
    parts, pos = [], 0
    while pos < len(raw):
        if pos + 2 > len(raw):
            raise ValueError("truncated tuple")
        n = int.from_bytes(raw[pos:pos + 2], "big")
        if pos + 2 + n > len(raw):
            raise ValueError("truncated tuple")
        parts.append(raw[pos + 2:pos + 2 + n])
        pos += 2 + n
    return parts


def _new_session(hn: NetworkState, j: int) -> None:
    if hn.sessions.get(j, HnSession()).phase is not HnPhase.NEW:
        raise IllegalStep(f"HN session {j} already used")


# -- SUPI sub-protocol ---------------------------------------------------

def ue_supi_start(st: SubscriberState) -> tuple[SubscriberState, Message]:
    st = st.update(b_auth=None, e_auth=None, success_ue=False, guti_ue=None,
                   uet_success=False, guti_at_start=None, phase=UePhase.SUPI_RESPOND)
    return st, ChallengeRequest()


def hn_supi_challenge(hn: NetworkState, j: int, rng: NonceSource) -> tuple[NetworkState, Message]:
    _new_session(hn, j)
    n = rng.nonce()
    hn = hn.with_session(j, nonce=n, phase=HnPhase.SUPI_VERIFY, guti_j=rng.guti())
    return hn, HnNonce(n)


def ue_supi_respond(st: SubscriberState, n_r: bytes, rng: NonceSource) -> tuple[SubscriberState, Message]:
    if st.phase is not UePhase.SUPI_RESPOND:
        raise IllegalStep("no challenge expected")
    c = crypto.pke_enc(pack(st.id.encode(), sqn_bytes(st.sqn_ue)), st.pk_hn, rng.nonce()).to_bytes()
    mac1 = mac_tagged(1, pack(c, n_r), st.mk)
    # the increment happens whatever the challenge was
    st = st.update(b_auth=n_r, e_auth=FAIL, sqn_ue=sqn_suc(st.sqn_ue),
                   phase=UePhase.SUPI_CONFIRM)
    return st, SupiResponse(c, mac1)


def hn_supi_verify(hn: NetworkState, j: int, m: Message) -> tuple[NetworkState, Message]:
    sess = hn.sessions.get(j)
    if sess is None or sess.phase is not HnPhase.SUPI_VERIFY:
        raise IllegalStep(f"HN session {j} is not awaiting a SUPI response")
    reject = hn.with_session(j, b_auth=UNKNOWN, e_auth=UNKNOWN, phase=HnPhase.REFRESH)
    if not isinstance(m, SupiResponse):
        return reject, Error()
    try:
        id_raw, sqn_raw = unpack(crypto.pke_dec(crypto.Ciphertext.from_bytes(m.ciphertext), hn.sk_hn))
        id_r, sqn_r = id_raw.decode(), sqn_from_bytes(sqn_raw)
    except (crypto.DecryptFailure, ValueError):
        return reject, Error()
    for supi in hn.real_ids():
        rec = hn.record(supi)
        if id_r != supi or m.mac1 != mac_tagged(1, pack(m.ciphertext, sess.nonce), rec.mk):
            continue
        hn = hn.with_session(j, b_auth=supi, e_auth=supi, phase=HnPhase.REFRESH)
        if sqn_r >= rec.sqn_hn:
            hn = hn.with_record(supi, sqn_hn=sqn_suc(sqn_r), s_auth=sess.nonce, guti_hn=sess.guti_j)
        return hn, SupiConfirm(mac_tagged(2, pack(sess.nonce, sqn_bytes(sqn_suc(sqn_r))), rec.mk))
    return reject, Error()


def ue_supi_confirm(st: SubscriberState, m: Message) -> tuple[SubscriberState, Message]:
    if st.phase is not UePhase.SUPI_CONFIRM:
        raise IllegalStep("no confirmation expected")
    ok = (isinstance(m, SupiConfirm) and isinstance(st.b_auth, bytes)
          and m.mac2 == mac_tagged(2, pack(st.b_auth, sqn_bytes(st.sqn_ue)), st.mk))
    st = st.update(e_auth=st.b_auth if ok else FAIL, sync_ue=st.sync_ue or ok,
                   phase=UePhase.REFRESH_WAIT)
    return st, Ok() if ok else Error()


# -- GUTI sub-protocol ---------------------------------------------------

def ue_guti_start(st: SubscriberState) -> tuple[SubscriberState, Message]:
    msg = GutiId(st.guti_ue.value) if st.success_ue else NoSuci()
    st = st.update(success_ue=False, uet_success=st.success_ue, guti_at_start=st.guti_ue,
                   b_auth=FAIL, e_auth=FAIL, phase=UePhase.GUTI_RESPOND)
    return st, msg


def _guti_vector(hn: NetworkState, supi: str, n: bytes) -> GutiAuthVector:
    rec = hn.record(supi)
    guti = rec.guti_hn.value if rec.guti_hn is not None else b""
    return GutiAuthVector(n, xor(sqn_bytes(rec.sqn_hn), mask_f(n, rec.k)),
                          mac_tagged(3, pack(n, sqn_bytes(rec.sqn_hn), guti), rec.mk))


def hn_guti_challenge(hn: NetworkState, j: int, m: Message, rng: NonceSource) -> tuple[NetworkState, Message]:
    """Look the temporary identity up; on a miss answer for the dummy identity."""
    _new_session(hn, j)
    n = rng.nonce()
    hn = hn.with_session(j, nonce=n, phase=HnPhase.GUTI_CONFIRM, guti_j=rng.guti())
    supi = hn.lookup_guti(m.guti) if isinstance(m, GutiId) else None
    if supi is None:
        return hn.with_session(j, b_auth=UNKNOWN), _guti_vector(hn, DUMMY_ID, n)
    vec = _guti_vector(hn, supi, n)
    hn = hn.with_record(supi, guti_hn=None, s_auth=n)
    return hn.with_session(j, b_auth=supi), vec


def ue_guti_respond(st: SubscriberState, v: Message) -> tuple[SubscriberState, Message]:
    if st.phase is not UePhase.GUTI_RESPOND:
        raise IllegalStep("no GUTI challenge expected")
    fail = st.update(b_auth=FAIL, e_auth=FAIL, phase=UePhase.REFRESH_WAIT)
    if not isinstance(v, GutiAuthVector) or len(v.masked_sqn) != crypto.SIZE:
        return fail, Error()
    sqn_r = sqn_from_bytes(xor(v.masked_sqn, mask_f(v.n, st.k)))
    guti = st.guti_at_start.value if st.guti_at_start is not None else b""
    accept = (v.mac3 == mac_tagged(3, pack(v.n, sqn_bytes(sqn_r), guti), st.mk)
              and st.uet_success
              and range_check(st.sqn_ue, sqn_r, ProtocolMode.AKA_PLUS))
    if not accept:
        return fail, Error()
    st = st.update(b_auth=v.n, e_auth=v.n, sqn_ue=sqn_suc(st.sqn_ue), phase=UePhase.REFRESH_WAIT)
    return st, GutiConfirm(mac_tagged(4, v.n, st.mk))


def hn_guti_confirm(hn: NetworkState, j: int, m: Message,
                    mode: ProtocolMode = ProtocolMode.AKA_PLUS) -> tuple[NetworkState, Message]:
    sess = hn.sessions.get(j)
    if sess is None or sess.phase is not HnPhase.GUTI_CONFIRM:
        raise IllegalStep(f"HN session {j} is not awaiting a GUTI confirmation")
    supi = sess.b_auth
    b_mac = (isinstance(supi, str) and isinstance(m, GutiConfirm)
             and m.mac4 == mac_tagged(4, sess.nonce, hn.record(supi).mk))
    if not b_mac:
        return hn.with_session(j, e_auth=UNKNOWN, phase=HnPhase.REFRESH), Error()
    hn = hn.with_session(j, e_auth=supi, phase=HnPhase.REFRESH)
    rec = hn.record(supi)
    if mode is ProtocolMode.AKA_PLUS_MINUS:
        b_inc = True
    else:
        b_inc = rec.s_auth == sess.nonce
    if b_inc:
        hn = hn.with_record(supi, sqn_hn=sqn_suc(rec.sqn_hn), guti_hn=sess.guti_j)
    return hn, Ok()


# -- Refresh sub-protocol ------------------------------------------------

def hn_refresh(hn: NetworkState, j: int) -> tuple[NetworkState, Message]:
    sess = hn.sessions.get(j)
    if sess is None or sess.phase is not HnPhase.REFRESH:
        raise IllegalStep(f"HN session {j} has nothing to refresh")
    hn = hn.with_session(j, phase=HnPhase.DONE)
    supi = sess.e_auth
    if not isinstance(supi, str):
        return hn, Error()
    rec = hn.record(supi)
    value = sess.guti_j.value
    return hn, RefreshAssign(xor(value, mask_fr(sess.nonce, rec.k)),
                             mac_tagged(5, pack(value, sess.nonce), rec.mk))


def ue_refresh(st: SubscriberState, m: Message) -> tuple[SubscriberState, Message]:
    if st.phase is not UePhase.REFRESH_WAIT:
        raise IllegalStep("no refresh expected")
    n = st.e_auth
    accept = False
    if isinstance(m, RefreshAssign) and isinstance(n, bytes) and len(m.masked_guti) == crypto.SIZE:
        value = xor(m.masked_guti, mask_fr(n, st.k))
        accept = m.mac5 == mac_tagged(5, pack(value, n), st.mk)
    if accept:
        return st.update(guti_ue=Guti(value, 0), success_ue=True, phase=UePhase.IDLE), Ok()
    return st.update(guti_ue=None, success_ue=False, phase=UePhase.IDLE), Error()
