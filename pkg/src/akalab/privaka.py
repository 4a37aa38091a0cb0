"""An abstract PRIV-AKA model.

Only two behaviours are modelled: the HN commits its sequence-number
increment when the UE's final confirmation arrives, and the UE tolerates
a drift of one between the two counters but not two.
"""

from __future__ import annotations

from .core import (FAIL, HnPhase, HnSession, IllegalStep, NetworkState, NonceSource,
                   SubscriberState, UePhase, sqn_bytes, sqn_suc)
from .crypto import TAG_PRIV_CONFIRM, pack, prf, xor
from .fiveg import _resolve, f1, f5, unmask_sqn
from .messages import (AuthFailure, Error, FiveGAuthVector, FiveGId, Message, Ok,
                       PrivConfirm, decode_message, encode_message)

# largest |sqn_ue - sqn_r| the UE will still accept
DRIFT = 1


def confirm_mac(n: bytes, next_sqn: int, k: bytes) -> bytes:
    return prf(TAG_PRIV_CONFIRM, pack(n, sqn_bytes(next_sqn)), k)


def priv_hn_vector(hn: NetworkState, j: int, id_msg: Message,
                   rng: NonceSource) -> tuple[NetworkState, Message]:
    """Send the current counter without advancing it."""
    if hn.sessions.get(j, HnSession()).phase is not HnPhase.NEW:
        raise IllegalStep(f"session {j} already used")
    if not isinstance(id_msg, FiveGId):
        raise IllegalStep("expected an identification message")
    hn, supi = _resolve(hn, id_msg, legacy=False)
    if supi is None:
        return hn.with_session(j, phase=HnPhase.DONE, verdict=False), Error()
    rec = hn.record(supi)
    n = rng.nonce()
    hn = hn.with_session(j, nonce=n, b_auth=supi, phase=HnPhase.AWAIT_RESPONSE,
                         sqn_sent=rec.sqn_hn)
    return hn, FiveGAuthVector(n, xor(sqn_bytes(rec.sqn_hn), f5(n, rec.k)),
                               f1(rec.sqn_hn, n, rec.k))


def priv_ue_verify(st: SubscriberState, v: Message) -> tuple[SubscriberState, Message]:
    if st.phase is not UePhase.AWAIT_VECTOR:
        raise IllegalStep("no authentication vector expected")
    if not isinstance(v, FiveGAuthVector):
        raise IllegalStep("expected an authentication vector")
    idle = st.update(phase=UePhase.IDLE, e_auth=FAIL)
    sqn_r = unmask_sqn(v.masked_sqn, f5(v.n, st.k))
    if sqn_r is None or v.mac != f1(sqn_r, v.n, st.k):
        return idle, AuthFailure()
    if abs(st.sqn_ue - sqn_r) > DRIFT:
        return idle, Error()
    nxt = sqn_suc(sqn_r)
    st = st.update(sqn_ue=nxt, b_auth=v.n, e_auth=v.n, phase=UePhase.IDLE)
    return st, PrivConfirm(confirm_mac(v.n, nxt, st.k))


def priv_hn_commit(hn: NetworkState, j: int, m: Message) -> tuple[NetworkState, Message]:
    """Consume a confirmation.  A bad one leaves the session open and untouched."""
    sess = hn.sessions.get(j)
    if sess is None or sess.phase is not HnPhase.AWAIT_RESPONSE:
        raise IllegalStep(f"session {j} is not open")
    rec = hn.record(sess.b_auth)
    if not isinstance(m, PrivConfirm) or m.mac != confirm_mac(sess.nonce, sqn_suc(sess.sqn_sent), rec.k):
        return hn, Error()
    hn = hn.with_record(sess.b_auth, sqn_hn=sqn_suc(rec.sqn_hn))
    return hn.with_session(j, e_auth=sess.b_auth, phase=HnPhase.DONE, verdict=True), Ok()


# -- world-level helpers used by the desynchronization script -------------

def priv_run_to_confirm(world, supi: str) -> tuple[object, Message, int]:
    """Run a session up to the UE's confirmation and hand it back undelivered."""
    j = world.new_session()
    ident = world.deliver_to_ue(supi, b"")
    vector = world.deliver_to_hn(j, ident)
    reply = world.deliver_to_ue(supi, vector)
    return world, decode_message(reply), j


def priv_hn_confirm(world, j: int, m: Message) -> tuple[object, bool]:
    """Deliver a (possibly held) confirmation; True iff this delivery was accepted."""
    if j not in world.hn.sessions:
        return world, False
    reply = world.deliver_to_hn(j, encode_message(m))
    return world, decode_message(reply) == Ok()
