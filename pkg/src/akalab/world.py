"""The Dolev-Yao network: every message passes through the adversary.

A :class:`World` owns the subscriber states, the network state and the
transcript.  Delivering bytes to an endpoint runs exactly one step of that
party's state machine.  Input outside the party's successor relation is
rejected: the state is left untouched, the input is logged as injected and
a generic ``Error`` comes back.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

from . import akaplus, crypto, fiveg, privaka
from .core import (DEFAULT_WINDOW_C, DUMMY_ID, HarnessError, HnPhase, HnRecord, IllegalStep,
                   NetworkState, NonceSource, ProtocolMode, SubscriberState, UePhase,
                   check_identity)
from .messages import (ChallengeRequest, DecodeError, Error, GutiId, HnNonce, NoSuci,
                       PermanentIdRequest, decode_message, encode_message)
from .transcript import (DRAW, INJECTED, NET_TO_UE, UE_TO_NET, DROPPED, Transcript,
                         hn_endpoint, ue_endpoint)

ERROR_BYTES = encode_message(Error())
CHALLENGE_REQUEST = encode_message(ChallengeRequest())


@dataclass(frozen=True)
class AuthEvent:
    """A change of a b-auth / e-auth slot, recorded for the monitors.

    ``kind`` is one of ``ue_b``, ``ue_e`` (``supi`` changed its slot to
    ``nonce``) or ``hn_b``, ``hn_e`` (HN session ``j`` with challenge
    ``nonce`` changed its slot to identity ``supi``).
    """
    step: int
    kind: str
    supi: str
    nonce: bytes
    j: Optional[int] = None


class World:
    def __init__(self, mode: ProtocolMode, subscribers: dict, hn: NetworkState,
                 rng: NonceSource, window_c: int = DEFAULT_WINDOW_C,
                 step_budget: int = 1_000_000) -> None:
        self.mode = mode
        self.subscribers: dict[str, SubscriberState] = subscribers
        self.hn = hn
        self.rng = rng
        self.window_c = window_c
        self.step_budget = step_budget
        self.transcript = Transcript()
        self.auth_log: list[AuthEvent] = []
        self.observers: list[Callable[["World"], None]] = []
        self.steps = 0

    @classmethod
    def create(cls, mode: ProtocolMode, ids, seed, window_c: int = DEFAULT_WINDOW_C,
               step_budget: int = 1_000_000, initial_sqn: Optional[dict] = None) -> "World":
        """Fresh keys for every identity; ``initial_sqn`` maps an identity to
        ``(sqn_ue, sqn_hn)`` for desynchronized starts (default ``(0, 0)``)."""
        initial_sqn = initial_sqn or {}
        rng = NonceSource(f"{seed}/protocol")
        keys = crypto.pke_keygen(rng)
        subs, records = {}, {}
        for supi in ids:
            check_identity(supi)
            if supi in subs or supi == DUMMY_ID:
                raise ValueError(f"duplicate or reserved identity {supi!r}")
            k, mk = rng.randbytes(), rng.randbytes()
            sqn_ue, sqn_hn = initial_sqn.get(supi, (0, 0))
            subs[supi] = SubscriberState(supi, k, mk, keys.pk, mode, sqn_ue=sqn_ue,
                                         window_c=window_c)
            records[supi] = HnRecord(k, mk, sqn_hn=sqn_hn)
        if mode.is_aka_plus:
            records[DUMMY_ID] = HnRecord(rng.randbytes(), rng.randbytes())
        return cls(mode, subs, NetworkState(keys.sk, keys.pk, records), rng, window_c, step_budget)

    # -- adversary interface ----------------------------------------------

    def new_session(self) -> int:
        j = len(self.hn.sessions)
        self.hn = self.hn.with_session(j)
        return j

    def deliver_to_ue(self, supi: str, data: bytes) -> bytes:
        st = self.subscribers[supi]
        ep = ue_endpoint(supi)
        try:
            new, reply = self._ue_step(st, data)
        except (IllegalStep, DecodeError):
            self.transcript.append(INJECTED, ep, data)
            return ERROR_BYTES
        self._tick()
        out = encode_message(reply)
        self.transcript.append(NET_TO_UE, ep, data)
        self.transcript.append(UE_TO_NET, ep, out)
        self.subscribers[supi] = new
        self._diff_ue(st, new)
        self._notify()
        return out

    def deliver_to_hn(self, j: int, data: bytes) -> bytes:
        ep = hn_endpoint(j)
        old = self.hn
        try:
            new, reply = self._hn_step(old, j, data)
        except (IllegalStep, DecodeError):
            self.transcript.append(INJECTED, ep, data)
            return ERROR_BYTES
        self._tick()
        out = encode_message(reply)
        self.transcript.append(UE_TO_NET, ep, data)
        self.transcript.append(NET_TO_UE, ep, out)
        self.hn = new
        self._diff_hn(old, new, j)
        self._notify()
        return out

    def drop(self, endpoint: str, data: bytes) -> None:
        self.transcript.append(DROPPED, endpoint, data)

    def apply_draw(self, supi: str, unlink: bool) -> None:
        """Record a draw; with ``unlink`` the temporary identity stops being usable."""
        if unlink:
            self.subscribers[supi] = self.subscribers[supi].update(success_ue=False,
                                                                   phase=UePhase.IDLE)
        self.transcript.append(DRAW, ue_endpoint(supi), b"\x01" if unlink else b"\x00")
        self._notify()

    # -- dispatch ---------------------------------------------------------

    def _ue_step(self, st: SubscriberState, data: bytes):
        if self.mode.is_aka_plus:
            if data == b"":
                return akaplus.ue_guti_start(st)
            m = decode_message(data)
            if isinstance(m, ChallengeRequest):
                return akaplus.ue_supi_start(st)
            if st.phase is UePhase.SUPI_RESPOND:
                if not isinstance(m, HnNonce):
                    raise IllegalStep("expected a challenge")
                return akaplus.ue_supi_respond(st, m.n, self.rng)
            if st.phase is UePhase.SUPI_CONFIRM:
                return akaplus.ue_supi_confirm(st, m)
            if st.phase is UePhase.GUTI_RESPOND:
                return akaplus.ue_guti_respond(st, m)
            if st.phase is UePhase.REFRESH_WAIT:
                return akaplus.ue_refresh(st, m)
            raise IllegalStep("subscriber is idle")
        if data == b"":
            return fiveg.fg_ue_identify(st, self.rng)
        m = decode_message(data)
        if isinstance(m, PermanentIdRequest):
            return st, fiveg.fg_ue_handle_permanent_id_request(st)
        if self.mode is ProtocolMode.PRIV_AKA:
            return privaka.priv_ue_verify(st, m)
        if st.phase is UePhase.AWAIT_GUTI:
            return fiveg.fg_ue_accept_guti(st, m)
        return fiveg.fg_ue_verify(st, m)

    def _hn_step(self, hn: NetworkState, j: int, data: bytes):
        sess = hn.sessions.get(j)
        if sess is None:
            raise IllegalStep(f"no session {j}")
        if self.mode.is_aka_plus:
            if sess.phase is HnPhase.REFRESH:
                return akaplus.hn_refresh(hn, j)
            m = decode_message(data)
            if sess.phase is HnPhase.NEW:
                if isinstance(m, ChallengeRequest):
                    return akaplus.hn_supi_challenge(hn, j, self.rng)
                if isinstance(m, (GutiId, NoSuci)):
                    return akaplus.hn_guti_challenge(hn, j, m, self.rng)
                raise IllegalStep("expected a session opener")
            if sess.phase is HnPhase.SUPI_VERIFY:
                return akaplus.hn_supi_verify(hn, j, m)
            if sess.phase is HnPhase.GUTI_CONFIRM:
                return akaplus.hn_guti_confirm(hn, j, m, self.mode)
            raise IllegalStep(f"session {j} is closed")
        m = decode_message(data)
        priv = self.mode is ProtocolMode.PRIV_AKA
        if sess.phase is HnPhase.NEW:
            if priv:
                return privaka.priv_hn_vector(hn, j, m, self.rng)
            legacy = self.mode is ProtocolMode.FIVEG_AKA_LEGACY
            return fiveg.fg_hn_auth_vector(hn, j, m, self.rng, legacy)
        if priv:
            return privaka.priv_hn_commit(hn, j, m)
        hn, ok = fiveg.fg_hn_finalize(hn, j, m)
        return hn, fiveg.fg_hn_guti_message(hn, j) if ok else Error()

    # -- bookkeeping ------------------------------------------------------

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_budget:
            raise HarnessError("step budget exhausted")

    def _notify(self) -> None:
        for obs in self.observers:
            obs(self)

    def _diff_ue(self, old: SubscriberState, new: SubscriberState) -> None:
        for slot in ("b", "e"):
            before, after = getattr(old, f"{slot}_auth"), getattr(new, f"{slot}_auth")
            if after != before and isinstance(after, bytes):
                self.auth_log.append(AuthEvent(self.steps, f"ue_{slot}", new.id, after))

    def _diff_hn(self, old: NetworkState, new: NetworkState, j: int) -> None:
        before, after = old.sessions[j], new.sessions[j]
        for slot in ("b", "e"):
            a = getattr(after, f"{slot}_auth")
            if a != getattr(before, f"{slot}_auth") and isinstance(a, str) and a != DUMMY_ID:
                self.auth_log.append(AuthEvent(self.steps, f"hn_{slot}", a, after.nonce, j))


# -- honest executions ------------------------------------------------------

def _accepted(world: World, supi: str, j: int) -> bool:
    sess = world.hn.sessions[j]
    return sess.e_auth == supi and world.subscribers[supi].e_auth == sess.nonce


def honest_session(world: World, supi: str) -> Iterator[None]:
    """One honest session for ``supi``, one network step per ``next()``.

    The generator's return value tells whether both sides authenticated.
    """
    ue = lambda data: world.deliver_to_ue(supi, data)  # noqa: E731
    hn = lambda data: world.deliver_to_hn(j, data)  # noqa: E731
    j = world.new_session()
    mode = world.mode
    if mode.is_aka_plus:
        guti = world.subscribers[supi].success_ue
        m = ue(b"" if guti else CHALLENGE_REQUEST); yield
        m = hn(m); yield
        m = ue(m); yield
        m = hn(m); yield
        if not guti:
            ue(m); yield
        m = hn(b""); yield
        ue(m); yield
    else:
        m = ue(b""); yield
        m = hn(m); yield
        m = ue(m); yield
        m = hn(m); yield
        if mode is not ProtocolMode.PRIV_AKA:
            ue(m); yield
    return _accepted(world, supi, j)


def run_honest_schedule(world: World, sessions_per_subscriber: int,
                        rng: Union[random.Random, int, str]) -> list[bool]:
    """Interleave honest sessions of all subscribers at random.

    Each subscriber runs its sessions one after another; steps of
    different subscribers interleave freely.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    remaining = {s: sessions_per_subscriber for s in world.subscribers}
    running: dict[str, Iterator[None]] = {}
    results = []
    while remaining or running:
        for s in [s for s, n in remaining.items() if n > 0 and s not in running]:
            running[s] = honest_session(world, s)
            remaining[s] -= 1
        remaining = {s: n for s, n in remaining.items() if n > 0}
        if not running:
            continue
        s = rng.choice(sorted(running))
        try:
            next(running[s])
        except StopIteration as stop:
            results.append(bool(stop.value))
            del running[s]
    return results


def sqn_dominance_holds(world: World) -> bool:
    """The network never runs ahead of a subscriber's counter."""
    return all(world.hn.record(s).sqn_hn <= st.sqn_ue for s, st in world.subscribers.items())
