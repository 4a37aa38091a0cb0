"""Symbolic action traces.

An action trace abstracts a run of the AKA+ game into the oracle calls it
made: ``PUAI(A,0,1)`` is subscriber A's second SUPI message in its session
0, ``CNAI(3,1)`` the network's second GUTI message in session 3, and
``NS(A,2)`` a draw that re-keys A's identity.  A trace is valid when it
interleaves runs of one automaton per identity and one per network
session, where network session j may only start after session j-1.
"""

from __future__ import annotations

import os
import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _tracekernel_py
from .messages import (ChallengeRequest, Error, GutiAuthVector, GutiConfirm,
                       GutiId, HnNonce, NoSuci, Ok, RefreshAssign, SupiConfirm, SupiResponse,
                       decode_message)
from .transcript import DRAW, NET_TO_UE, UE_TO_NET, Transcript

_kernel = None
if os.environ.get("AKALAB_PURE") != "1":
    try:
        from . import _tracekernel as _kernel
    except ImportError:
        _kernel = None
KERNEL_NAME = "compiled" if _kernel is not None else "python"
kernel = _kernel if _kernel is not None else _tracekernel_py

UE_KINDS = ("NS", "PUAI", "CUAI", "FUAI")
HN_KINDS = ("PNAI", "CNAI", "FNAI")
KIND_CODE = {k: n for n, k in enumerate(UE_KINDS + HN_KINDS)}
# number of message positions per kind; None means the kind takes no index
_POSITIONS = {"NS": None, "PUAI": 3, "CUAI": 2, "FUAI": None,
              "PNAI": 2, "CNAI": 2, "FNAI": None}

DEFAULT_COPIES = 8


class TraceSyntaxError(ValueError):
    pass


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class Action:
    kind: str
    j: int
    ident: Optional[str] = None
    i: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in KIND_CODE:
            raise TraceSyntaxError(f"unknown action kind {self.kind!r}")
        if (self.ident is None) != (self.kind in HN_KINDS):
            raise TraceSyntaxError(f"{self.kind} identity mismatch")
        n = _POSITIONS[self.kind]
        if (n is None) != (self.i is None) or (n is not None and not 0 <= self.i < n):
            raise TraceSyntaxError(f"bad message index for {self.kind}")
        if self.j < 0:
            raise TraceSyntaxError("negative session number")

    @property
    def is_ue(self) -> bool:
        return self.ident is not None

    def rename(self, ident: str) -> "Action":
        return Action(self.kind, self.j, ident, self.i)

    def __str__(self) -> str:
        args = ([self.ident] if self.ident is not None else []) + [str(self.j)]
        if self.i is not None:
            args.append(str(self.i))
        return f"{self.kind}({','.join(args)})"


_ACTION_RE = re.compile(r"^([A-Z]+)\(([^()\s]*)\)$")


def parse_action(text: str) -> Action:
    m = _ACTION_RE.match(text.strip())
    if not m:
        raise TraceSyntaxError(f"cannot parse action {text!r}")
    kind, args = m.group(1), m.group(2).split(",")
    if kind not in KIND_CODE:
        raise TraceSyntaxError(f"unknown action kind {kind!r}")
    ident = None
    if kind in UE_KINDS:
        if not args or not args[0]:
            raise TraceSyntaxError(f"{text!r}: missing identity")
        ident, args = args[0], args[1:]
    try:
        nums = [int(a) for a in args]
    except ValueError:
        raise TraceSyntaxError(f"{text!r}: non-numeric argument") from None
    if len(nums) not in (1, 2):
        raise TraceSyntaxError(f"{text!r}: wrong number of arguments")
    return Action(kind, nums[0], ident, nums[1] if len(nums) == 2 else None)


@dataclass(frozen=True)
class ActionTrace:
    actions: tuple[Action, ...] = ()
    copies: int = DEFAULT_COPIES

    @classmethod
    def parse(cls, text: str, copies: int = DEFAULT_COPIES) -> "ActionTrace":
        return cls(tuple(parse_action(tok) for tok in text.split()), copies)

    def __str__(self) -> str:
        return " ".join(map(str, self.actions))

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def identities(self) -> list[str]:
        """Identities in order of first appearance."""
        return list(dict.fromkeys(a.ident for a in self.actions if a.is_ue))


def _encode(actions: Sequence[Action]) -> tuple[np.ndarray, int, int]:
    ids = {x: n for n, x in enumerate(dict.fromkeys(a.ident for a in actions if a.is_ue))}
    rows = np.array([(KIND_CODE[a.kind], ids.get(a.ident, -1), a.j, a.i or 0) for a in actions],
                    dtype=np.int32).reshape(-1, 4)
    n_sess = 1 + max((a.j for a in actions if not a.is_ue), default=0)
    return np.ascontiguousarray(rows), len(ids), n_sess


def validate_trace(t: ActionTrace | Sequence[Action]) -> tuple[bool, Optional[int]]:
    """``(True, None)`` if valid, else ``(False, index of the first bad action)``."""
    actions = t.actions if isinstance(t, ActionTrace) else tuple(t)
    rows, n_ids, n_sess = _encode(actions)
    pos = kernel.first_violation(rows, n_ids, n_sess)
    return (True, None) if pos < 0 else (False, int(pos))


# -- copies of identities ---------------------------------------------------

def nu(t: ActionTrace, ident: str) -> str:
    """The copy of ``ident`` that is current after ``t``: one step per draw."""
    count = sum(1 for a in t.actions if a.kind == "NS" and a.ident == ident)
    return copy_name(ident, count)


def copy_name(ident: str, n: int) -> str:
    return ident if n == 0 else f"{ident}.{n}"


def ufresh(t: ActionTrace) -> ActionTrace:
    """Rename identities so every draw starts a brand-new copy.

    From each ``NS`` of an identity onwards (that action included) its
    actions are attributed to the next copy.
    """
    ns = {}
    for a in t.actions:
        if a.kind == "NS":
            ns[a.ident] = ns.get(a.ident, 0) + 1
    for ident, n in ns.items():
        if n > t.copies:
            raise ValueError(f"{ident} is drawn {n} times but only {t.copies} copies exist")
    taken = set(t.identities)
    current = {x: x for x in taken}
    seen = {x: 0 for x in taken}
    out = []
    for a in t.actions:
        if not a.is_ue:
            out.append(a)
            continue
        if a.kind == "NS":
            seen[a.ident] += 1
            fresh = copy_name(a.ident, seen[a.ident])
            if fresh in taken:
                raise ValueError(f"copy name {fresh!r} collides with an identity in the trace")
            current[a.ident] = fresh
        out.append(a.rename(current[a.ident]))
    return ActionTrace(tuple(out), t.copies)


def canonical(t: ActionTrace) -> ActionTrace:
    """Rename identities to ``I0, I1, ...`` in order of first appearance."""
    names = {x: f"I{n}" for n, x in enumerate(t.identities)}
    return ActionTrace(tuple(a.rename(names[a.ident]) if a.is_ue else a for a in t.actions),
                       t.copies)


# -- brute-force oracle -------------------------------------------------------

def alphabet(ids: Sequence[str], sessions: int) -> list[Action]:
    letters = []
    for x in ids:
        for j in range(sessions):
            letters.append(Action("NS", j, x))
            letters += [Action("PUAI", j, x, i) for i in range(3)]
            letters += [Action("CUAI", j, x, i) for i in range(2)]
            letters.append(Action("FUAI", j, x))
    for j in range(sessions):
        letters += [Action("PNAI", j, None, i) for i in range(2)]
        letters += [Action("CNAI", j, None, i) for i in range(2)]
        letters.append(Action("FNAI", j))
    return letters


def _subscriber_edges(x: str, sessions: int) -> dict:
    """Explicit edge list of one identity's automaton.

    States are named by the last action read (None initially).  Session j
    can be entered from the initial state or from any state of an earlier
    session, by either sub-protocol's first message, a late SUPI message or
    a draw; within a session the sub-protocol chains run to FUAI.
    """
    def entries(j):
        return {Action("PUAI", j, x, 0), Action("PUAI", j, x, 1),
                Action("CUAI", j, x, 0), Action("NS", j, x)}

    edges: dict = {None: set().union(*(entries(j) for j in range(sessions)))}
    for j in range(sessions):
        later = set().union(set(), *(entries(k) for k in range(j + 1, sessions)))
        p = [Action("PUAI", j, x, i) for i in range(3)]
        c = [Action("CUAI", j, x, i) for i in range(2)]
        fin = Action("FUAI", j, x)
        chain = {p[0]: {p[1]}, p[1]: {p[2]}, p[2]: {fin}, c[0]: {c[1]}, c[1]: {fin},
                 fin: set(), Action("NS", j, x): set()}
        for state, nxt in chain.items():
            edges[state] = nxt | later
    return edges


def _network_edges(j: int) -> dict:
    p0, p1 = Action("PNAI", j, None, 0), Action("PNAI", j, None, 1)
    c0, c1 = Action("CNAI", j, None, 0), Action("CNAI", j, None, 1)
    fin = Action("FNAI", j)
    return {None: {p0, c0}, p0: {p1}, p1: {fin}, c0: {c1}, c1: {fin}, fin: set()}


@dataclass
class ProductOracle:
    """Reachable product of all component automata, as a dense transition table."""
    ids: tuple[str, ...]
    sessions: int
    letters: list[Action] = field(init=False)
    table: np.ndarray = field(init=False, repr=False)
    states: list = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.letters = alphabet(self.ids, self.sessions)
        comps = [_subscriber_edges(x, self.sessions) for x in self.ids]
        comps += [_network_edges(j) for j in range(self.sessions)]
        owner = {}
        for c, edges in enumerate(comps):
            for nxt in edges.values():
                for a in nxt:
                    owner[a] = c
        first_hn = len(self.ids)
        start = (None,) * len(comps)
        index = {start: 0}
        self.states = [start]
        rows = []
        queue = deque([start])
        while queue:
            state = queue.popleft()
            row = []
            for a in self.letters:
                c = owner[a]
                ok = a in comps[c][state[c]]
                if ok and not a.is_ue and a.j > 0 and state[first_hn + a.j - 1] is None:
                    ok = False
                if not ok:
                    row.append(-1)
                    continue
                nxt = state[:c] + (a,) + state[c + 1:]
                if nxt not in index:
                    index[nxt] = len(self.states)
                    self.states.append(nxt)
                    queue.append(nxt)
                row.append(index[nxt])
            rows.append(row)
        self.table = np.ascontiguousarray(np.array(rows, dtype=np.int32))

    def check(self, actions: Sequence[Action]) -> tuple[bool, Optional[int]]:
        pos = {a: n for n, a in enumerate(self.letters)}
        s = 0
        for k, a in enumerate(actions):
            if a not in pos:
                return False, k
            s = int(self.table[s, pos[a]])
            if s < 0:
                return False, k
        return True, None

    def encoded_alphabet(self) -> np.ndarray:
        ids = {x: n for n, x in enumerate(self.ids)}
        return np.ascontiguousarray(np.array(
            [(KIND_CODE[a.kind], ids.get(a.ident, -1), a.j, a.i or 0) for a in self.letters],
            dtype=np.int32))


@dataclass(frozen=True)
class SweepResult:
    max_len: int
    valid_traces: int
    checks: int
    mismatches: int
    first_mismatch: Optional[ActionTrace]


def exhaustive_check(ids: Sequence[str] = ("A", "B"), sessions: int = 2, max_len: int = 8,
                     impl=None) -> SweepResult:
    """Compare the validator with the product oracle on every trace up to ``max_len``.

    Both deciders are prefix-closed, so it is enough to test every
    one-letter extension of every trace both accept: any other trace has a
    shortest rejected prefix that is such an extension, and the position of
    that letter is the first-violation index for both.  The identity order
    matches :func:`validate_trace`'s first-appearance numbering only up to
    renaming, which the validator is insensitive to.
    """
    oracle = ProductOracle(tuple(ids), sessions)
    impl = impl or kernel
    valid, checks, bad, first = impl.sweep(oracle.table, oracle.encoded_alphabet(),
                                           len(ids), sessions, max_len)
    trace = None if first is None else ActionTrace(tuple(oracle.letters[a] for a in first))
    return SweepResult(max_len, int(valid), int(checks), int(bad), trace)


# -- random valid traces ----------------------------------------------------

def random_valid_trace(rng: random.Random, ids: Sequence[str] = ("A", "B"),
                       ue_sessions: int = 4, hn_sessions: int = 3, length: int = 12,
                       copies: int = DEFAULT_COPIES) -> ActionTrace:
    """A random walk that only takes letters the validator accepts."""
    letters = [a for a in alphabet(ids, max(ue_sessions, hn_sessions))
               if (a.is_ue and a.j < ue_sessions) or (not a.is_ue and a.j < hn_sessions)]
    index = {x: n for n, x in enumerate(ids)}
    py = _tracekernel_py
    st = py.initial_state(len(ids), hn_sessions)
    out = []
    for _ in range(length):
        options = []
        for a in letters:
            trial = st.copy()
            if py.step(trial, len(ids), KIND_CODE[a.kind], index.get(a.ident, -1), a.j, a.i or 0):
                options.append((a, trial))
        if not options:
            break
        a, st = rng.choice(options)
        out.append(a)
    return ActionTrace(tuple(out), copies)


# -- projection of concrete runs ----------------------------------------------

def project(tr: Transcript) -> ActionTrace:
    """Map an AKA+ transcript to the action trace of the calls it records.

    Each outgoing message becomes one action, chosen by the message variant
    and the sender's previous action.  Subscriber sessions are numbered per
    identity, network sessions by order of first activity, and a draw that
    invalidated the temporary identity becomes ``NS``.
    """
    out: list[Action] = []
    ue_last: dict[str, Optional[Action]] = {}
    ue_count: dict[str, int] = {}
    hn_last: dict[str, Optional[Action]] = {}
    hn_number: dict[str, int] = {}

    def new_ue_session(x: str) -> int:
        n = ue_count.get(x, 0)
        ue_count[x] = n + 1
        return n

    for ev in tr:
        party, _, name = ev.endpoint.partition(":")
        if ev.dir == DRAW:
            if ev.data == b"\x01":
                a = Action("NS", new_ue_session(name), name)
                ue_last[name] = a
                out.append(a)
            continue
        if party == "ue" and ev.dir == UE_TO_NET:
            a = _ue_action(name, decode_message(ev.data), ue_last.get(name), new_ue_session)
            ue_last[name] = a
            out.append(a)
        elif party == "hn" and ev.dir == NET_TO_UE:
            if name not in hn_number:
                hn_number[name] = len(hn_number)
            a = _hn_action(hn_number[name], decode_message(ev.data), hn_last.get(name))
            hn_last[name] = a
            out.append(a)
    return ActionTrace(tuple(out))


def _ue_action(x: str, m, last: Optional[Action], new_session) -> Action:
    if isinstance(m, ChallengeRequest):
        return Action("PUAI", new_session(x), x, 0)
    if isinstance(m, (GutiId, NoSuci)):
        return Action("CUAI", new_session(x), x, 0)
    if last is None:
        raise ProjectionError(f"{x}: {type(m).__name__} outside a session")
    if isinstance(m, SupiResponse) and last.kind == "PUAI" and last.i == 0:
        return Action("PUAI", last.j, x, 1)
    if isinstance(m, GutiConfirm) and last.kind == "CUAI" and last.i == 0:
        return Action("CUAI", last.j, x, 1)
    if isinstance(m, (Ok, Error)):
        if last.kind == "PUAI" and last.i == 1:
            return Action("PUAI", last.j, x, 2)
        if last.kind == "CUAI" and last.i == 0:
            return Action("CUAI", last.j, x, 1)
        if (last.kind, last.i) in (("PUAI", 2), ("CUAI", 1)):
            return Action("FUAI", last.j, x)
    raise ProjectionError(f"{x}: {type(m).__name__} after {last}")


def _hn_action(j: int, m, last: Optional[Action]) -> Action:
    if isinstance(m, HnNonce):
        return Action("PNAI", j, None, 0)
    if isinstance(m, GutiAuthVector):
        return Action("CNAI", j, None, 0)
    prev = None if last is None else (last.kind, last.i)
    if isinstance(m, (SupiConfirm, Error)) and prev == ("PNAI", 0):
        return Action("PNAI", j, None, 1)
    if isinstance(m, (Ok, Error)) and prev == ("CNAI", 0):
        return Action("CNAI", j, None, 1)
    if isinstance(m, (RefreshAssign, Error)) and prev in (("PNAI", 1), ("CNAI", 1)):
        return Action("FNAI", j)
    raise ProjectionError(f"session {j}: {type(m).__name__} after {last}")


# -- authentication monitors ----------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str       # "user-auth", "network-auth" or "injectivity"
    step: int
    detail: str


def monitor_auth(log) -> list[Violation]:
    """Check mutual authentication over a run's slot-change log.

    ``log`` is a world (its ``auth_log`` is used) or an iterable of
    :class:`~akalab.world.AuthEvent`.

    * user-auth: a network session ending with identity X must follow X
      having begun a session on that session's challenge.
    * network-auth: a subscriber ending on challenge n must follow a network
      session with challenge n having begun with its identity.
    * injectivity: no two subscribers ever end on the same challenge.
    """
    events: Iterable = getattr(log, "auth_log", log)
    ue_began: set = set()
    hn_began: set = set()
    finished: dict[bytes, str] = {}
    out = []
    for ev in events:
        key = (ev.supi, ev.nonce)
        if ev.kind == "ue_b":
            ue_began.add(key)
        elif ev.kind == "hn_b":
            hn_began.add(key)
        elif ev.kind == "hn_e":
            if key not in ue_began:
                out.append(Violation("user-auth", ev.step,
                                     f"session {ev.j} accepted {ev.supi} without its participation"))
        elif ev.kind == "ue_e":
            if key not in hn_began:
                out.append(Violation("network-auth", ev.step,
                                      f"{ev.supi} accepted challenge {ev.nonce.hex()} from no session"))
            other = finished.setdefault(ev.nonce, ev.supi)
            if other != ev.supi:
                out.append(Violation("injectivity", ev.step,
                                     f"{ev.supi} and {other} both accepted {ev.nonce.hex()}"))
    return out

