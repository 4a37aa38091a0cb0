"""Identities, sequence numbers and the per-party state records."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .crypto import SIZE

SQN_MAX = (1 << 64) - 1
DEFAULT_WINDOW_C = 16
DUMMY_ID = "__dummy__"


class HarnessError(Exception):
    """A run broke a harness invariant (nonce collision, sqn overflow, ...)."""


class IllegalStep(Exception):
    """The input is outside the party's successor relation; nothing changes."""


class ProtocolMode(enum.Enum):
    FIVEG_AKA = "5g-aka"
    FIVEG_AKA_LEGACY = "5g-aka-legacy"
    PRIV_AKA = "priv-aka"
    AKA_PLUS = "aka-plus"
    AKA_PLUS_MINUS = "aka-plus-minus"

    @property
    def is_fiveg(self) -> bool:
        return self in (ProtocolMode.FIVEG_AKA, ProtocolMode.FIVEG_AKA_LEGACY)

    @property
    def is_aka_plus(self) -> bool:
        return self in (ProtocolMode.AKA_PLUS, ProtocolMode.AKA_PLUS_MINUS)


class Mark(enum.Enum):
    """Non-value markers stored in b-auth / e-auth slots."""
    FAIL = "fail"
    UNKNOWN = "unknown"

    def __repr__(self) -> str:
        return self.name


FAIL = Mark.FAIL
UNKNOWN = Mark.UNKNOWN

# UE side: None is the unset marker, otherwise a challenge nonce or FAIL.
UeAuth = Union[None, bytes, Mark]
# HN side: None, an identity string, FAIL or UNKNOWN.
HnAuth = Union[None, str, Mark]


def check_identity(supi: str) -> str:
    if not supi or len(supi.encode()) > 32 or not supi.isprintable():
        raise ValueError(f"bad identity {supi!r}")
    return supi


def sqn_suc(s: int) -> int:
    if s >= SQN_MAX:
        raise HarnessError("sequence number overflow")
    return s + 1


def range_check(sqn_ue: int, sqn_r: int, mode: ProtocolMode,
                window_c: int = DEFAULT_WINDOW_C) -> bool:
    """Sequence-number acceptance test.

    5G-AKA accepts a window strictly above the UE value; AKA+ requires
    equality.  Other modes reuse the 5G window.
    """
    if window_c < 1:
        raise ValueError("window_c must be positive")
    if mode.is_aka_plus:
        return sqn_ue == sqn_r
    return sqn_ue < sqn_r <= sqn_ue + window_c


def sqn_bytes(s: int) -> bytes:
    return s.to_bytes(SIZE, "big")


def sqn_from_bytes(b: bytes) -> int:
    return int.from_bytes(b, "big")


@dataclass(frozen=True)
class Guti:
    value: bytes
    # issuance counter on the HN side; the UE never learns it
    epoch: int = field(default=0, compare=False)


class NonceSource:
    """Seeded source of 16-byte nonces and GUTIs.

    Every value handed out is recorded; a repeat is a harness error rather
    than something a protocol should have to cope with.
    """

    def __init__(self, seed) -> None:
        self._rng = random.Random(seed)
        self._seen: set[bytes] = set()
        self._epoch = 0

    def randbytes(self, n: int = SIZE) -> bytes:
        return self._rng.randbytes(n)

    def nonce(self) -> bytes:
        n = self._rng.randbytes(SIZE)
        if n in self._seen:
            raise HarnessError("nonce collision")
        self._seen.add(n)
        return n

    def guti(self) -> Guti:
        self._epoch += 1
        return Guti(self.nonce(), self._epoch)


class UePhase(str, enum.Enum):
    IDLE = "idle"
    # AKA+
    SUPI_RESPOND = "supi-respond"      # sent a challenge request, awaiting nonce
    SUPI_CONFIRM = "supi-confirm"      # sent the encrypted identity, awaiting confirm
    GUTI_RESPOND = "guti-respond"      # sent GUTI / NoSuci, awaiting challenge
    REFRESH_WAIT = "refresh-wait"
    # 5G-AKA and PRIV-AKA
    AWAIT_VECTOR = "await-vector"
    AWAIT_GUTI = "await-guti"


# Phases in which the subscriber is waiting on the network mid-exchange.
MID_SESSION = frozenset({UePhase.SUPI_RESPOND, UePhase.SUPI_CONFIRM,
                         UePhase.GUTI_RESPOND, UePhase.AWAIT_VECTOR})


@dataclass(frozen=True)
class SubscriberState:
    id: str
    k: bytes
    mk: bytes
    pk_hn: bytes
    mode: ProtocolMode
    sqn_ue: int = 0
    guti_ue: Optional[Guti] = None
    success_ue: bool = False
    b_auth: UeAuth = None
    e_auth: UeAuth = None
    sync_ue: bool = False
    phase: UePhase = UePhase.IDLE
    # Whether the current GUTI session started with a valid GUTI, and which.
    uet_success: bool = False
    guti_at_start: Optional[Guti] = None
    window_c: int = DEFAULT_WINDOW_C

    def __post_init__(self) -> None:
        # success implies a GUTI is held
        if self.success_ue and self.guti_ue is None:
            raise HarnessError(f"{self.id}: success_ue set without a GUTI")

    def update(self, **changes) -> "SubscriberState":
        return replace(self, **changes)


@dataclass(frozen=True)
class HnRecord:
    k: bytes
    mk: bytes
    sqn_hn: int = 0
    guti_hn: Optional[Guti] = None
    s_auth: Optional[bytes] = None


class HnPhase(str, enum.Enum):
    NEW = "new"
    SUPI_VERIFY = "supi-verify"
    GUTI_CONFIRM = "guti-confirm"
    REFRESH = "refresh"
    DONE = "done"
    # 5G-AKA / PRIV-AKA
    AWAIT_RESPONSE = "await-response"


@dataclass(frozen=True)
class HnSession:
    nonce: Optional[bytes] = None
    b_auth: HnAuth = None
    e_auth: HnAuth = None
    phase: HnPhase = HnPhase.NEW
    guti_j: Optional[Guti] = None
    # 5G-AKA / PRIV-AKA bookkeeping
    sqn_sent: Optional[int] = None
    verdict: Optional[bool] = None


@dataclass(frozen=True)
class NetworkState:
    sk_hn: bytes
    pk_hn: bytes
    ids: dict = field(default_factory=dict)       # str -> HnRecord
    sessions: dict = field(default_factory=dict)  # int -> HnSession

    def record(self, supi: str) -> HnRecord:
        return self.ids[supi]

    def with_record(self, supi: str, **changes) -> "NetworkState":
        ids = dict(self.ids)
        ids[supi] = replace(ids[supi], **changes)
        return replace(self, ids=ids)

    def session(self, j: int) -> HnSession:
        return self.sessions[j]

    def with_session(self, j: int, **changes) -> "NetworkState":
        sessions = dict(self.sessions)
        sessions[j] = replace(sessions.get(j, HnSession()), **changes)
        return replace(self, sessions=sessions)

    def lookup_guti(self, value: bytes) -> Optional[str]:
        for supi, rec in self.ids.items():
            if supi != DUMMY_ID and rec.guti_hn is not None and rec.guti_hn.value == value:
                return supi
        return None

    def real_ids(self) -> list[str]:
        return [i for i in self.ids if i != DUMMY_ID]
