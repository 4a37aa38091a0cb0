"""Adversary-visible event log and its newline-delimited JSON export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

UE_TO_NET = "ue->net"
NET_TO_UE = "net->ue"
INJECTED = "inject"
DROPPED = "drop"
DRAW = "draw"

DIRECTIONS = (UE_TO_NET, NET_TO_UE, INJECTED, DROPPED, DRAW)


@dataclass(frozen=True)
class Event:
    i: int
    dir: str
    endpoint: str
    data: bytes

    def to_json(self) -> str:
        return json.dumps({"i": self.i, "dir": self.dir, "endpoint": self.endpoint,
                           "hex": self.data.hex()}, separators=(",", ":"))


def ue_endpoint(supi: str) -> str:
    return f"ue:{supi}"


def hn_endpoint(j: int) -> str:
    return f"hn:{j}"


class Transcript:
    """Append-only; event indices are dense from 0."""

    def __init__(self) -> None:
        self._events: list[Event] = []

    def append(self, direction: str, endpoint: str, data: bytes = b"") -> Event:
        if direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {direction!r}")
        ev = Event(len(self._events), direction, endpoint, bytes(data))
        self._events.append(ev)
        return ev

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __getitem__(self, i):
        return self._events[i]

    def to_jsonl(self) -> str:
        return "".join(ev.to_json() + "\n" for ev in self._events)

    @classmethod
    def from_events(cls, events: Iterable[Event]) -> "Transcript":
        t = cls()
        for ev in events:
            t.append(ev.dir, ev.endpoint, ev.data)
        return t

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        t = cls()
        for n, line in enumerate(text.splitlines()):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj["i"] != len(t):
                raise ValueError(f"line {n}: non-dense event index {obj['i']}")
            t.append(obj["dir"], obj["endpoint"], bytes.fromhex(obj["hex"]))
        return t
