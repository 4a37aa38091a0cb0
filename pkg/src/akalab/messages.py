"""The message union of all three protocols and its wire encoding.

Layout: one variant byte, then each field in declaration order as a 2-byte
big-endian length followed by the field bytes.  Identity fields are UTF-8.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import ClassVar


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class Message:
    TAG: ClassVar[int] = -1


_REGISTRY: dict[int, type] = {}


def _variant(tag: int):
    def wrap(cls):
        cls.TAG = tag
        _REGISTRY[tag] = cls
        return dataclass(frozen=True)(cls)
    return wrap


@_variant(1)
class ChallengeRequest(Message):
    pass


@_variant(2)
class HnNonce(Message):
    n: bytes


@_variant(3)
class SupiResponse(Message):
    ciphertext: bytes
    mac1: bytes


@_variant(4)
class SupiConfirm(Message):
    mac2: bytes


@_variant(5)
class GutiId(Message):
    guti: bytes


@_variant(6)
class NoSuci(Message):
    pass


@_variant(7)
class GutiAuthVector(Message):
    n: bytes
    masked_sqn: bytes
    mac3: bytes


@_variant(8)
class GutiConfirm(Message):
    mac4: bytes


@_variant(9)
class RefreshAssign(Message):
    masked_guti: bytes
    mac5: bytes


@_variant(10)
class Ok(Message):
    pass


@_variant(11)
class Error(Message):
    pass


@_variant(12)
class AuthFailure(Message):
    pass


@_variant(13)
class ResyncRequest(Message):
    masked_sqn: bytes
    mac: bytes


@_variant(14)
class PlainImsi(Message):
    id: str


@_variant(15)
class Tmsi(Message):
    guti: bytes


@_variant(16)
class PermanentIdRequest(Message):
    pass


@_variant(17)
class FiveGId(Message):
    # kind 0: a GUTI value, kind 1: an encrypted permanent identity
    kind: int
    payload: bytes


@_variant(18)
class FiveGAuthVector(Message):
    n: bytes
    masked_sqn: bytes
    mac: bytes


@_variant(19)
class FiveGRes(Message):
    mac: bytes


@_variant(20)
class PrivConfirm(Message):
    mac: bytes


FIVEG_ID_GUTI = 0
FIVEG_ID_SUCI = 1

VARIANTS: tuple[type, ...] = tuple(_REGISTRY[t] for t in sorted(_REGISTRY))


def encode_message(m: Message) -> bytes:
    out = bytearray((m.TAG,))
    for f in fields(m):
        v = getattr(m, f.name)
        if isinstance(v, str):
            v = v.encode()
        elif isinstance(v, int):
            v = bytes((v,))
        out += len(v).to_bytes(2, "big") + v
    if len(out) >= 1 << 16:
        raise ValueError("encoded message too long")
    return bytes(out)


def decode_message(b: bytes) -> Message:
    if not b:
        raise DecodeError("empty message")
    cls = _REGISTRY.get(b[0])
    if cls is None:
        raise DecodeError(f"unknown variant tag {b[0]}")
    pos = 1
    values = {}
    for f in fields(cls):
        if pos + 2 > len(b):
            raise DecodeError("truncated length prefix")
        n = int.from_bytes(b[pos:pos + 2], "big")
        pos += 2
        if pos + n > len(b):
            raise DecodeError("truncated field")
        raw = b[pos:pos + n]
        pos += n
        if f.type == "str":
            try:
                values[f.name] = raw.decode()
            except UnicodeDecodeError as exc:
                raise DecodeError("identity is not UTF-8") from exc
        elif f.type == "int":
            if n != 1:
                raise DecodeError("bad integer field")
            values[f.name] = raw[0]
        else:
            values[f.name] = raw
    if pos != len(b):
        raise DecodeError("trailing bytes")
    return cls(**values)
