"""Keyed primitives shared by every protocol in the lab.

All symmetric functions are one keyed PRF (BLAKE2b, 16-byte output) with a
one-byte domain tag prepended to the input.  Tags 1-5 are the integrity
functions, 6 and 7 the two masking functions, and the remaining reserved
tags cover the 5G-AKA functions and the simulated public-key scheme.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
import random

SIZE = 16

# Reserved domain tags.  A tag value is never reused for two purposes.
TAG_F = 6
TAG_FR = 7
TAG_5G_F1 = 8
TAG_5G_F2 = 9
TAG_5G_F5 = 10
TAG_5G_F1_STAR = 11
TAG_5G_F5_STAR = 12
TAG_PRIV_CONFIRM = 13
TAG_PK = 14
TAG_PKE_STREAM = 15
TAG_PKE_AUTH = 16


class DecryptFailure(Exception):
    """Raised when a ciphertext does not authenticate under the given key."""


def prf(tag: int, msg: bytes, key: bytes) -> bytes:
    """The single keyed PRF.  ``tag`` occupies the first input byte."""
    if not 0 <= tag < 256:
        raise ValueError(f"tag out of range: {tag}")
    return hashlib.blake2b(bytes((tag,)) + msg, key=key, digest_size=SIZE).digest()


def pack(*parts: bytes) -> bytes:
    """Injective tuple encoding: 2-byte big-endian length before each part."""
    out = bytearray()
    for p in parts:
        if len(p) >= 1 << 16:
            raise ValueError("tuple component too long")
        out += len(p).to_bytes(2, "big")
        out += p
    return bytes(out)


def xor(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("xor operands differ in length")
    return bytes(x ^ y for x, y in zip(a, b))


def _check_key(key: bytes) -> None:
    if len(key) != SIZE:
        raise ValueError(f"keys are {SIZE} bytes, got {len(key)}")


def mac_tagged(tag: int, msg: bytes, key: bytes) -> bytes:
    """Integrity function number ``tag`` (1..5) of ``msg`` under ``key``."""
    if tag not in (1, 2, 3, 4, 5):
        raise ValueError(f"mac tag must be in 1..5, got {tag}")
    _check_key(key)
    return prf(tag, msg, key)


def mask_f(n: bytes, key: bytes) -> bytes:
    """Keystream used to conceal sequence numbers."""
    _check_key(key)
    return prf(TAG_F, n, key)


def mask_fr(n: bytes, key: bytes) -> bytes:
    """Keystream used to conceal freshly assigned temporary identities."""
    _check_key(key)
    return prf(TAG_FR, n, key)


# -- simulated randomized public-key encryption ---------------------------

@dataclass(frozen=True)
class KeyPair:
    pk: bytes
    sk: bytes


@dataclass(frozen=True)
class Ciphertext:
    r: bytes
    body: bytes
    tag: bytes

    def to_bytes(self) -> bytes:
        return self.r + self.tag + self.body

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Ciphertext":
        if len(raw) < 2 * SIZE:
            raise ValueError("ciphertext too short")
        return cls(r=raw[:SIZE], tag=raw[SIZE:2 * SIZE], body=raw[2 * SIZE:])


def public_from_secret(sk: bytes) -> bytes:
    _check_key(sk)
    return prf(TAG_PK, b"pk", sk)


def pke_keygen(rng: random.Random) -> KeyPair:
    sk = rng.randbytes(SIZE)
    return KeyPair(pk=public_from_secret(sk), sk=sk)


def _keystream(pk: bytes, r: bytes, n: int) -> bytes:
    out = bytearray()
    block = 0
    while len(out) < n:
        out += prf(TAG_PKE_STREAM, r + block.to_bytes(4, "big"), pk)
        block += 1
    return bytes(out[:n])


def pke_enc(m: bytes, pk: bytes, r: bytes) -> Ciphertext:
    """Encrypt ``m`` with randomness ``r``.

    The same ``(m, r)`` always gives the same ciphertext; the randomness is
    carried in the clear so two encryptions under fresh ``r`` are unrelated.
    """
    if len(r) != SIZE:
        raise ValueError("encryption randomness must be 16 bytes")
    body = xor(m, _keystream(pk, r, len(m)))
    return Ciphertext(r=r, body=body, tag=prf(TAG_PKE_AUTH, pack(r, body), pk))


def pke_dec(c: Ciphertext, sk: bytes) -> bytes:
    pk = public_from_secret(sk)
    if prf(TAG_PKE_AUTH, pack(c.r, c.body), pk) != c.tag:
        raise DecryptFailure("ciphertext authentication failed")
    return xor(c.body, _keystream(pk, c.r, len(c.body)))
