import random

import pytest
from hypothesis import given, strategies as st

from akalab import crypto
from akalab.crypto import (Ciphertext, DecryptFailure, mac_tagged, mask_f, mask_fr, pack,
                           pke_dec, pke_enc, pke_keygen, prf, public_from_secret, xor)

KEY = bytes(range(16))


def test_prf_matches_frozen_vectors():
    # digests computed once with hashlib.blake2b(tag || msg, key, 16) and frozen
    assert prf(1, b"abc", KEY).hex() == "ebf9d92a6b3f5e62296ef3a3667bdddf"
    assert mask_f(bytes(16), KEY).hex() == "48ecf370e21f39eee4361c7e70c6485f"
    assert public_from_secret(KEY).hex() == "d16bc1e70cd029e8161810237bcc8371"


def test_mac_is_prf_with_its_tag():
    assert mac_tagged(3, b"x", KEY) == prf(3, b"x", KEY)
    assert mask_fr(b"n", KEY) == prf(crypto.TAG_FR, b"n", KEY)


@pytest.mark.parametrize("tag", [0, 6, 7, 99])
def test_mac_rejects_tags_outside_the_integrity_range(tag):
    with pytest.raises(ValueError):
        mac_tagged(tag, b"", KEY)


def test_short_keys_are_rejected():
    with pytest.raises(ValueError):
        mac_tagged(1, b"", b"short")


def test_pack_layout():
    assert pack(b"a", b"") == b"\x00\x01a\x00\x00"
    assert pack() == b""


@given(st.lists(st.binary(max_size=40), max_size=5), st.lists(st.binary(max_size=40), max_size=5))
def test_pack_is_injective(a, b):
    if a != b:
        assert pack(*a) != pack(*b)


def test_xor_needs_equal_lengths():
    assert xor(b"\x0f\xf0", b"\xff\xff") == b"\xf0\x0f"
    with pytest.raises(ValueError):
        xor(b"a", b"ab")


@given(st.binary(max_size=100), st.binary(min_size=16, max_size=16))
def test_pke_round_trip(m, r):
    kp = pke_keygen(random.Random(1))
    c = pke_enc(m, kp.pk, r)
    assert pke_dec(Ciphertext.from_bytes(c.to_bytes()), kp.sk) == m


def test_pke_wrong_key_fails():
    a, b = pke_keygen(random.Random(1)), pke_keygen(random.Random(2))
    c = pke_enc(b"identity", a.pk, bytes(16))
    with pytest.raises(DecryptFailure):
        pke_dec(c, b.sk)


def test_pke_is_randomized_by_r():
    kp = pke_keygen(random.Random(3))
    assert pke_enc(b"m", kp.pk, bytes(16)) != pke_enc(b"m", kp.pk, b"\x01" * 16)


def test_every_single_bit_flip_is_rejected():
    kp = pke_keygen(random.Random(4))
    raw = pke_enc(b"sub0", kp.pk, bytes(range(16))).to_bytes()
    for bit in range(8 * len(raw)):
        bad = bytearray(raw)
        bad[bit // 8] ^= 1 << (bit % 8)
        with pytest.raises(DecryptFailure):
            pke_dec(Ciphertext.from_bytes(bytes(bad)), kp.sk)


def test_truncated_ciphertext_is_a_value_error():
    with pytest.raises(ValueError):
        Ciphertext.from_bytes(b"\x00" * 31)
