import pytest
from hypothesis import given, strategies as st

from akalab.messages import (VARIANTS, DecodeError, Error, FiveGId, HnNonce, Message, Ok,
                             PlainImsi, decode_message, encode_message)
from dataclasses import fields


def _values(cls):
    parts = {}
    for f in fields(cls):
        if f.type == "str":
            parts[f.name] = st.text(min_size=1, max_size=20)
        elif f.type == "int":
            parts[f.name] = st.integers(0, 255)
        else:
            parts[f.name] = st.binary(max_size=64)
    return st.builds(cls, **parts)


messages = st.one_of(*[_values(cls) for cls in VARIANTS])


@given(messages)
def test_round_trip(m):
    assert decode_message(encode_message(m)) == m


def test_layout_by_hand():
    assert encode_message(Ok()) == bytes([10])
    assert encode_message(HnNonce(b"\xaa\xbb")) == bytes([2, 0, 2, 0xAA, 0xBB])
    assert encode_message(FiveGId(1, b"")) == bytes([17, 0, 1, 1, 0, 0])
    assert encode_message(PlainImsi("A")) == bytes([14, 0, 1, 0x41])


def test_variant_tags_are_distinct():
    assert len({cls.TAG for cls in VARIANTS}) == len(VARIANTS) == 20


@pytest.mark.parametrize("raw", [b"", b"\xff", bytes([2, 0]), bytes([2, 0, 5, 1]),
                                 bytes([10, 0]), bytes([17, 0, 2, 1, 1, 0, 0]),
                                 bytes([14, 0, 1, 0xff])])
def test_malformed_input_raises(raw):
    with pytest.raises(DecodeError):
        decode_message(raw)


@given(st.binary(max_size=40))
def test_decoder_never_crashes(raw):
    try:
        m = decode_message(raw)
    except DecodeError:
        return
    assert isinstance(m, Message)
    assert encode_message(m) == raw


def test_error_and_ok_differ_on_the_wire():
    assert encode_message(Ok()) != encode_message(Error())
