import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcapstego import (
    Bits,
    StegoKey,
    TimingGap,
    PayloadRegister,
    deframe_message,
    frame_message,
    key_from_json,
    key_to_json,
    parse_filter,
)
from pcapstego.carriers import (
    carrier_capacity,
    decode_gap,
    decode_value,
    encode_into_gap,
    encode_into_value,
)
from pcapstego.errors import BadMagic, BadValue, CrcMismatch, SchemaError, TruncatedStream


def crc32_bitwise(data):
    """Reference CRC-32: bit-by-bit, reflected 0xEDB88320, init/final all-ones."""
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            crc = (crc >> 1) ^ (0xEDB88320 if crc & 1 else 0)
    return crc ^ 0xFFFFFFFF


def test_empty_payload_frame():
    bits = frame_message(b"")
    assert bits.bit_len == 80
    assert bits.get(0, 16) == 0x5345
    assert bits.get(16, 32) == 0


def test_single_byte_frame_crc():
    bits = frame_message(b"\x41")
    assert bits.bit_len == 88
    assert bits.get(56, 32) == crc32_bitwise(b"\x41")


def test_frame_crc_matches_bitwise_oracle():
    rng = random.Random(8)
    for _ in range(50):
        payload = rng.randbytes(rng.randrange(0, 40))
        bits = frame_message(payload)
        assert bits.get(48 + len(payload) * 8, 32) == crc32_bitwise(payload)


@given(st.binary(max_size=200))
def test_frame_deframe_roundtrip(payload):
    assert deframe_message(frame_message(payload)) == payload


def test_deframe_detects_single_bit_flip():
    bits = frame_message(b"abc")
    flipped = Bits(bits.to_bytes(), bits.bit_len)
    flipped._buf[6] ^= 0x01  # inside the payload
    with pytest.raises(CrcMismatch):
        deframe_message(flipped)


def test_deframe_bad_magic():
    with pytest.raises(BadMagic):
        deframe_message(Bits(b"\x00\x00" + b"\x00" * 10))


def test_deframe_truncated():
    bits = frame_message(b"hello")
    with pytest.raises(TruncatedStream):
        deframe_message(Bits(bits.to_bytes()[:6]))


def test_trailing_bits_ignored():
    bits = frame_message(b"xy")
    bits.append(0b1010, 4)
    assert deframe_message(bits) == b"xy"


def test_capacities():
    assert carrier_capacity(PayloadRegister(0, 2)) == 2
    assert carrier_capacity(TimingGap(1000)) == 1


def test_encode_into_value_examples():
    assert encode_into_value(100, 1, 1) == 101
    assert encode_into_value(0x1234, 0, 1) == 0x1234


@given(st.integers(0, 2**32 - 1), st.integers(0, 255), st.integers(1, 8))
def test_value_roundtrip_and_locality(v, b, n):
    b &= (1 << n) - 1
    out = encode_into_value(v, b, n)
    assert decode_value(out, n) == b
    assert out >> n == v >> n


def test_encode_into_gap_examples():
    assert encode_into_gap(2500, 1, 1000) == 3000
    assert encode_into_gap(2500, 0, 1000) == 2500


@given(st.integers(0, 10**9), st.integers(0, 1), st.integers(1, 10**6))
@settings(max_examples=300)
def test_gap_roundtrip_and_bounded_distortion(g, b, q):
    out = encode_into_gap(g, b, q)
    assert decode_gap(out, q) == b
    assert 0 <= out - g < 2 * q


def test_key_json_roundtrip():
    key = StegoKey(
        carrier=PayloadRegister(index=2, n_bits=3),
        filter=parse_filter("tcp.port==502"),
        stride=3,
        phase=1,
    )
    key2 = key_from_json(key_to_json(key))
    assert key2.carrier == key.carrier
    assert key2.stride == 3 and key2.phase == 1
    assert key2.filter.text == "tcp.port==502"


def test_key_validation():
    with pytest.raises(BadValue):
        StegoKey(carrier=PayloadRegister(0, 9), filter=parse_filter(""))
    with pytest.raises(BadValue):
        StegoKey(carrier=TimingGap(0), filter=parse_filter(""))
    with pytest.raises(BadValue):
        StegoKey(carrier=TimingGap(10), filter=parse_filter(""), stride=2, phase=2)


def test_key_schema_errors():
    with pytest.raises(SchemaError):
        key_from_json("{}")
    with pytest.raises(SchemaError):
        key_from_json('{"carrier": {"kind": "nope"}}')
