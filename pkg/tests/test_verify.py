import random

import pytest

from pcapstego import (
    Ipv4Id,
    PayloadRegister,
    StegoKey,
    TcpTsval,
    TimingGap,
    apply_plan,
    diff_captures,
    embed_structured,
    frame_message,
    parse_filter,
    plan_fast,
    retrieve,
    validate_structure,
)
from pcapstego.errors import BadMagic, CrcMismatch, LengthMismatch, TruncatedStream


def key_for(carrier, stride=1, phase=0):
    return StegoKey(carrier=carrier, filter=parse_filter(""), stride=stride, phase=phase)


@pytest.mark.parametrize(
    "carrier",
    [PayloadRegister(0, 2), TcpTsval(1), Ipv4Id(3), TimingGap(800)],
    ids=lambda c: c.kind,
)
def test_end_to_end_roundtrip(medium_cover, carrier):
    rng = random.Random(17)
    key = key_for(carrier)
    for _ in range(5):
        payload = rng.randbytes(rng.randrange(0, 20))
        stego = embed_structured(medium_cover, key, frame_message(payload))
        assert retrieve(stego, key) == payload


def test_retrieve_from_cover_fails(medium_cover):
    key = key_for(PayloadRegister(0, 1))
    with pytest.raises((BadMagic, CrcMismatch, TruncatedStream)):
        retrieve(medium_cover, key)


def test_retrieve_with_wrong_stride_fails(medium_cover):
    key = key_for(TcpTsval(1))
    stego = embed_structured(medium_cover, key, frame_message(b"secret"))
    wrong = key_for(TcpTsval(1), stride=2, phase=1)
    with pytest.raises((BadMagic, CrcMismatch, TruncatedStream)):
        retrieve(stego, wrong)


def test_validator_passes_cover_and_stego(medium_cover):
    assert validate_structure(medium_cover).verdict
    key = key_for(PayloadRegister(1, 4))
    stego = apply_plan(medium_cover, plan_fast(medium_cover, key, frame_message(b"valid")))
    assert validate_structure(stego).verdict


def test_validator_flags_flipped_tcp_checksum(small_cover):
    records = list(small_cover.records)
    data = bytearray(records[4].data)
    data[50] ^= 0xFF  # tcp checksum high byte
    records[4] = records[4].with_data(data)
    report = validate_structure(small_cover.with_records(records))
    assert not report.verdict
    assert (4, "tcp.checksum") in report.checksum_failures


def test_validator_flags_non_monotonic_timestamps(small_cover):
    records = list(small_cover.records)
    records[3] = records[3].with_ts(0, 0)
    report = validate_structure(small_cover.with_records(records))
    assert 3 in report.monotonicity_violations or 4 in report.monotonicity_violations


def test_validator_flags_bad_mbap_length(small_cover):
    records = list(small_cover.records)
    data = bytearray(records[0].data)
    data[71] ^= 0x04  # MBAP length low byte (66 + 5)
    records[0] = records[0].with_data(data)
    report = validate_structure(small_cover.with_records(records))
    assert any(i == 0 for i, _ in report.parse_errors + report.checksum_failures)


def test_diff_identity(small_cover):
    d = diff_captures(small_cover, small_cover)
    assert d.changed_records == []
    assert d.identical_count == len(small_cover.records)


def test_diff_localizes_value_carrier_changes(medium_cover):
    key = key_for(PayloadRegister(0, 1))
    plan = plan_fast(medium_cover, key, frame_message(b"diffme"))
    stego = apply_plan(medium_cover, plan)
    d = diff_captures(medium_cover, stego)
    changed = {i for i, _, _ in d.changed_records}
    assert changed <= set(plan.carrier_indices)
    for i, offsets, ts_changed in d.changed_records:
        assert not ts_changed
        assert set(offsets) <= {75, 76, 50, 51}  # reg[0] bytes + tcp checksum


def test_diff_length_mismatch(small_cover):
    shorter = small_cover.with_records(small_cover.records[:-1])
    with pytest.raises(LengthMismatch):
        diff_captures(small_cover, shorter)
    records = list(small_cover.records)
    records[0] = records[0].with_data(records[0].data + b"\x00")
    with pytest.raises(LengthMismatch):
        diff_captures(small_cover, small_cover.with_records(records))


def test_reports_serialize_to_stable_json(small_cover):
    import json

    a = json.dumps(validate_structure(small_cover).to_doc())
    b = json.dumps(validate_structure(small_cover).to_doc())
    assert a == b
