"""Acceptance gate: one test per criterion, each printing a pass/fail
line (run with `pytest -s tests/test_acceptance.py` to see them).
"""

import random
import time

from pcapstego import (
    CoverParams,
    Ipv4Id,
    PayloadRegister,
    StegoKey,
    TcpTsval,
    TimingGap,
    apply_plan,
    dissect_packet,
    emit_field_tree,
    emit_hexdump,
    frame_message,
    generate_cover,
    ipv4_checksum,
    parse_field_tree,
    parse_filter,
    parse_hexdump,
    plan_fast,
    read_capture,
    reserialize,
    retrieve,
    tcp_checksum,
    validate_structure,
    write_capture,
    embed_structured,
)
from pcapstego.cli import bench_embed
from pcapstego.dissect import locate_carrier_field

from test_capture import random_capture
from test_dissect import naive_fold, naive_tcp_checksum

_COVER_CACHE = {}


def cover_1000(seed):
    if seed not in _COVER_CACHE:
        _COVER_CACHE[seed] = generate_cover(CoverParams(seed=seed, n_polls=500))
    return _COVER_CACHE[seed]


def random_key(rng):
    kind = rng.randrange(4)
    if kind == 0:
        carrier = PayloadRegister(index=rng.randrange(4), n_bits=rng.randrange(1, 9))
    elif kind == 1:
        carrier = TcpTsval(n_bits=rng.randrange(1, 9))
    elif kind == 2:
        carrier = Ipv4Id(n_bits=rng.randrange(1, 9))
    else:
        carrier = TimingGap(quantum_usec=rng.choice([100, 500, 1000, 5000]))
    stride = rng.randrange(1, 4)
    return StegoKey(
        carrier=carrier,
        filter=parse_filter(""),
        stride=stride,
        phase=rng.randrange(stride),
    )


def key_with(carrier, rng):
    stride = rng.randrange(1, 4)
    return StegoKey(carrier=carrier, filter=parse_filter(""), stride=stride, phase=rng.randrange(stride))


def capacity_bits(cover, key):
    from pcapstego.engines import capacity_of

    return capacity_of(cover, key)


def report(name, ok, detail=""):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name} failed: {detail}"


def carrier_variants(rng):
    return [
        PayloadRegister(index=rng.randrange(4), n_bits=rng.randrange(1, 9)),
        TcpTsval(n_bits=rng.randrange(1, 9)),
        Ipv4Id(n_bits=rng.randrange(1, 9)),
        TimingGap(quantum_usec=rng.choice([100, 500, 1000])),
    ]


def test_criterion_1_end_to_end_roundtrip():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    total = ok = 0
    for base in carrier_variants(rng):
        for engine in ("fast", "structured"):
            for trial in range(50):
                cover = cover_1000(rng.randrange(6))
                key = key_with(base, rng)
                cap = capacity_bits(cover, key)
                payload = rng.randbytes(rng.randrange(0, max((cap - 80) // 8, 1)))
                message = frame_message(payload)
                if engine == "fast":
                    stego = apply_plan(cover, plan_fast(cover, key, message))
                else:
                    stego = embed_structured(cover, key, message)
                total += 1
                if retrieve(stego, key) == payload:
                    ok += 1
    elapsed = time.perf_counter() - t0
    report(
        "1 end-to-end roundtrip",
        ok == total and elapsed < 60,
        f"({ok}/{total} recovered in {elapsed:.1f}s)",
    )


def test_criterion_2_engine_equivalence():
    rng = random.Random(777)
    failures = 0
    for _ in range(100):
        cover = cover_1000(rng.randrange(6))
        key = random_key(rng)
        cap = capacity_bits(cover, key)
        message = frame_message(rng.randbytes(rng.randrange(0, max((cap - 80) // 8, 1))))
        fast = apply_plan(cover, plan_fast(cover, key, message))
        structured = embed_structured(cover, key, message)
        if fast != structured:
            failures += 1
    report("2 engine equivalence", failures == 0, f"({100 - failures}/100 byte-identical)")


def test_criterion_3_cover_integrity():
    rng = random.Random(31)
    ok = True
    detail = []
    for carrier in carrier_variants(rng):
        cover = cover_1000(rng.randrange(6))
        key = key_with(carrier, rng)
        cap = capacity_bits(cover, key)
        message = frame_message(rng.randbytes(max((cap - 80) // 16, 1)))
        plan = plan_fast(cover, key, message)
        stego = apply_plan(cover, plan)
        used = set(plan.carrier_indices)
        timing = isinstance(carrier, TimingGap)
        for i, (a, b) in enumerate(zip(cover.records, stego.records)):
            if timing:
                if a.data != b.data:
                    ok = False
                    detail.append(f"{carrier.kind}: bytes changed at {i}")
                continue
            if (a.ts_sec, a.ts_frac) != (b.ts_sec, b.ts_frac):
                ok = False
                detail.append(f"{carrier.kind}: timestamp changed at {i}")
            if a.data == b.data:
                continue
            if i not in used:
                ok = False
                detail.append(f"{carrier.kind}: unplanned record {i} changed")
                continue
            offset, bit_len = locate_carrier_field(a, key.carrier)
            allowed = set(range(offset, offset + bit_len // 8)) | {24, 25, 50, 51}
            diff = {j for j in range(len(a.data)) if a.data[j] != b.data[j]}
            if not diff <= allowed:
                ok = False
                detail.append(f"{carrier.kind}: stray bytes {sorted(diff - allowed)} at {i}")
    report("3 cover integrity", ok, "; ".join(detail[:3]) or "(only carrier/checksum bytes change)")


def test_criterion_4_structural_validity_and_fault_detection():
    rng = random.Random(99)
    stego_ok = True
    for carrier in carrier_variants(rng):
        cover = cover_1000(rng.randrange(6))
        key = key_with(carrier, rng)
        cap = capacity_bits(cover, key)
        message = frame_message(rng.randbytes(max((cap - 80) // 16, 1)))
        stego = embed_structured(cover, key, message)
        if not validate_structure(stego).verdict:
            stego_ok = False

    base = generate_cover(CoverParams(seed=5, n_polls=15))
    detected = 0
    n_inject = 1000
    for _ in range(n_inject):
        idx = rng.randrange(len(base.records))
        data = bytearray(base.records[idx].data)
        off = rng.randrange(14, len(data))  # IP header + TCP segment, all checksummed
        data[off] ^= rng.randrange(1, 256)
        records = list(base.records)
        records[idx] = records[idx].with_data(data)
        if not validate_structure(base.with_records(records)).verdict:
            detected += 1
    rate = detected / n_inject
    report(
        "4 structural validity",
        stego_ok and rate >= 0.99,
        f"(stego verdicts pass; {rate:.1%} of {n_inject} injected faults detected)",
    )


def test_criterion_5_pace():
    t0 = time.perf_counter()
    cover = generate_cover(CoverParams(seed=0, n_polls=50_000))
    fast = bench_embed("fast", 100_000, PayloadRegister(0, 8), cover=cover)
    structured = bench_embed("structured", 100_000, PayloadRegister(0, 8), cover=cover)
    elapsed = time.perf_counter() - t0
    ok = (
        fast.pace_pkts_per_sec >= 10_000
        and structured.pace_pkts_per_sec >= 100
        and elapsed < 300
    )
    report(
        "5 embedding pace",
        ok,
        f"(fast {fast.pace_pkts_per_sec:,.0f} pkts/s = {fast.speedup_vs_baseline:,.0f}x baseline; "
        f"structured {structured.pace_pkts_per_sec:,.0f} pkts/s = "
        f"{structured.speedup_vs_baseline:,.0f}x; bench took {elapsed:.0f}s)",
    )


def test_criterion_6_codec_fidelity():
    rng = random.Random(6)
    for _ in range(1000):
        f = write_capture(random_capture(rng))
        assert write_capture(read_capture(f)) == f
    cover = cover_1000(0)
    assert parse_hexdump(emit_hexdump(cover)) == cover
    for r in cover.records[:200]:
        p = dissect_packet(r)
        assert reserialize(parse_field_tree(emit_field_tree(p))) == r.data
    report("6 codec fidelity", True, "(1000 pcap fuzz files + hexdump + field-tree roundtrips)")


def test_criterion_7_checksum_oracles():
    rng = random.Random(7)
    for _ in range(10_000):
        header = rng.randbytes(2 * rng.randrange(10, 31))
        assert ipv4_checksum(header) == naive_fold(header)
    for _ in range(10_000):
        src, dst = rng.randbytes(4), rng.randbytes(4)
        seg = rng.randbytes(rng.randrange(20, 120))
        assert tcp_checksum(src, dst, seg) == naive_tcp_checksum(src, dst, seg)
    report("7 checksum oracles", True, "(10^4 random inputs per engine match the naive fold)")
