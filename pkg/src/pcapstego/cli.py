"""Command-line surface: gen / filter / embed / retrieve / verify /
hexdump / undump / bench.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

import argparse
import json
import platform
import random
import sys
import time
from dataclasses import dataclass

from . import covergen, engines, kernels, verify
from .capture import read_capture, write_capture
from .carriers import (
    Ipv4Id,
    PayloadRegister,
    StegoKey,
    TcpTsval,
    TimingGap,
    key_from_json,
)
from .errors import PcapStegoError
from .filters import parse_filter
from .framing import frame_message
from .hexdump import emit_hexdump, parse_hexdump

BASELINE_SEC_PER_PKT = 0.86


@dataclass
class BenchResult:
    engine: str
    backend: str
    packets_total: int
    carrier_packets: int
    wall_time_sec: float
    all_inclusive_sec: float
    baseline_sec_per_pkt: float = BASELINE_SEC_PER_PKT

    @property
    def pace_pkts_per_sec(self):
        return self.packets_total / self.wall_time_sec

    @property
    def speedup_vs_baseline(self):
        return self.pace_pkts_per_sec * self.baseline_sec_per_pkt

    def to_doc(self):
        return {
            "engine": self.engine,
            "backend": self.backend,
            "packets_total": self.packets_total,
            "carrier_packets": self.carrier_packets,
            "wall_time_sec": self.wall_time_sec,
            "all_inclusive_sec": self.all_inclusive_sec,
            "pace_pkts_per_sec": self.pace_pkts_per_sec,
            "baseline_sec_per_pkt": self.baseline_sec_per_pkt,
            "speedup_vs_baseline": self.speedup_vs_baseline,
            "host": platform.platform(),
        }


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, data):
    with open(path, "wb") as fh:
        fh.write(data)


def _load_key(path):
    with open(path, "r", encoding="utf-8") as fh:
        return key_from_json(fh.read())


def _carrier_by_name(name, n_bits, reg_index, quantum):
    if name == "payload_register":
        return PayloadRegister(index=reg_index, n_bits=n_bits)
    if name == "tcp_tsval":
        return TcpTsval(n_bits=n_bits)
    if name == "ipv4_id":
        return Ipv4Id(n_bits=n_bits)
    return TimingGap(quantum_usec=quantum)


def cmd_gen(args):
    params = covergen.CoverParams(
        seed=args.seed,
        n_polls=args.polls,
        n_registers=args.registers,
        master_ip=args.master_ip,
        slave_ip=args.slave_ip,
        poll_period_usec=args.period_usec,
        jitter_usec=args.jitter_usec,
        base_time=args.base_time,
    )
    cover = covergen.generate_cover(params)
    _write(args.output, write_capture(cover))
    print(f"wrote {len(cover.records)} records to {args.output}")
    return 0


def cmd_filter(args):
    c = read_capture(_read(args.input))
    expr = parse_filter(args.expr)
    out = engines.filter_capture(c, expr)
    _write(args.output, write_capture(out))
    print(f"kept {len(out.records)} of {len(c.records)} records")
    return 0


def cmd_embed(args):
    cover = read_capture(_read(args.input))
    key = _load_key(args.key)
    message = frame_message(_read(args.msg))
    if args.engine == "fast":
        plan = engines.plan_fast(cover, key, message)
        if args.plan:
            with open(args.plan, "w", encoding="utf-8") as fh:
                json.dump(plan.to_doc(), fh, indent=2)
                fh.write("\n")
        stego = engines.apply_plan(cover, plan)
    else:
        if args.plan:
            print("error: --plan is only available with --engine fast", file=sys.stderr)
            return 2
        stego = engines.embed_structured(cover, key, message)
    _write(args.output, write_capture(stego))
    print(f"embedded {message.bit_len} bits into {args.output}")
    return 0


def cmd_retrieve(args):
    stego = read_capture(_read(args.input))
    key = _load_key(args.key)
    payload = verify.retrieve(stego, key)
    _write(args.output, payload)
    print(f"retrieved {len(payload)} payload bytes to {args.output}")
    return 0


def cmd_verify(args):
    c = read_capture(_read(args.input))
    report = verify.validate_structure(c)
    doc = {"validation": report.to_doc()}
    if args.cover:
        cover = read_capture(_read(args.cover))
        doc["diff"] = verify.diff_captures(cover, c).to_doc()
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        v = doc["validation"]
        print(f"packets: {v['packet_count']}  verdict: {v['verdict']}")
        for idx, desc in report.parse_errors:
            print(f"  parse error at record {idx}: {desc}")
        for idx, fname in report.checksum_failures:
            print(f"  checksum failure at record {idx}: {fname}")
        for idx in report.monotonicity_violations:
            print(f"  timestamp goes backward at record {idx}")
        if "diff" in doc:
            d = doc["diff"]
            print(f"diff: {len(d['changed_records'])} changed, {d['identical_count']} identical")
    if args.strict and not report.verdict:
        return 1
    return 0


def cmd_hexdump(args):
    c = read_capture(_read(args.input))
    text = emit_hexdump(c)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"dumped {len(c.records)} records to {args.output}")
    return 0


def cmd_undump(args):
    with open(args.input, "r", encoding="utf-8") as fh:
        c = parse_hexdump(fh.read())
    _write(args.output, write_capture(c))
    print(f"wrote {len(c.records)} records to {args.output}")
    return 0


def bench_embed(engine, n_packets, carrier, seed=0, cover=None):
    """Time only the embedding call; generation and I/O are excluded."""
    t_all = time.perf_counter()
    if cover is None:
        cover = covergen.generate_cover(covergen.CoverParams(seed=seed, n_polls=n_packets // 2))
    key = StegoKey(carrier=carrier, filter=parse_filter(""), stride=1, phase=0)
    slots = engines.select_carriers(cover, key)
    capacity_bits = len(slots) * (1 if isinstance(carrier, TimingGap) else carrier.n_bits)
    payload_len = max((capacity_bits - 80) // 8, 1)
    rng = random.Random(seed ^ 0xBEEF)
    message = frame_message(rng.randbytes(payload_len))

    t0 = time.perf_counter()
    if engine == "fast":
        stego = engines.apply_plan(cover, engines.plan_fast(cover, key, message))
    else:
        stego = engines.embed_structured(cover, key, message)
    wall = time.perf_counter() - t0
    assert len(stego.records) == len(cover.records)
    return BenchResult(
        engine=engine,
        backend=kernels.BACKEND,
        packets_total=len(cover.records),
        carrier_packets=len(slots),
        wall_time_sec=wall,
        all_inclusive_sec=time.perf_counter() - t_all,
    )


def cmd_bench(args):
    carrier = _carrier_by_name(args.carrier, args.n_bits, args.reg_index, args.quantum_usec)
    engines_list = ["fast", "structured"] if args.engine == "both" else [args.engine]
    if args.backend == "both":
        backend_list = sorted(kernels.backends())
    else:
        backend_list = [kernels.BACKEND]
    cover = covergen.generate_cover(covergen.CoverParams(seed=args.seed, n_polls=args.packets // 2))
    results = []
    for backend in backend_list:
        kernels.use(backend)
        for engine in engines_list:
            results.append(bench_embed(engine, args.packets, carrier, seed=args.seed, cover=cover))
    if args.json:
        print(json.dumps([r.to_doc() for r in results], indent=2))
    else:
        for r in results:
            print(
                f"{r.engine:10s} [{r.backend}] {r.packets_total} packets "
                f"({r.carrier_packets} carriers): {r.wall_time_sec:.3f}s embed, "
                f"{r.pace_pkts_per_sec:,.0f} pkts/s, "
                f"{r.speedup_vs_baseline:,.0f}x the {r.baseline_sec_per_pkt} s/pkt baseline"
            )
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="pcapstego",
        description="Synthetic steganographic embedding in ICS packet captures.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic Modbus-TCP cover")
    g.add_argument("--polls", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--registers", type=int, default=4)
    g.add_argument("--master-ip", default="192.168.0.10")
    g.add_argument("--slave-ip", default="192.168.0.20")
    g.add_argument("--period-usec", type=int, default=100_000)
    g.add_argument("--jitter-usec", type=int, default=10_000)
    g.add_argument("--base-time", type=int, default=1_700_000_000)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("filter", help="keep only records matching a filter expression")
    f.add_argument("-i", "--input", required=True)
    f.add_argument("-e", "--expr", required=True)
    f.add_argument("-o", "--output", required=True)
    f.set_defaults(func=cmd_filter)

    e = sub.add_parser("embed", help="embed a message into a cover capture")
    e.add_argument("-i", "--input", required=True)
    e.add_argument("--key", required=True)
    e.add_argument("--msg", required=True)
    e.add_argument("--engine", choices=["fast", "structured"], default="fast")
    e.add_argument("--plan", help="write the patch plan as JSON (fast engine only)")
    e.add_argument("-o", "--output", required=True)
    e.set_defaults(func=cmd_embed)

    r = sub.add_parser("retrieve", help="extract the hidden message with the key")
    r.add_argument("-i", "--input", required=True)
    r.add_argument("--key", required=True)
    r.add_argument("-o", "--output", required=True)
    r.set_defaults(func=cmd_retrieve)

    v = sub.add_parser("verify", help="structural validation and optional cover diff")
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--cover")
    v.add_argument("--json", action="store_true")
    v.add_argument("--strict", action="store_true")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hexdump", help="convert a capture to hexdump text")
    h.add_argument("-i", "--input", required=True)
    h.add_argument("-o", "--output", required=True)
    h.set_defaults(func=cmd_hexdump)

    u = sub.add_parser("undump", help="convert hexdump text back to a capture")
    u.add_argument("-i", "--input", required=True)
    u.add_argument("-o", "--output", required=True)
    u.set_defaults(func=cmd_undump)

    b = sub.add_parser("bench", help="embedding pace benchmark")
    b.add_argument("--packets", type=int, default=100_000)
    b.add_argument("--engine", choices=["fast", "structured", "both"], default="both")
    b.add_argument(
        "--carrier",
        choices=["payload_register", "tcp_tsval", "ipv4_id", "timing_gap"],
        default="payload_register",
    )
    b.add_argument("--n-bits", type=int, default=1)
    b.add_argument("--reg-index", type=int, default=0)
    b.add_argument("--quantum-usec", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--backend", choices=["current", "both"], default="current")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PcapStegoError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
