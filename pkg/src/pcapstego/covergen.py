"""Deterministic synthetic Modbus-TCP polling session: a master reading
holding registers from one slave over TCP/IPv4/Ethernet.

Stands in for a laboratory recording at desk scale; every generated
capture passes validate_structure.
"""

import random
import struct
from dataclasses import dataclass

from . import kernels
from .capture import Capture, Record
from .errors import InvalidParams

MASTER_MAC = bytes.fromhex("020000000001")
SLAVE_MAC = bytes.fromhex("020000000002")


@dataclass(frozen=True)
class CoverParams:
    seed: int = 0
    n_polls: int = 100
    n_registers: int = 4
    master_ip: str = "192.168.0.10"
    slave_ip: str = "192.168.0.20"
    poll_period_usec: int = 100_000
    jitter_usec: int = 10_000
    base_time: int = 1_700_000_000


def _ip_bytes(dotted):
    parts = dotted.split(".")
    if len(parts) != 4 or not all(p.isdigit() and 0 <= int(p) <= 255 for p in parts):
        raise InvalidParams(f"{dotted!r} is not a dotted quad")
    return bytes(int(p) for p in parts)


def _packet(eth_dst, eth_src, src_ip, dst_ip, ip_id, sport, dport, seq, ack,
            tsval, tsecr, payload):
    tcp = struct.pack(
        "!HHIIHHHH", sport, dport, seq, ack, (8 << 12) | 0x018, 64240, 0, 0
    ) + b"\x01\x01" + struct.pack("!BBII", 8, 10, tsval, tsecr)
    seg = tcp + payload
    ip = bytearray(struct.pack(
        "!BBHHHBBH4s4s", 0x45, 0, 20 + len(seg), ip_id, 0x4000, 64, 6, 0, src_ip, dst_ip
    ))
    ip[10:12] = kernels.checksum16(bytes(ip)).to_bytes(2, "big")
    buf = bytearray(eth_dst + eth_src + b"\x08\x00" + ip + seg)
    cksum = kernels.tcp_checksum(src_ip, dst_ip, bytes(seg))
    off = 14 + 20 + 16
    buf[off:off + 2] = cksum.to_bytes(2, "big")
    return bytes(buf)


def generate_cover(p: CoverParams) -> Capture:
    if p.n_polls < 0:
        raise InvalidParams("n_polls must be >= 0")
    if p.n_registers < 1:
        raise InvalidParams("n_registers must be >= 1")
    if p.poll_period_usec <= 2 * p.jitter_usec or p.jitter_usec < 0:
        raise InvalidParams("poll_period_usec must exceed 2 * jitter_usec")
    master_ip = _ip_bytes(p.master_ip)
    slave_ip = _ip_bytes(p.slave_ip)

    rng = random.Random(p.seed)
    mport = rng.randrange(49152, 65536)
    seq_m = rng.getrandbits(32)
    seq_s = rng.getrandbits(32)
    id_m = rng.getrandbits(16)
    id_s = rng.getrandbits(16)
    tsv_m = rng.getrandbits(31)
    tsv_s = rng.getrandbits(31)

    half = p.poll_period_usec // 2
    t = p.base_time * 1_000_000
    nreg = p.n_registers
    records = []
    for poll in range(p.n_polls):
        trans = poll & 0xFFFF
        req_pdu = struct.pack("!HHHBBHH", trans, 0, 6, 1, 0x03, 0, nreg)
        regs = b"".join(struct.pack("!H", rng.getrandbits(16)) for _ in range(nreg))
        resp_pdu = struct.pack("!HHHBBB", trans, 0, 3 + 2 * nreg, 1, 0x03, 2 * nreg) + regs

        data = _packet(SLAVE_MAC, MASTER_MAC, master_ip, slave_ip, id_m, mport, 502,
                       seq_m, seq_s, tsv_m, tsv_s, req_pdu)
        records.append(Record(t // 1_000_000, t % 1_000_000, len(data), data))
        id_m = (id_m + 1) & 0xFFFF
        seq_m = (seq_m + len(req_pdu)) & 0xFFFFFFFF
        t += half + rng.randint(-p.jitter_usec, p.jitter_usec)
        tsv_s = (tsv_s + 1) & 0xFFFFFFFF

        data = _packet(MASTER_MAC, SLAVE_MAC, slave_ip, master_ip, id_s, 502, mport,
                       seq_s, seq_m, tsv_s, tsv_m, resp_pdu)
        records.append(Record(t // 1_000_000, t % 1_000_000, len(data), data))
        id_s = (id_s + 1) & 0xFFFF
        seq_s = (seq_s + len(resp_pdu)) & 0xFFFFFFFF
        t += half + rng.randint(-p.jitter_usec, p.jitter_usec)
        tsv_m = (tsv_m + 1) & 0xFFFFFFFF

    return Capture(records=tuple(records))
