"""Retrieval, structural validation and cover/stego diffing."""

from dataclasses import dataclass, field

from . import dissect
from .capture import Capture
from .carriers import StegoKey, TimingGap, decode_gap, decode_value
from .engines import select_carriers
from .errors import LengthMismatch
from .framing import Bits, deframe_message


@dataclass
class ValidationReport:
    packet_count: int = 0
    parse_errors: list = field(default_factory=list)  # (record_index, description)
    checksum_failures: list = field(default_factory=list)  # (record_index, field)
    monotonicity_violations: list = field(default_factory=list)  # record_index

    @property
    def verdict(self) -> bool:
        return not (self.parse_errors or self.checksum_failures or self.monotonicity_violations)

    def to_doc(self):
        return {
            "packet_count": self.packet_count,
            "parse_errors": [list(e) for e in self.parse_errors],
            "checksum_failures": [list(e) for e in self.checksum_failures],
            "monotonicity_violations": list(self.monotonicity_violations),
            "verdict": "pass" if self.verdict else "fail",
        }


@dataclass
class DiffReport:
    changed_records: list = field(default_factory=list)  # (index, [offsets], ts_changed)
    identical_count: int = 0

    def to_doc(self):
        return {
            "changed_records": [
                {"record_index": i, "changed_byte_offsets": offs, "ts_changed": ts}
                for i, offs, ts in self.changed_records
            ],
            "identical_count": self.identical_count,
        }


def retrieve(c: Capture, key: StegoKey) -> bytes:
    """Re-derive carrier slots from the key, read their bits, deframe."""
    slots = select_carriers(c, key)
    bits = Bits()
    if isinstance(key.carrier, TimingGap):
        unit_per_usec = 1 if c.ts_resolution == "micro" else 1000
        quantum = key.carrier.quantum_usec * unit_per_usec
        ts = c.timestamps()
        for i in slots:
            bits.append(decode_gap(ts[i] - ts[i - 1], quantum), 1)
    else:
        n_bits = key.carrier.n_bits
        for i in slots:
            offset, bit_len = dissect.locate_carrier_field(c.records[i], key.carrier)
            value = int.from_bytes(c.records[i].data[offset:offset + bit_len // 8], "big")
            bits.append(decode_value(value, n_bits), n_bits)
    return deframe_message(bits)


def _check_record(i, data, report):
    if len(data) < 14 or data[12] != 0x08 or data[13] != 0x00:
        return  # not IPv4; nothing to verify
    if len(data) < 34:
        report.parse_errors.append((i, "IPv4 claimed but fewer than 34 bytes"))
        return
    vi = data[14]
    ihl = vi & 0x0F
    if vi >> 4 != 4 or ihl < 5 or 14 + ihl * 4 > len(data):
        report.parse_errors.append((i, "bad IPv4 version/IHL"))
        return
    ip_end = 14 + ihl * 4
    tot_len = (data[16] << 8) | data[17]
    if tot_len < ihl * 4 or 14 + tot_len > len(data):
        report.parse_errors.append((i, f"IPv4 total length {tot_len} inconsistent with {len(data)} captured bytes"))
        return
    seg_end = 14 + tot_len

    header = bytearray(data[14:ip_end])
    header[10:12] = b"\x00\x00"
    if dissect.ipv4_checksum(bytes(header)) != ((data[24] << 8) | data[25]):
        report.checksum_failures.append((i, "ipv4.checksum"))

    if data[23] != 6:
        return
    if ip_end + 20 > seg_end:
        report.parse_errors.append((i, "TCP header does not fit IPv4 total length"))
        return
    dataoff = data[ip_end + 12] >> 4
    if dataoff < 5 or ip_end + dataoff * 4 > seg_end:
        report.parse_errors.append((i, f"TCP data offset {dataoff} inconsistent"))
        return
    seg = bytearray(data[ip_end:seg_end])
    stored = (seg[16] << 8) | seg[17]
    seg[16:18] = b"\x00\x00"
    if dissect.tcp_checksum(data[26:30], data[30:34], bytes(seg)) != stored:
        report.checksum_failures.append((i, "tcp.checksum"))

    sport = (data[ip_end] << 8) | data[ip_end + 1]
    dport = (data[ip_end + 2] << 8) | data[ip_end + 3]
    tcp_end = ip_end + dataoff * 4
    plen = seg_end - tcp_end
    if 502 in (sport, dport) and plen > 0:
        if plen < 8:
            report.parse_errors.append((i, "Modbus payload shorter than MBAP"))
        else:
            mbap_len = (data[tcp_end + 4] << 8) | data[tcp_end + 5]
            if mbap_len != plen - 6:
                report.parse_errors.append((i, f"MBAP length {mbap_len} != payload length {plen} - 6"))


def validate_structure(c: Capture) -> ValidationReport:
    """Parse-consistency, checksum and monotonicity checks per record."""
    report = ValidationReport(packet_count=len(c.records))
    for i, r in enumerate(c.records):
        _check_record(i, r.data, report)
    ts = c.timestamps()
    for i in range(1, len(ts)):
        if ts[i] < ts[i - 1]:
            report.monotonicity_violations.append(i)
    return report


def diff_captures(cover: Capture, stego: Capture) -> DiffReport:
    if len(cover.records) != len(stego.records):
        raise LengthMismatch(
            f"record counts differ: {len(cover.records)} vs {len(stego.records)}"
        )
    report = DiffReport()
    for i, (a, b) in enumerate(zip(cover.records, stego.records)):
        if len(a.data) != len(b.data):
            raise LengthMismatch(f"record {i}: lengths differ ({len(a.data)} vs {len(b.data)})")
        offsets = [j for j in range(len(a.data)) if a.data[j] != b.data[j]]
        ts_changed = (a.ts_sec, a.ts_frac) != (b.ts_sec, b.ts_frac)
        if offsets or ts_changed:
            report.changed_records.append((i, offsets, ts_changed))
        else:
            report.identical_count += 1
    return report
