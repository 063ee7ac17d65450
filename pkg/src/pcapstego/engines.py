"""The two embedding engines.

The fast engine compiles an auditable PatchPlan from raw header
arithmetic and applies it; the structured engine isolates each carrier
packet, edits its field tree and merges it back. Both must produce
byte- and timestamp-identical output.
"""

from dataclasses import dataclass, field

from . import dissect
from .capture import Capture
from .carriers import (
    StegoKey,
    TimingGap,
    carrier_capacity,
    encode_into_gap,
    encode_into_value,
)
from .errors import InsufficientCapacity, StaleOldByte
from .filters import FilterExpr
from .framing import BitReader, Bits


@dataclass
class PatchPlan:
    byte_edits: list = field(default_factory=list)  # (record_index, offset, old, new)
    ts_edits: list = field(default_factory=list)  # (record_index, new_sec, new_frac)
    checksum_fixes: list = field(default_factory=list)  # (record_index, field name)
    carrier_indices: list = field(default_factory=list)

    def to_doc(self):
        return {
            "byte_edits": [list(e) for e in self.byte_edits],
            "ts_edits": [list(e) for e in self.ts_edits],
            "checksum_fixes": [list(f) for f in self.checksum_fixes],
            "carrier_indices": list(self.carrier_indices),
        }


def filter_capture(c: Capture, f: FilterExpr) -> Capture:
    """Sub-capture of the matching records; the steganographic cover."""
    return c.with_records([r for r in c.records if f.matches(r.data)])


def select_carriers(c: Capture, key: StegoKey):
    """Indices of suitable records, thinned by stride/phase."""
    timing = isinstance(key.carrier, TimingGap)
    suitable = []
    for i, r in enumerate(c.records):
        if not key.filter.matches(r.data):
            continue
        if timing:
            if i == 0:
                continue  # no preceding gap to modulate
        elif dissect.locate_carrier_field(r, key.carrier) is None:
            continue
        suitable.append(i)
    return [idx for j, idx in enumerate(suitable) if j % key.stride == key.phase]


def capacity_of(c: Capture, key: StegoKey) -> int:
    return carrier_capacity(key.carrier) * len(select_carriers(c, key))


def _slot_value(old_value: int, reader: BitReader, n_bits: int) -> int:
    """Next chunk of the message placed in the slot's n_bits LSB window.

    A final partial chunk of r bits occupies the window's top r bits so
    the retriever's fixed n-bit read starts with the message bits.
    """
    chunk, got = reader.read_upto(n_bits)
    if got < n_bits:
        keep = old_value & ((1 << (n_bits - got)) - 1)
        chunk = (chunk << (n_bits - got)) | keep
    return encode_into_value(old_value, chunk, n_bits)


def _checksum_field_for(carrier) -> str:
    # IPv4 header checksum covers only the header; TCP checksum covers the
    # segment plus pseudo-header, which does not include the IP id field.
    return "ipv4.checksum" if carrier.kind == "ipv4_id" else "tcp.checksum"


def _timing_deltas(c: Capture, slots, reader: BitReader, quantum_usec: int):
    """Per-slot gap deltas in native time units.

    Suffix-shifting keeps every downstream gap equal to its original
    value, so deltas can be computed from the unmodified cover.
    """
    unit_per_usec = 1 if c.ts_resolution == "micro" else 1000
    quantum = quantum_usec * unit_per_usec
    ts = c.timestamps()
    deltas = {}
    used = []
    for i in slots:
        if reader.remaining == 0:
            break
        bit = reader.read(1)
        gap = ts[i] - ts[i - 1]
        deltas[i] = encode_into_gap(gap, bit, quantum) - gap
        used.append(i)
    return deltas, used


def _shifted_timestamps(c: Capture, deltas):
    """(index, new_sec, new_frac) for every record whose timestamp moves."""
    unit = c.frac_unit
    out = []
    shift = 0
    for i, t in enumerate(c.timestamps()):
        shift += deltas.get(i, 0)
        if shift:
            t2 = t + shift
            out.append((i, t2 // unit, t2 % unit))
    return out


def plan_fast(c: Capture, key: StegoKey, message: Bits) -> PatchPlan:
    """SEO-A: compile byte/timestamp edits without building field trees."""
    slots = select_carriers(c, key)
    available = carrier_capacity(key.carrier) * len(slots)
    if message.bit_len > available:
        raise InsufficientCapacity(message.bit_len, available)

    plan = PatchPlan()
    reader = BitReader(message)

    if isinstance(key.carrier, TimingGap):
        deltas, used = _timing_deltas(c, slots, reader, key.carrier.quantum_usec)
        plan.ts_edits = _shifted_timestamps(c, deltas)
        plan.carrier_indices = used
        return plan

    n_bits = key.carrier.n_bits
    cksum_field = _checksum_field_for(key.carrier)
    for i in slots:
        if reader.remaining == 0:
            break
        offset, bit_len = dissect.locate_carrier_field(c.records[i], key.carrier)
        data = c.records[i].data
        nbytes = bit_len // 8
        old = int.from_bytes(data[offset:offset + nbytes], "big")
        new = _slot_value(old, reader, n_bits)
        changed = False
        for b in range(nbytes):
            ob = (old >> (8 * (nbytes - 1 - b))) & 0xFF
            nb = (new >> (8 * (nbytes - 1 - b))) & 0xFF
            if ob != nb:
                plan.byte_edits.append((i, offset + b, ob, nb))
                changed = True
        if changed:
            plan.checksum_fixes.append((i, cksum_field))
        plan.carrier_indices.append(i)
    return plan


def _repair_checksum(data: bytearray, which: str):
    ihl = data[14] & 0x0F
    ip_end = 14 + ihl * 4
    if which == "ipv4.checksum":
        data[24:26] = b"\x00\x00"
        data[24:26] = dissect.ipv4_checksum(bytes(data[14:ip_end])).to_bytes(2, "big")
    else:
        tot_len = (data[16] << 8) | data[17]
        seg_end = min(len(data), 14 + tot_len)
        off = ip_end + 16
        data[off:off + 2] = b"\x00\x00"
        cksum = dissect.tcp_checksum(bytes(data[26:30]), bytes(data[30:34]), bytes(data[ip_end:seg_end]))
        data[off:off + 2] = cksum.to_bytes(2, "big")


def apply_plan(c: Capture, plan: PatchPlan) -> Capture:
    """Apply byte edits (tamper-checked), then checksum repairs, then
    timestamp edits."""
    records = list(c.records)
    touched = {}
    for i, offset, old, new in plan.byte_edits:
        buf = touched.get(i)
        if buf is None:
            buf = touched[i] = bytearray(records[i].data)
        if buf[offset] != old:
            raise StaleOldByte(i, offset)
        buf[offset] = new
    for i, which in plan.checksum_fixes:
        buf = touched.get(i)
        if buf is None:
            buf = touched[i] = bytearray(records[i].data)
        _repair_checksum(buf, which)
    for i, buf in touched.items():
        records[i] = records[i].with_data(buf)
    for i, sec, frac in plan.ts_edits:
        records[i] = records[i].with_ts(sec, frac)
    return c.with_records(records)


def embed_structured(c: Capture, key: StegoKey, message: Bits) -> Capture:
    """SEO-B: per carrier packet, isolate -> field tree -> mutate ->
    re-serialize -> merge back."""
    slots = select_carriers(c, key)
    available = carrier_capacity(key.carrier) * len(slots)
    if message.bit_len > available:
        raise InsufficientCapacity(message.bit_len, available)

    reader = BitReader(message)
    records = list(c.records)

    if isinstance(key.carrier, TimingGap):
        deltas, _used = _timing_deltas(c, slots, reader, key.carrier.quantum_usec)
        for i, sec, frac in _shifted_timestamps(c, deltas):
            records[i] = records[i].with_ts(sec, frac)
        return c.with_records(records)

    name = dissect.carrier_field_name(key.carrier)
    cksum_field = _checksum_field_for(key.carrier)
    for i in slots:
        if reader.remaining == 0:
            break
        isolated = records[i]
        tree = dissect.dissect_packet(isolated, c.link_type)
        old = tree.find_field(name)
        new_value = _slot_value(old.value, reader, key.carrier.n_bits)
        if new_value != old.value:
            tree = tree.replace_field(name, new_value)
            buf = bytearray(dissect.reserialize(tree))
            _repair_checksum(buf, cksum_field)
            records[i] = isolated.with_data(buf)
    return c.with_records(records)
