"""Offset-preserving dissector and re-serializer for Ethernet II / IPv4 /
TCP / Modbus-TCP, plus the checksum engines and the fast carrier locator.

Every field is byte-aligned; the concatenation of all field bytes always
tiles the record exactly (unrecognized bytes become a residual field).
"""

from dataclasses import dataclass, replace

from . import kernels
from .capture import Record
from .carriers import CarrierKind
from .errors import OddLength, ValueOverflow

MODBUS_PORT = 502


@dataclass(frozen=True)
class Field:
    name: str  # dotted path, e.g. "ipv4.ttl"
    offset: int  # byte offset in the record
    bit_len: int  # multiple of 8
    value: int  # unsigned, big-endian wire order

    @property
    def byte_len(self):
        return self.bit_len // 8


@dataclass(frozen=True)
class Layer:
    name: str
    fields: tuple


@dataclass(frozen=True)
class DissectedPacket:
    record_index: int
    layers: tuple
    malformed: bool = False

    def iter_fields(self):
        for layer in self.layers:
            yield from layer.fields

    def find_field(self, name):
        for f in self.iter_fields():
            if f.name == name:
                return f
        return None

    def replace_field(self, name, value):
        """New packet with the named field's value swapped."""
        layers = []
        found = False
        for layer in self.layers:
            fields = []
            for f in layer.fields:
                if f.name == name:
                    fields.append(replace(f, value=value))
                    found = True
                else:
                    fields.append(f)
            layers.append(Layer(layer.name, tuple(fields)))
        if not found:
            raise KeyError(name)
        return replace(self, layers=tuple(layers))


class _Cursor:
    def __init__(self, data, start=0):
        self.data = data
        self.pos = start
        self.fields = []

    def take(self, name, nbytes):
        val = int.from_bytes(self.data[self.pos:self.pos + nbytes], "big")
        self.fields.append(Field(name, self.pos, nbytes * 8, val))
        self.pos += nbytes
        return val

    def flush_layer(self, name):
        layer = Layer(name, tuple(self.fields))
        self.fields = []
        return layer


def dissect_packet(r: Record, link_type: int = 1) -> DissectedPacket:
    """Dissect as far as recognition succeeds; never fails."""
    data = r.data
    layers = []
    malformed = False
    cur = _Cursor(data)

    ok = len(data) >= 14
    if ok:
        cur.take("ethernet.dst", 6)
        cur.take("ethernet.src", 6)
        ethertype = cur.take("ethernet.ethertype", 2)
        layers.append(cur.flush_layer("ethernet"))
        ok = ethertype == 0x0800

    ip_end = None
    if ok:
        ok = False
        if len(data) >= cur.pos + 20:
            vi = data[cur.pos]
            ihl = vi & 0x0F
            if vi >> 4 == 4 and ihl >= 5 and cur.pos + ihl * 4 <= len(data):
                cur.take("ipv4.version_ihl", 1)
                cur.take("ipv4.tos", 1)
                cur.take("ipv4.total_length", 2)
                cur.take("ipv4.id", 2)
                cur.take("ipv4.flags_fragoff", 2)
                cur.take("ipv4.ttl", 1)
                proto = cur.take("ipv4.protocol", 1)
                cur.take("ipv4.checksum", 2)
                cur.take("ipv4.src", 4)
                cur.take("ipv4.dst", 4)
                if ihl > 5:
                    cur.take("ipv4.options", (ihl - 5) * 4)
                ip_end = cur.pos
                layers.append(cur.flush_layer("ipv4"))
                ok = proto == 6
            else:
                malformed = True  # IPv4 claimed by ethertype but unparseable

    sport = dport = tcp_end = None
    if ok:
        ok = False
        if len(data) >= ip_end + 20:
            dataoff = data[ip_end + 12] >> 4
            if dataoff >= 5 and ip_end + dataoff * 4 <= len(data):
                sport = cur.take("tcp.srcport", 2)
                dport = cur.take("tcp.dstport", 2)
                cur.take("tcp.seq", 4)
                cur.take("tcp.ack", 4)
                cur.take("tcp.dataoff_flags", 2)
                cur.take("tcp.window", 2)
                cur.take("tcp.checksum", 2)
                cur.take("tcp.urgent", 2)
                tcp_end = ip_end + dataoff * 4
                _dissect_tcp_options(cur, tcp_end)
                layers.append(cur.flush_layer("tcp"))
                ok = True
            else:
                malformed = True
        else:
            malformed = True

    if ok and tcp_end is not None and (sport == MODBUS_PORT or dport == MODBUS_PORT):
        modbus = _dissect_modbus(cur, data, dport == MODBUS_PORT)
        if modbus is not None:
            layers.append(modbus)

    if cur.pos < len(data):
        cur.take("payload.data", len(data) - cur.pos)
        layers.append(cur.flush_layer("payload"))

    return DissectedPacket(record_index=0, layers=tuple(layers), malformed=malformed)


def _dissect_tcp_options(cur, tcp_end):
    i = 0
    while cur.pos < tcp_end:
        kind = cur.data[cur.pos]
        if kind == 0:
            cur.take("tcp.options.eol", tcp_end - cur.pos)
            return
        if kind == 1:
            cur.take(f"tcp.options.nop[{i}]", 1)
            i += 1
            continue
        if cur.pos + 1 >= tcp_end:
            cur.take("tcp.options.rest", tcp_end - cur.pos)
            return
        olen = cur.data[cur.pos + 1]
        if olen < 2 or cur.pos + olen > tcp_end:
            cur.take("tcp.options.rest", tcp_end - cur.pos)
            return
        if kind == 8 and olen == 10:
            cur.take("tcp.options.ts.kind", 1)
            cur.take("tcp.options.ts.len", 1)
            cur.take("tcp.options.tsval", 4)
            cur.take("tcp.options.tsecr", 4)
        else:
            cur.take(f"tcp.options.opt[{i}]", olen)
            i += 1


def _dissect_modbus(cur, data, is_request):
    """MBAP + function codes 0x03 and 0x10; anything else stays payload."""
    start = cur.pos
    plen = len(data) - start
    if plen < 8:
        return None
    mbap_len = (data[start + 4] << 8) | data[start + 5]
    if mbap_len != plen - 6:
        return None
    cur.take("modbus.trans_id", 2)
    cur.take("modbus.proto_id", 2)
    cur.take("modbus.length", 2)
    cur.take("modbus.unit_id", 1)
    func = cur.take("modbus.func", 1)
    rem = len(data) - cur.pos
    if is_request and func == 0x03 and rem == 4:
        cur.take("modbus.start_addr", 2)
        cur.take("modbus.reg_count", 2)
    elif is_request and func == 0x10 and rem >= 5:
        bc = data[cur.pos + 4]
        if rem == 5 + bc and bc % 2 == 0:
            cur.take("modbus.start_addr", 2)
            cur.take("modbus.reg_count", 2)
            cur.take("modbus.byte_count", 1)
            for i in range(bc // 2):
                cur.take(f"modbus.reg[{i}]", 2)
        elif rem:
            cur.take("modbus.data", rem)
    elif not is_request and func == 0x03 and rem >= 1:
        bc = data[cur.pos]
        if rem == 1 + bc and bc % 2 == 0 and bc >= 2:
            cur.take("modbus.byte_count", 1)
            for i in range(bc // 2):
                cur.take(f"modbus.reg[{i}]", 2)
        else:
            cur.take("modbus.data", rem)
    elif not is_request and func == 0x10 and rem == 4:
        cur.take("modbus.start_addr", 2)
        cur.take("modbus.reg_count", 2)
    elif rem:
        cur.take("modbus.data", rem)
    return cur.flush_layer("modbus")


def reserialize(p: DissectedPacket) -> bytes:
    """Write every field back at its offset; inverse of dissect_packet."""
    total = 0
    for f in p.iter_fields():
        total = max(total, f.offset + f.byte_len)
    out = bytearray(total)
    for f in p.iter_fields():
        if f.value < 0 or f.value >> f.bit_len:
            raise ValueOverflow(f.name)
        out[f.offset:f.offset + f.byte_len] = f.value.to_bytes(f.byte_len, "big")
    return bytes(out)


# --- checksum engines ---

def ipv4_checksum(header: bytes) -> int:
    """IPv4 header checksum; the checksum field must be zeroed by the caller."""
    if len(header) % 2:
        raise OddLength("IPv4 header length must be even")
    return kernels.checksum16(header)


def tcp_checksum(src: bytes, dst: bytes, segment: bytes) -> int:
    """TCP checksum over pseudo-header + segment (checksum field zeroed)."""
    return kernels.tcp_checksum(bytes(src), bytes(dst), bytes(segment))


# --- fast-path carrier location ---

def locate_carrier_field(r: Record, carrier: CarrierKind):
    """(byte_offset, bit_len) of the carrier's field, or None if unsuitable.

    Timing carriers have no byte-level field; callers handle them separately.
    """
    kind_map = {
        "ipv4_id": kernels.K_IPV4_ID,
        "tcp_tsval": kernels.K_TCP_TSVAL,
        "payload_register": kernels.K_PAYLOAD_REG,
    }
    code = kind_map.get(carrier.kind)
    if code is None:
        return None
    return kernels.locate_carrier(bytes(r.data), code, getattr(carrier, "index", 0))


def carrier_field_name(carrier: CarrierKind):
    """Dissected-field name the carrier targets (structured engine path)."""
    if carrier.kind == "payload_register":
        return f"modbus.reg[{carrier.index}]"
    if carrier.kind == "tcp_tsval":
        return "tcp.options.tsval"
    if carrier.kind == "ipv4_id":
        return "ipv4.id"
    return None
