"""Packet capture file I/O.

Classic pcap is read and written bit-exactly; pcapng (single interface)
is read and normalized to the pcap data model.
"""

import struct
from dataclasses import dataclass, field, replace

from .errors import (
    InvariantViolation,
    MultiInterface,
    TruncatedRecord,
    UnknownMagic,
    UnsupportedResolution,
)

LINKTYPE_ETHERNET = 1

MAGIC_MICRO = 0xA1B2C3D4
MAGIC_NANO = 0xA1B23C4D

PCAPNG_SHB = 0x0A0D0D0A
PCAPNG_BOM = 0x1A2B3C4D
PCAPNG_IDB = 0x00000001
PCAPNG_SPB = 0x00000003
PCAPNG_EPB = 0x00000006


@dataclass(frozen=True)
class Record:
    ts_sec: int
    ts_frac: int
    orig_len: int
    data: bytes

    def with_data(self, data):
        return replace(self, data=bytes(data))

    def with_ts(self, ts_sec, ts_frac):
        return replace(self, ts_sec=ts_sec, ts_frac=ts_frac)


@dataclass(frozen=True)
class Capture:
    link_type: int = LINKTYPE_ETHERNET
    ts_resolution: str = "micro"  # "micro" | "nano"
    endianness: str = "<"  # byte order the file was (or will be) written in
    snaplen: int = 65535
    version: tuple = (2, 4)
    thiszone: int = 0
    sigfigs: int = 0
    records: tuple = field(default_factory=tuple)

    @property
    def frac_unit(self):
        return 1_000_000 if self.ts_resolution == "micro" else 1_000_000_000

    def with_records(self, records):
        return replace(self, records=tuple(records))

    def timestamps(self):
        """Combined integer timestamps in ts_resolution units."""
        u = self.frac_unit
        return [r.ts_sec * u + r.ts_frac for r in self.records]


def _check_record(c, i, r):
    if len(r.data) > r.orig_len:
        raise InvariantViolation(f"record {i}: captured length {len(r.data)} > orig_len {r.orig_len}")
    if not (0 <= r.ts_frac < c.frac_unit):
        raise InvariantViolation(f"record {i}: ts_frac {r.ts_frac} out of range for {c.ts_resolution}")
    if r.ts_sec < 0:
        raise InvariantViolation(f"record {i}: negative ts_sec")


def read_capture(data: bytes) -> Capture:
    """Parse a classic pcap or single-interface pcapng file."""
    if len(data) >= 4 and struct.unpack_from("<I", data)[0] == PCAPNG_SHB:
        return _read_pcapng(data)
    if len(data) < 24:
        raise UnknownMagic("file shorter than a pcap global header")
    magic_le = struct.unpack_from("<I", data)[0]
    magic_be = struct.unpack_from(">I", data)[0]
    if magic_le == MAGIC_MICRO:
        endian, res = "<", "micro"
    elif magic_le == MAGIC_NANO:
        endian, res = "<", "nano"
    elif magic_be == MAGIC_MICRO:
        endian, res = ">", "micro"
    elif magic_be == MAGIC_NANO:
        endian, res = ">", "nano"
    else:
        raise UnknownMagic(f"magic 0x{magic_le:08X} is not a capture file")

    vmaj, vmin, thiszone, sigfigs, snaplen, linktype = struct.unpack_from(
        endian + "HHiIII", data, 4
    )
    records = []
    pos = 24
    index = 0
    while pos < len(data):
        if pos + 16 > len(data):
            raise TruncatedRecord(index)
        ts_sec, ts_frac, incl_len, orig_len = struct.unpack_from(endian + "IIII", data, pos)
        pos += 16
        if pos + incl_len > len(data):
            raise TruncatedRecord(index)
        records.append(Record(ts_sec, ts_frac, orig_len, data[pos:pos + incl_len]))
        pos += incl_len
        index += 1
    return Capture(
        link_type=linktype,
        ts_resolution=res,
        endianness=endian,
        snaplen=snaplen,
        version=(vmaj, vmin),
        thiszone=thiszone,
        sigfigs=sigfigs,
        records=tuple(records),
    )


def write_capture(c: Capture) -> bytes:
    """Serialize a Capture as classic pcap in its recorded byte order."""
    endian = c.endianness
    magic = MAGIC_MICRO if c.ts_resolution == "micro" else MAGIC_NANO
    out = bytearray()
    out += struct.pack(
        endian + "IHHiIII",
        magic,
        c.version[0],
        c.version[1],
        c.thiszone,
        c.sigfigs,
        c.snaplen,
        c.link_type,
    )
    for i, r in enumerate(c.records):
        _check_record(c, i, r)
        out += struct.pack(endian + "IIII", r.ts_sec, r.ts_frac, len(r.data), r.orig_len)
        out += r.data
    return bytes(out)


# --- pcapng ---

def _read_pcapng(data: bytes) -> Capture:
    if len(data) < 28:
        raise TruncatedRecord(0, "pcapng section header truncated")
    bom_le = struct.unpack_from("<I", data, 8)[0]
    if bom_le == PCAPNG_BOM:
        endian = "<"
    elif struct.unpack_from(">I", data, 8)[0] == PCAPNG_BOM:
        endian = ">"
    else:
        raise UnknownMagic("pcapng byte-order magic not recognized")

    link_type = None
    snaplen = 65535
    res = "micro"
    records = []
    n_interfaces = 0
    pos = 0
    index = 0
    while pos + 8 <= len(data):
        btype = struct.unpack_from(endian + "I", data, pos)[0]
        blen = struct.unpack_from(endian + "I", data, pos + 4)[0]
        if blen < 12 or blen % 4 != 0 or pos + blen > len(data):
            raise TruncatedRecord(index, f"pcapng block at {pos} truncated")
        body = data[pos + 8:pos + blen - 4]
        if btype == PCAPNG_SHB:
            pass  # anything beyond the first section keeps the same interface count rule
        elif btype == PCAPNG_IDB:
            n_interfaces += 1
            if n_interfaces > 1:
                raise MultiInterface("pcapng with more than one interface is unsupported")
            if len(body) < 8:
                raise TruncatedRecord(index, "interface description block too short")
            link_type = struct.unpack_from(endian + "H", body, 0)[0]
            snaplen = struct.unpack_from(endian + "I", body, 4)[0] or 65535
            res = _parse_tsresol(endian, body[8:])
        elif btype == PCAPNG_EPB:
            if n_interfaces == 0:
                raise TruncatedRecord(index, "packet block before interface description")
            if len(body) < 20:
                raise TruncatedRecord(index)
            _iface, ts_hi, ts_lo, cap_len, orig_len = struct.unpack_from(endian + "IIIII", body, 0)
            if 20 + cap_len > len(body):
                raise TruncatedRecord(index)
            ts = (ts_hi << 32) | ts_lo
            unit = 1_000_000 if res == "micro" else 1_000_000_000
            records.append(Record(ts // unit, ts % unit, orig_len, body[20:20 + cap_len]))
            index += 1
        elif btype == PCAPNG_SPB:
            if n_interfaces == 0:
                raise TruncatedRecord(index, "packet block before interface description")
            if len(body) < 4:
                raise TruncatedRecord(index)
            orig_len = struct.unpack_from(endian + "I", body, 0)[0]
            cap_len = min(orig_len, snaplen, len(body) - 4)
            records.append(Record(0, 0, orig_len, body[4:4 + cap_len]))
            index += 1
        # all other block types are skipped
        pos += blen
    if link_type is None:
        raise MultiInterface("pcapng contains no interface description block")
    return Capture(
        link_type=link_type,
        ts_resolution=res,
        endianness=endian,
        snaplen=snaplen,
        records=tuple(records),
    )


def _parse_tsresol(endian, opts: bytes) -> str:
    pos = 0
    while pos + 4 <= len(opts):
        code, olen = struct.unpack_from(endian + "HH", opts, pos)
        pos += 4
        if code == 0:
            break
        val = opts[pos:pos + olen]
        pos += (olen + 3) & ~3
        if code == 9 and olen == 1:
            v = val[0]
            if v & 0x80:
                raise UnsupportedResolution("power-of-two timestamp resolution unsupported")
            if v == 6:
                return "micro"
            if v == 9:
                return "nano"
            raise UnsupportedResolution(f"if_tsresol 10^-{v} unsupported (only micro/nano)")
    return "micro"
