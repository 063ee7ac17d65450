"""Record selection mini-language: conjunctions of ip.src / ip.dst /
tcp.port / modbus.func atoms joined by &&.
"""

import re
from dataclasses import dataclass

from .errors import BadValue, FilterSyntaxError

_ATOM_RE = re.compile(r"^\s*(ip\.src|ip\.dst|tcp\.port|modbus\.func)\s*==\s*(\S+)\s*$")


@dataclass(frozen=True)
class FilterExpr:
    atoms: tuple  # of (key, value); empty = match-all
    text: str = ""

    def matches(self, data: bytes) -> bool:
        for key, value in self.atoms:
            if not _match_atom(data, key, value):
                return False
        return True


def parse_filter(text: str) -> FilterExpr:
    """Empty text matches everything."""
    if not text.strip():
        return FilterExpr(atoms=(), text="")
    atoms = []
    pos = 0
    for part in text.split("&&"):
        m = _ATOM_RE.match(part)
        if not m:
            raise FilterSyntaxError(pos, f"SyntaxError(position={pos}): cannot parse {part.strip()!r}")
        key, raw = m.group(1), m.group(2)
        atoms.append((key, _parse_value(key, raw)))
        pos += len(part) + 2
    return FilterExpr(atoms=tuple(atoms), text=text)


def _parse_value(key, raw):
    if key in ("ip.src", "ip.dst"):
        parts = raw.split(".")
        if len(parts) != 4 or not all(p.isdigit() and 0 <= int(p) <= 255 for p in parts):
            raise BadValue(f"{key}: {raw!r} is not a dotted quad")
        return bytes(int(p) for p in parts)
    if key == "tcp.port":
        if not raw.isdigit() or not 1 <= int(raw) <= 65535:
            raise BadValue(f"tcp.port: {raw!r} not in 1..65535")
        return int(raw)
    if key == "modbus.func":
        if not raw.isdigit() or not 0 <= int(raw) <= 255:
            raise BadValue(f"modbus.func: {raw!r} not in 0..255")
        return int(raw)
    raise BadValue(key)


def _ipv4_bounds(data):
    if len(data) < 34 or data[12] != 0x08 or data[13] != 0x00:
        return None
    vi = data[14]
    if vi >> 4 != 4 or vi & 0x0F < 5:
        return None
    ip_end = 14 + (vi & 0x0F) * 4
    if ip_end > len(data):
        return None
    return ip_end


def _match_atom(data, key, value):
    ip_end = _ipv4_bounds(data)
    if ip_end is None:
        return False
    if key == "ip.src":
        return data[26:30] == value
    if key == "ip.dst":
        return data[30:34] == value
    # remaining atoms need TCP
    if data[23] != 6 or ip_end + 20 > len(data):
        return False
    sport = (data[ip_end] << 8) | data[ip_end + 1]
    dport = (data[ip_end + 2] << 8) | data[ip_end + 3]
    if key == "tcp.port":
        return value in (sport, dport)
    if key == "modbus.func":
        if 502 not in (sport, dport):
            return False
        dataoff = data[ip_end + 12] >> 4
        tcp_end = ip_end + dataoff * 4
        plen = len(data) - tcp_end
        if dataoff < 5 or plen < 8:
            return False
        mbap_len = (data[tcp_end + 4] << 8) | data[tcp_end + 5]
        if mbap_len != plen - 6:
            return False
        return data[tcp_end + 7] == value
    return False
