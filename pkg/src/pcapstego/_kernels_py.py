"""Pure-Python hot kernels: ones'-complement checksums and carrier field
location by raw header arithmetic.

A compiled twin lives in _kernels_cy; kernels.py picks one at import.
Signatures and semantics must stay identical between the two.
"""

import struct

BACKEND = "python"

# carrier kind codes shared with the compiled twin
K_IPV4_ID = 0
K_TCP_TSVAL = 1
K_PAYLOAD_REG = 2


def checksum16(data: bytes) -> int:
    """Ones'-complement of the ones'-complement sum of 16-bit BE words.

    data length must be even; the checksum field must already be zeroed.
    """
    s = sum(struct.unpack("!%dH" % (len(data) // 2), data))
    while s >> 16:
        s = (s & 0xFFFF) + (s >> 16)
    return ~s & 0xFFFF


def tcp_checksum(src: bytes, dst: bytes, segment: bytes) -> int:
    """TCP checksum over the IPv4 pseudo-header plus segment bytes."""
    seg_len = len(segment)
    if seg_len % 2:
        segment = segment + b"\x00"
    s = sum(struct.unpack("!%dH" % (len(segment) // 2), segment))
    s += struct.unpack("!HH", src)[0] + struct.unpack("!HH", src)[1]
    s += struct.unpack("!HH", dst)[0] + struct.unpack("!HH", dst)[1]
    s += 6 + seg_len
    while s >> 16:
        s = (s & 0xFFFF) + (s >> 16)
    return ~s & 0xFFFF


def locate_carrier(data: bytes, kind: int, reg_index: int):
    """Return (byte_offset, bit_len) of the carrier field, or None.

    Uses minimal header arithmetic only (no field tree).
    """
    n = len(data)
    if n < 34 or data[12] != 0x08 or data[13] != 0x00:
        return None
    vi = data[14]
    ihl = vi & 0x0F
    if vi >> 4 != 4 or ihl < 5:
        return None
    ip_end = 14 + ihl * 4
    if ip_end > n:
        return None
    if kind == K_IPV4_ID:
        return (18, 16)
    if data[23] != 6:  # protocol
        return None
    if ip_end + 20 > n:
        return None
    dataoff = data[ip_end + 12] >> 4
    if dataoff < 5:
        return None
    tcp_end = ip_end + dataoff * 4
    if tcp_end > n:
        return None
    if kind == K_TCP_TSVAL:
        pos = ip_end + 20
        while pos < tcp_end:
            opt = data[pos]
            if opt == 0:
                return None
            if opt == 1:
                pos += 1
                continue
            if pos + 1 >= tcp_end:
                return None
            olen = data[pos + 1]
            if olen < 2 or pos + olen > tcp_end:
                return None
            if opt == 8 and olen == 10:
                return (pos + 2, 32)
            pos += olen
        return None
    if kind == K_PAYLOAD_REG:
        sport = (data[ip_end] << 8) | data[ip_end + 1]
        dport = (data[ip_end + 2] << 8) | data[ip_end + 3]
        if sport != 502 and dport != 502:
            return None
        plen = n - tcp_end
        if plen < 8:
            return None
        mbap_len = (data[tcp_end + 4] << 8) | data[tcp_end + 5]
        if mbap_len != plen - 6:
            return None
        func = data[tcp_end + 7]
        if dport == 502:
            # request direction: registers only in write-multiple (0x10)
            if func == 0x10 and plen >= 14:
                bc = data[tcp_end + 13]
                if 14 + bc == plen and bc % 2 == 0 and reg_index < bc // 2:
                    return (tcp_end + 14 + 2 * reg_index, 16)
            return None
        # response direction: registers in read-holding (0x03)
        if func == 0x03 and plen >= 9:
            bc = data[tcp_end + 8]
            if 9 + bc == plen and bc % 2 == 0 and bc >= 2 and reg_index < bc // 2:
                return (tcp_end + 9 + 2 * reg_index, 16)
        return None
    return None
