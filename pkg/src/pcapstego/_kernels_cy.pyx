# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels; behavioral twin of _kernels_py."""

BACKEND = "cython"

K_IPV4_ID = 0
K_TCP_TSVAL = 1
K_PAYLOAD_REG = 2


def checksum16(bytes data):
    cdef const unsigned char[:] d = data
    cdef Py_ssize_t i, n = d.shape[0]
    cdef unsigned long s = 0
    for i in range(0, n - 1, 2):
        s += (<unsigned long>d[i] << 8) | d[i + 1]
    while s >> 16:
        s = (s & 0xFFFF) + (s >> 16)
    return (~s) & 0xFFFF


def tcp_checksum(bytes src, bytes dst, bytes segment):
    cdef const unsigned char[:] a = src
    cdef const unsigned char[:] b = dst
    cdef const unsigned char[:] d = segment
    cdef Py_ssize_t i, n = d.shape[0]
    cdef unsigned long s = 0
    for i in range(0, n - 1, 2):
        s += (<unsigned long>d[i] << 8) | d[i + 1]
    if n % 2:
        s += <unsigned long>d[n - 1] << 8
    s += ((<unsigned long>a[0] << 8) | a[1]) + ((<unsigned long>a[2] << 8) | a[3])
    s += ((<unsigned long>b[0] << 8) | b[1]) + ((<unsigned long>b[2] << 8) | b[3])
    s += 6 + <unsigned long>n
    while s >> 16:
        s = (s & 0xFFFF) + (s >> 16)
    return (~s) & 0xFFFF


def locate_carrier(bytes data, int kind, int reg_index):
    cdef const unsigned char[:] d = data
    cdef Py_ssize_t n = d.shape[0]
    cdef int ihl, dataoff, ip_end, tcp_end, pos, opt, olen
    cdef int sport, dport, plen, mbap_len, func, bc
    if n < 34 or d[12] != 0x08 or d[13] != 0x00:
        return None
    if d[14] >> 4 != 4:
        return None
    ihl = d[14] & 0x0F
    if ihl < 5:
        return None
    ip_end = 14 + ihl * 4
    if ip_end > n:
        return None
    if kind == K_IPV4_ID:
        return (18, 16)
    if d[23] != 6:
        return None
    if ip_end + 20 > n:
        return None
    dataoff = d[ip_end + 12] >> 4
    if dataoff < 5:
        return None
    tcp_end = ip_end + dataoff * 4
    if tcp_end > n:
        return None
    if kind == K_TCP_TSVAL:
        pos = ip_end + 20
        while pos < tcp_end:
            opt = d[pos]
            if opt == 0:
                return None
            if opt == 1:
                pos += 1
                continue
            if pos + 1 >= tcp_end:
                return None
            olen = d[pos + 1]
            if olen < 2 or pos + olen > tcp_end:
                return None
            if opt == 8 and olen == 10:
                return (pos + 2, 32)
            pos += olen
        return None
    if kind == K_PAYLOAD_REG:
        sport = (d[ip_end] << 8) | d[ip_end + 1]
        dport = (d[ip_end + 2] << 8) | d[ip_end + 3]
        if sport != 502 and dport != 502:
            return None
        plen = n - tcp_end
        if plen < 8:
            return None
        mbap_len = (d[tcp_end + 4] << 8) | d[tcp_end + 5]
        if mbap_len != plen - 6:
            return None
        func = d[tcp_end + 7]
        if dport == 502:
            if func == 0x10 and plen >= 14:
                bc = d[tcp_end + 13]
                if 14 + bc == plen and bc % 2 == 0 and reg_index < bc // 2:
                    return (tcp_end + 14 + 2 * reg_index, 16)
            return None
        if func == 0x03 and plen >= 9:
            bc = d[tcp_end + 8]
            if 9 + bc == plen and bc % 2 == 0 and bc >= 2 and reg_index < bc // 2:
                return (tcp_end + 9 + 2 * reg_index, 16)
        return None
    return None
