"""Message framing: payload <-> MSB-first bitstream with magic, length
and CRC-32, so retrieval has a deterministic success criterion.
"""

import struct
import zlib

from .errors import BadMagic, CrcMismatch, TruncatedStream

FRAME_MAGIC = 0x5345  # "SE"
OVERHEAD_BITS = (2 + 4 + 4) * 8  # magic + length + crc


class Bits:
    """MSB-first bit string backed by a bytearray."""

    __slots__ = ("_buf", "bit_len")

    def __init__(self, data=b"", bit_len=None):
        self._buf = bytearray(data)
        self.bit_len = len(self._buf) * 8 if bit_len is None else bit_len

    def append(self, value, n):
        for i in range(n - 1, -1, -1):
            bit = (value >> i) & 1
            if self.bit_len % 8 == 0:
                self._buf.append(0)
            if bit:
                self._buf[self.bit_len // 8] |= 0x80 >> (self.bit_len % 8)
            self.bit_len += 1

    def get(self, start, n):
        """Integer value of bits [start, start+n)."""
        if start + n > self.bit_len:
            raise TruncatedStream(f"need bits [{start}, {start + n}), have {self.bit_len}")
        v = 0
        for i in range(start, start + n):
            v = (v << 1) | ((self._buf[i // 8] >> (7 - i % 8)) & 1)
        return v

    def to_bytes(self):
        return bytes(self._buf)

    def __eq__(self, other):
        return (
            isinstance(other, Bits)
            and self.bit_len == other.bit_len
            and self._buf == other._buf
        )

    def __len__(self):
        return self.bit_len


class BitReader:
    def __init__(self, bits: Bits):
        self.bits = bits
        self.pos = 0

    @property
    def remaining(self):
        return self.bits.bit_len - self.pos

    def read(self, n):
        v = self.bits.get(self.pos, n)
        self.pos += n
        return v

    def read_upto(self, n):
        """(value, count) with count = min(n, remaining)."""
        count = min(n, self.remaining)
        return self.read(count), count


def frame_message(payload: bytes) -> Bits:
    """magic || length || payload || crc32(payload), MSB-first."""
    header = struct.pack("!HI", FRAME_MAGIC, len(payload))
    crc = struct.pack("!I", zlib.crc32(payload) & 0xFFFFFFFF)
    return Bits(header + payload + crc)


def deframe_message(bits: Bits) -> bytes:
    """Inverse of frame_message; trailing bits beyond the frame are ignored."""
    if bits.bit_len < 16:
        raise TruncatedStream(f"only {bits.bit_len} bits, magic needs 16")
    if bits.get(0, 16) != FRAME_MAGIC:
        raise BadMagic(f"stream starts 0x{bits.get(0, 16):04X}, expected 0x{FRAME_MAGIC:04X}")
    if bits.bit_len < 48:
        raise TruncatedStream("stream ends inside the length field")
    length = bits.get(16, 32)
    need = 48 + length * 8 + 32
    if bits.bit_len < need:
        raise TruncatedStream(f"length field promises {need} bits, have {bits.bit_len}")
    payload = bytes(bits.get(48 + 8 * i, 8) for i in range(length))
    crc = bits.get(48 + length * 8, 32)
    if crc != zlib.crc32(payload) & 0xFFFFFFFF:
        raise CrcMismatch("payload CRC-32 does not verify")
    return payload
