"""Hexdump text codec: the fast engine's interchange format.

One block per packet: a UTC timestamp line, offset-prefixed lines of up
to 16 hex octets, then a blank line. Emission is bit-exact so external
text-to-pcap tools can reconvert the dump.
"""

import calendar
import re
from datetime import datetime, timezone

from .capture import Capture, Record
from .errors import BadHexDigit, BadOffset, EmptyDocument

_TS_RE = re.compile(r"^\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\.\d{1,6}$")
_LINE_RE = re.compile(r"^([0-9A-Fa-f]{4,})(\s+)")


def emit_hexdump(c: Capture) -> str:
    out = []
    for r in c.records:
        usec = r.ts_frac if c.ts_resolution == "micro" else r.ts_frac // 1000
        dt = datetime.fromtimestamp(r.ts_sec, tz=timezone.utc)
        out.append(dt.strftime("%Y-%m-%d %H:%M:%S") + ".%06d" % usec)
        for off in range(0, len(r.data), 16):
            chunk = r.data[off:off + 16]
            out.append("%04x  %s" % (off, " ".join("%02x" % b for b in chunk)))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def parse_hexdump(text: str) -> Capture:
    records = []
    cur_ts = None  # (sec, usec) or None for synthetic
    cur_bytes = None
    next_off = 0
    synth = 0

    def close_packet():
        nonlocal cur_ts, cur_bytes, next_off, synth
        if cur_bytes is None:
            return
        if cur_ts is None:
            ts = (0, synth)
            synth += 1
        else:
            ts = cur_ts
        data = bytes(cur_bytes)
        records.append(Record(ts[0], ts[1], len(data), data))
        cur_ts, cur_bytes, next_off = None, None, 0

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            close_packet()
            continue
        if _TS_RE.match(line.strip()) and cur_bytes is None:
            dt = datetime.strptime(line.strip(), "%Y-%m-%d %H:%M:%S.%f")
            cur_ts = (calendar.timegm(dt.timetuple()), dt.microsecond)
            cur_bytes = bytearray()
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise BadHexDigit(lineno, 1, f"BadHexDigit(line={lineno}, col=1): no offset prefix")
        off = int(m.group(1), 16)
        if off == 0 and cur_bytes:
            close_packet()  # next packet began without separator line
        if cur_bytes is None:
            cur_bytes = bytearray()
            next_off = 0
        if off != next_off:
            raise BadOffset(lineno, f"BadOffset(line={lineno}): got 0x{off:04x}, expected 0x{next_off:04x}")
        rest = line[m.end():]
        gutter = rest.find("  ")
        octet_text = rest if gutter == -1 else rest[:gutter]
        base_col = m.end()
        count = 0
        for tok_start in range(0, len(octet_text), 3):
            tok = octet_text[tok_start:tok_start + 2]
            for k, ch in enumerate(tok):
                if ch not in "0123456789abcdefABCDEF":
                    raise BadHexDigit(lineno, base_col + tok_start + k + 1)
            if len(tok) < 2:
                raise BadHexDigit(lineno, base_col + tok_start + len(tok) + 1)
            sep = octet_text[tok_start + 2:tok_start + 3]
            if sep and sep != " ":
                raise BadHexDigit(lineno, base_col + tok_start + 3)
            cur_bytes.append(int(tok, 16))
            count += 1
        if count > 16:
            raise BadOffset(lineno, f"BadOffset(line={lineno}): more than 16 octets")
        next_off += 16
    close_packet()
    if not records:
        raise EmptyDocument("no packets in hexdump text")
    return Capture(records=tuple(records))
