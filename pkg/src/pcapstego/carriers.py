"""Carrier catalog and stego key: where hidden bits live in a packet and
the shared secret that embed and retrieve both derive positions from.
"""

import json
from dataclasses import dataclass

from .errors import BadValue, SchemaError
from .filters import FilterExpr, parse_filter


@dataclass(frozen=True)
class PayloadRegister:
    """n_bits LSBs of one Modbus register value."""
    index: int = 0
    n_bits: int = 1
    kind = "payload_register"


@dataclass(frozen=True)
class TcpTsval:
    """n_bits LSBs of the TCP timestamp option value."""
    n_bits: int = 1
    kind = "tcp_tsval"


@dataclass(frozen=True)
class Ipv4Id:
    """n_bits LSBs of the IPv4 identification field."""
    n_bits: int = 1
    kind = "ipv4_id"


@dataclass(frozen=True)
class TimingGap:
    """One bit per packet in the parity of the inter-packet gap."""
    quantum_usec: int = 1000
    kind = "timing_gap"


CarrierKind = (PayloadRegister, TcpTsval, Ipv4Id, TimingGap)


def _validate_carrier(c):
    if isinstance(c, TimingGap):
        if c.quantum_usec < 1:
            raise BadValue("timing_gap quantum_usec must be >= 1")
    else:
        if not 1 <= c.n_bits <= 8:
            raise BadValue("n_bits must be in 1..8")
        if isinstance(c, PayloadRegister) and c.index < 0:
            raise BadValue("register index must be >= 0")
    return c


@dataclass(frozen=True)
class StegoKey:
    carrier: object
    filter: FilterExpr
    stride: int = 1
    phase: int = 0

    def __post_init__(self):
        _validate_carrier(self.carrier)
        if self.stride < 1:
            raise BadValue("stride must be >= 1")
        if not 0 <= self.phase < self.stride:
            raise BadValue("phase must be in 0..stride-1")


def carrier_capacity(carrier) -> int:
    """Bits one suitable packet can hold for this carrier."""
    return 1 if isinstance(carrier, TimingGap) else carrier.n_bits


def encode_into_value(field_value: int, bits: int, n_bits: int) -> int:
    """Replace the n_bits LSBs of field_value with bits."""
    mask = (1 << n_bits) - 1
    return (field_value & ~mask) | (bits & mask)


def decode_value(field_value: int, n_bits: int) -> int:
    return field_value & ((1 << n_bits) - 1)


def encode_into_gap(gap: int, bit: int, quantum: int) -> int:
    """Smallest gap' >= gap whose quantum-parity equals bit.

    gap and quantum are in the same time unit; distortion is < 2*quantum.
    """
    k = gap // quantum
    if k % 2 == bit:
        return gap
    return (k + 1) * quantum


def decode_gap(gap: int, quantum: int) -> int:
    return (gap // quantum) % 2


# --- key (de)serialization; this JSON is the shared secret artifact ---

def key_to_json(key: StegoKey) -> str:
    c = key.carrier
    if isinstance(c, PayloadRegister):
        cdoc = {"kind": c.kind, "index": c.index, "n_bits": c.n_bits}
    elif isinstance(c, TimingGap):
        cdoc = {"kind": c.kind, "quantum_usec": c.quantum_usec}
    else:
        cdoc = {"kind": c.kind, "n_bits": c.n_bits}
    doc = {"carrier": cdoc, "filter": key.filter.text, "stride": key.stride, "phase": key.phase}
    return json.dumps(doc, indent=2) + "\n"


def key_from_json(text: str) -> StegoKey:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"key file is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "carrier" not in doc:
        raise SchemaError("key JSON must be an object with a 'carrier' member")
    cdoc = doc["carrier"]
    kind = cdoc.get("kind") if isinstance(cdoc, dict) else None
    try:
        if kind == "payload_register":
            carrier = PayloadRegister(index=int(cdoc.get("index", 0)), n_bits=int(cdoc.get("n_bits", 1)))
        elif kind == "tcp_tsval":
            carrier = TcpTsval(n_bits=int(cdoc.get("n_bits", 1)))
        elif kind == "ipv4_id":
            carrier = Ipv4Id(n_bits=int(cdoc.get("n_bits", 1)))
        elif kind == "timing_gap":
            carrier = TimingGap(quantum_usec=int(cdoc.get("quantum_usec", 1000)))
        else:
            raise SchemaError(f"unknown carrier kind {kind!r}")
    except (TypeError, ValueError) as e:
        raise SchemaError(f"bad carrier parameters: {e}") from e
    return StegoKey(
        carrier=carrier,
        filter=parse_filter(doc.get("filter", "")),
        stride=int(doc.get("stride", 1)),
        phase=int(doc.get("phase", 0)),
    )
