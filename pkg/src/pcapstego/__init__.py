"""Synthetic steganographic embedding in ICS packet captures.

A library and CLI that embeds hidden messages into recorded (or
generated) Modbus-TCP network captures, retrieves them with a shared
key, and validates that the output stays structurally clean.
"""

from .capture import Capture, Record, read_capture, write_capture
from .carriers import (
    Ipv4Id,
    PayloadRegister,
    StegoKey,
    TcpTsval,
    TimingGap,
    key_from_json,
    key_to_json,
)
from .covergen import CoverParams, generate_cover
from .dissect import dissect_packet, ipv4_checksum, locate_carrier_field, reserialize, tcp_checksum
from .engines import (
    PatchPlan,
    apply_plan,
    embed_structured,
    filter_capture,
    plan_fast,
    select_carriers,
)
from .fieldtree import emit_field_tree, parse_field_tree
from .filters import parse_filter
from .framing import Bits, deframe_message, frame_message
from .hexdump import emit_hexdump, parse_hexdump
from .verify import diff_captures, retrieve, validate_structure

__version__ = "0.1.0"

__all__ = [
    "Bits",
    "Capture",
    "CoverParams",
    "Ipv4Id",
    "PatchPlan",
    "PayloadRegister",
    "Record",
    "StegoKey",
    "TcpTsval",
    "TimingGap",
    "apply_plan",
    "deframe_message",
    "diff_captures",
    "dissect_packet",
    "embed_structured",
    "emit_field_tree",
    "emit_hexdump",
    "filter_capture",
    "frame_message",
    "generate_cover",
    "ipv4_checksum",
    "key_from_json",
    "key_to_json",
    "locate_carrier_field",
    "parse_field_tree",
    "parse_filter",
    "parse_hexdump",
    "plan_fast",
    "read_capture",
    "reserialize",
    "retrieve",
    "select_carriers",
    "tcp_checksum",
    "validate_structure",
    "write_capture",
]
