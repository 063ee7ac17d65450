"""Typed errors raised by the library.

All domain errors derive from PcapStegoError so the CLI can map any of
them to exit code 1.
"""


class PcapStegoError(Exception):
    pass


# --- capture I/O ---

class UnknownMagic(PcapStegoError):
    pass


class TruncatedRecord(PcapStegoError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"TruncatedRecord(index={index})")


class MultiInterface(PcapStegoError):
    pass


class UnsupportedResolution(PcapStegoError):
    pass


class InvariantViolation(PcapStegoError):
    pass


# --- codecs ---

class BadOffset(PcapStegoError):
    def __init__(self, line, message=None):
        self.line = line
        super().__init__(message or f"BadOffset(line={line})")


class BadHexDigit(PcapStegoError):
    def __init__(self, line, col, message=None):
        self.line = line
        self.col = col
        super().__init__(message or f"BadHexDigit(line={line}, col={col})")


class EmptyDocument(PcapStegoError):
    pass


class SchemaError(PcapStegoError):
    pass


class LengthMismatch(PcapStegoError):
    pass


# --- dissection / checksums ---

class ValueOverflow(PcapStegoError):
    def __init__(self, field_name, message=None):
        self.field_name = field_name
        super().__init__(message or f"ValueOverflow({field_name})")


class OddLength(PcapStegoError):
    pass


# --- message framing ---

class BadMagic(PcapStegoError):
    pass


class TruncatedStream(PcapStegoError):
    pass


class CrcMismatch(PcapStegoError):
    pass


# --- filters ---

class FilterSyntaxError(PcapStegoError):
    def __init__(self, position, message=None):
        self.position = position
        super().__init__(message or f"SyntaxError(position={position})")


class BadValue(PcapStegoError):
    pass


# --- embedding ---

class InsufficientCapacity(PcapStegoError):
    def __init__(self, needed, available):
        self.needed = needed
        self.available = available
        super().__init__(f"InsufficientCapacity(needed={needed}, available={available})")


class StaleOldByte(PcapStegoError):
    def __init__(self, record_index, offset):
        self.record_index = record_index
        self.offset = offset
        super().__init__(f"StaleOldByte(record={record_index}, offset={offset})")


class InvalidParams(PcapStegoError):
    pass
