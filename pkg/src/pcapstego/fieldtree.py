"""Field-tree JSON codec: the structured engine's interchange format.

One packet per document; nested objects per protocol layer; each leaf
carries the field's hex value, byte offset and byte length. Edits are
accepted only if they preserve the field length.
"""

import json

from .dissect import DissectedPacket, Field, Layer
from .errors import LengthMismatch, SchemaError


def emit_field_tree(p: DissectedPacket) -> str:
    layers = {}
    for layer in p.layers:
        doc = {}
        for f in layer.fields:
            key = f.name.split(".", 1)[1] if "." in f.name else f.name
            doc[key] = {
                "hex": f.value.to_bytes(f.byte_len, "big").hex(),
                "offset": f.offset,
                "len": f.byte_len,
            }
        layers[layer.name] = doc
    return json.dumps({"record_index": p.record_index, "layers": layers}, indent=2) + "\n"


def parse_field_tree(text: str) -> DissectedPacket:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict) or not isinstance(doc.get("layers"), dict):
        raise SchemaError("document must be an object with a 'layers' object")
    layers = []
    for lname, fields_doc in doc["layers"].items():
        if not isinstance(fields_doc, dict):
            raise SchemaError(f"layer {lname!r} is not an object")
        fields = []
        for key, leaf in fields_doc.items():
            name = f"{lname}.{key}"
            if not isinstance(leaf, dict) or not {"hex", "offset", "len"} <= set(leaf):
                raise SchemaError(f"field {name}: leaf must carry hex/offset/len")
            try:
                raw = bytes.fromhex(leaf["hex"])
            except (ValueError, TypeError) as e:
                raise SchemaError(f"field {name}: bad hex value") from e
            if len(raw) != leaf["len"]:
                raise LengthMismatch(
                    f"field {name}: hex is {len(raw)} bytes, declared len is {leaf['len']}"
                )
            fields.append(Field(name, leaf["offset"], leaf["len"] * 8, int.from_bytes(raw, "big")))
        layers.append(Layer(lname, tuple(fields)))
    return DissectedPacket(record_index=doc.get("record_index", 0), layers=tuple(layers))
