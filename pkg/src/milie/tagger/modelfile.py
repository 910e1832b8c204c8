"""Versioned model container.

Layout::

    MILIE-TAGGER\\n
    <format version>\\n
    <header JSON, one line>\\n
    <raw little-endian array bytes, concatenated in header order>
"""
from __future__ import annotations

import json

import numpy as np

from ..errors import FormatError
from .oracle import OracleTagger
from .window import WindowTagger

MAGIC = b"MILIE-TAGGER"
FORMAT_VERSION = 1
MODEL_TYPES = {cls.model_type: cls for cls in (OracleTagger, WindowTagger)}


def save(model) -> bytes:
    meta, arrays = model.state()
    entries, chunks, offset = [], [], 0
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name], dtype="<f8")
        data = arr.tobytes()
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset, "nbytes": len(data)})
        chunks.append(data)
        offset += len(data)
    header = {"type": model.model_type, "meta": meta, "arrays": entries}
    head = json.dumps(header, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    return b"\n".join([MAGIC, str(FORMAT_VERSION).encode(), head, b""]) + b"".join(chunks)


def load(data: bytes):
    parts = data.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != MAGIC:
        raise FormatError("not a MILIE-TAGGER model file")
    try:
        version = int(parts[1])
    except ValueError:
        raise FormatError("unreadable model format version") from None
    if version != FORMAT_VERSION:
        raise FormatError(f"model format version {version}, this build reads {FORMAT_VERSION}")
    try:
        header = json.loads(parts[2].decode("utf-8"))
        cls = MODEL_TYPES[header["type"]]
        body = parts[3]
        arrays = {}
        for e in header["arrays"]:
            raw = body[e["offset"]:e["offset"] + e["nbytes"]]
            if len(raw) != e["nbytes"]:
                raise FormatError(f"array {e['name']} is truncated")
            arrays[e["name"]] = np.frombuffer(raw, dtype="<f8").reshape(e["shape"]).astype(np.float64)
        return cls.from_state(header["meta"], arrays)
    except FormatError:
        raise
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise FormatError(f"corrupt model file ({exc})") from None


def save_file(model, path):
    with open(path, "wb") as f:
        f.write(save(model))


def load_file(path):
    with open(path, "rb") as f:
        return load(f.read())
