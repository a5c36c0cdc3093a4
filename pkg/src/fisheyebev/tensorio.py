"""Flat binary tensor container for encoded target maps and predictions.

Layout (all little-endian):
    bytes 0..3   magic b"FPNT"
    uint32       format version (currently 1)
    uint32       header length in bytes
    header       UTF-8 JSON: {"channels": [{"name", "shape"}, ...],
                              "meta": {...}}
    payload      one row-major float32 plane per channel, in header order
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"FPNT"
VERSION = 1


def write_tensor_container(path, channels: dict[str, np.ndarray], meta: dict | None = None):
    """Write named float planes plus free-form metadata."""
    header = {
        "channels": [
            {"name": name, "shape": list(np.asarray(arr).shape)}
            for name, arr in channels.items()
        ],
        "meta": meta or {},
    }
    header_bytes = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(header_bytes)))
        fh.write(header_bytes)
        for arr in channels.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_tensor_container(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read a container back; returns (channels, meta) with float32 planes."""
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != MAGIC:
        raise FormatError(f"{path}: not a tensor container (bad magic)")
    version, header_len = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported container version {version}")
    if len(data) < 12 + header_len:
        raise FormatError(f"{path}: truncated header")
    try:
        header = json.loads(data[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: malformed header: {exc}") from exc
    offset = 12 + header_len
    channels: dict[str, np.ndarray] = {}
    for entry in header.get("channels", []):
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 4
        if offset + nbytes > len(data):
            raise FormatError(f"{path}: truncated payload for channel {entry['name']!r}")
        plane = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        channels[entry["name"]] = plane.reshape(shape).copy()
        offset += nbytes
    if offset != len(data):
        raise FormatError(f"{path}: trailing bytes after last channel")
    return channels, header.get("meta", {})
