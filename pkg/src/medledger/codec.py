"""Canonical, bit-exact serialization used for signing and state digests.

Every byte a signature or digest covers is produced here, so independent
clients (the web console, external tools) can re-encode values and verify.

Encoding rules (tag byte followed by payload):

    0x01 bool   -> 0x00 | 0x01 (one byte)
    0x02 int    -> length byte, then minimal big-endian magnitude (0 -> empty);
                   non-negative only
    0x03 bytes  -> u32 big-endian length, then raw bytes
    0x04 str    -> u32 big-endian length, then UTF-8 bytes
    0x05 list   -> u32 big-endian count, then encoded items in order
    0x06 dict   -> u32 big-endian count, then (encoded key, encoded value)
                   pairs with string keys sorted by their UTF-8 bytes

Absent document hashes are encoded as the empty string.
"""

from __future__ import annotations

import hashlib
import json
import struct
from typing import Any

TAG_BOOL = 0x01
TAG_INT = 0x02
TAG_BYTES = 0x03
TAG_STR = 0x04
TAG_LIST = 0x05
TAG_DICT = 0x06

_MAX_INT = 1 << 256


def encode(value: Any) -> bytes:
    """Serialize a plain value tree (dict/list/str/bytes/int/bool) canonically."""
    out = bytearray()
    _encode_into(out, value)
    return bytes(out)


def _encode_into(out: bytearray, value: Any) -> None:
    # bool before int: bool is an int subclass
    if isinstance(value, bool):
        out.append(TAG_BOOL)
        out.append(1 if value else 0)
    elif isinstance(value, int):
        if value < 0 or value >= _MAX_INT:
            raise ValueError(f"integer out of canonical range: {value}")
        mag = value.to_bytes((value.bit_length() + 7) // 8, "big")
        out.append(TAG_INT)
        out.append(len(mag))
        out.extend(mag)
    elif isinstance(value, bytes):
        out.append(TAG_BYTES)
        out.extend(struct.pack(">I", len(value)))
        out.extend(value)
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        out.append(TAG_STR)
        out.extend(struct.pack(">I", len(raw)))
        out.extend(raw)
    elif isinstance(value, (list, tuple)):
        out.append(TAG_LIST)
        out.extend(struct.pack(">I", len(value)))
        for item in value:
            _encode_into(out, item)
    elif isinstance(value, dict):
        keys = list(value.keys())
        if any(not isinstance(k, str) for k in keys):
            raise ValueError("canonical dicts require string keys")
        keys.sort(key=lambda k: k.encode("utf-8"))
        out.append(TAG_DICT)
        out.extend(struct.pack(">I", len(keys)))
        for k in keys:
            _encode_into(out, k)
            _encode_into(out, value[k])
    else:
        raise ValueError(f"type not canonically encodable: {type(value).__name__}")


def decode(data: bytes) -> Any:
    """Inverse of :func:`encode`; rejects trailing bytes."""
    value, offset = _decode_from(data, 0)
    if offset != len(data):
        raise ValueError(f"trailing bytes after canonical value at offset {offset}")
    return value


def _read_u32(data: bytes, offset: int) -> tuple[int, int]:
    if offset + 4 > len(data):
        raise ValueError("truncated length prefix")
    (n,) = struct.unpack_from(">I", data, offset)
    return n, offset + 4


def _decode_from(data: bytes, offset: int) -> tuple[Any, int]:
    if offset >= len(data):
        raise ValueError("truncated canonical value")
    tag = data[offset]
    offset += 1
    if tag == TAG_BOOL:
        if offset >= len(data):
            raise ValueError("truncated bool")
        if data[offset] not in (0, 1):
            raise ValueError("bool byte must be 0 or 1")
        return data[offset] == 1, offset + 1
    if tag == TAG_INT:
        if offset >= len(data):
            raise ValueError("truncated integer")
        n = data[offset]
        offset += 1
        mag = data[offset : offset + n]
        if len(mag) != n:
            raise ValueError("truncated integer")
        if n > 0 and mag[0] == 0:
            raise ValueError("non-minimal integer encoding")
        return int.from_bytes(mag, "big"), offset + n
    if tag in (TAG_BYTES, TAG_STR):
        n, offset = _read_u32(data, offset)
        raw = data[offset : offset + n]
        if len(raw) != n:
            raise ValueError("truncated string")
        return (raw if tag == TAG_BYTES else raw.decode("utf-8")), offset + n
    if tag == TAG_LIST:
        n, offset = _read_u32(data, offset)
        items = []
        for _ in range(n):
            item, offset = _decode_from(data, offset)
            items.append(item)
        return items, offset
    if tag == TAG_DICT:
        n, offset = _read_u32(data, offset)
        obj: dict[str, Any] = {}
        prev: bytes | None = None
        for _ in range(n):
            key, offset = _decode_from(data, offset)
            if not isinstance(key, str):
                raise ValueError("dict key is not a string")
            raw_key = key.encode("utf-8")
            if prev is not None and raw_key <= prev:
                raise ValueError("dict keys out of canonical order")
            prev = raw_key
            obj[key], offset = _decode_from(data, offset)
        return obj, offset
    raise ValueError(f"unknown canonical tag 0x{tag:02x}")


def digest(value: Any) -> str:
    """SHA-256 hex digest of the canonical encoding."""
    return hashlib.sha256(encode(value)).hexdigest()


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def canonical_json(value: Any) -> str:
    """Compact JSON with lexicographically sorted keys (one-line, UTF-8 safe)."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
