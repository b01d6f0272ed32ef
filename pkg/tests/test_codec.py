"""Pinned byte vectors and round-trip properties for the canonical codec.

The byte vectors here are the cross-language contract: the web console's
encoder is tested against the same constants. Change them and every signed
payload in the wild breaks.
"""

import hashlib

import pytest
from hypothesis import given
from hypothesis import strategies as st

from medledger import codec

VECTORS = [
    (False, bytes.fromhex("0100")),
    (True, bytes.fromhex("0101")),
    (0, bytes.fromhex("0200")),
    (1, bytes.fromhex("020101")),
    (255, bytes.fromhex("0201ff")),
    (256, bytes.fromhex("02020100")),
    (2**256 - 1, bytes.fromhex("0220" + "ff" * 32)),
    (b"", bytes.fromhex("0300000000")),
    (b"ab", bytes.fromhex("03000000026162")),
    ("", bytes.fromhex("0400000000")),
    ("abc", bytes.fromhex("0400000003616263")),
    ("é", bytes.fromhex("0400000002c3a9")),
    ([], bytes.fromhex("0500000000")),
    ([True, 2], bytes.fromhex("05000000020101020102")),
    ({}, bytes.fromhex("0600000000")),
    (
        {"b": 1, "a": 2},
        bytes.fromhex("0600000002" + "040000000161" + "020102" + "040000000162" + "020101"),
    ),
]


@pytest.mark.parametrize("value,expected", VECTORS, ids=repr)
def test_encode_vectors(value, expected):
    assert codec.encode(value) == expected


@pytest.mark.parametrize("value,expected", VECTORS, ids=repr)
def test_decode_vectors(value, expected):
    decoded = codec.decode(expected)
    assert decoded == value
    assert type(decoded) is type(value) or isinstance(value, tuple)


def test_digest_is_plain_sha256_of_encoding():
    assert codec.digest({}) == hashlib.sha256(bytes.fromhex("0600000000")).hexdigest()
    payload = {"a": [1, "x"], "b": True}
    assert codec.digest(payload) == hashlib.sha256(codec.encode(payload)).hexdigest()


def test_dict_keys_sort_by_utf8_bytes_not_codepoint_order():
    # "z" (0x7a) sorts before "é" (0xc3 0xa9) in byte order
    enc = codec.encode({"é": 1, "z": 2})
    z_pos = enc.find(b"z")
    e_pos = enc.find(b"\xc3\xa9")
    assert 0 < z_pos < e_pos


def test_bool_and_int_encodings_differ():
    assert codec.encode(True) != codec.encode(1)
    assert codec.encode(False) != codec.encode(0)
    assert codec.decode(codec.encode(True)) is True


def test_tuple_encodes_as_list():
    assert codec.encode((1, 2)) == codec.encode([1, 2])


@pytest.mark.parametrize(
    "bad",
    [
        -1,
        2**256,
        object(),
        {1: "non-string key"},
        None,
    ],
    ids=["negative", "too-large", "object", "int-key", "none"],
)
def test_encode_rejects(bad):
    with pytest.raises(ValueError):
        codec.encode(bad)


@pytest.mark.parametrize(
    "raw",
    [
        b"",
        b"\x07",                      # unknown tag
        b"\x01",                      # truncated bool
        b"\x01\x02",                  # bool byte out of range
        b"\x02",                      # truncated int
        b"\x02\x02\x00\x01",          # non-minimal int
        b"\x02\x01",                  # int payload missing
        b"\x03\x00\x00\x00\x02a",     # short bytes
        b"\x04\x00\x00",              # truncated length
        b"\x05\x00\x00\x00\x01",      # missing list item
        b"\x02\x00\x00",              # trailing byte
        # dict with keys out of order: {"b":1} ++ {"a":1} payloads, count 2
        b"\x06\x00\x00\x00\x02"
        b"\x04\x00\x00\x00\x01b\x02\x00"
        b"\x04\x00\x00\x00\x01a\x02\x00",
        # dict with duplicate key
        b"\x06\x00\x00\x00\x02"
        b"\x04\x00\x00\x00\x01a\x02\x00"
        b"\x04\x00\x00\x00\x01a\x02\x00",
        # dict with non-string key
        b"\x06\x00\x00\x00\x01\x02\x01\x01\x02\x00",
    ],
    ids=[
        "empty", "unknown-tag", "trunc-bool", "bad-bool-byte", "trunc-int",
        "nonminimal-int", "short-int", "short-bytes", "trunc-len",
        "short-list", "trailing", "unsorted-dict", "dup-key", "int-dict-key",
    ],
)
def test_decode_rejects(raw):
    with pytest.raises(ValueError):
        codec.decode(raw)


json_scalars = st.one_of(
    st.booleans(),
    st.integers(min_value=0, max_value=2**256 - 1),
    st.text(max_size=40),
    st.binary(max_size=40),
)
json_values = st.recursive(
    json_scalars,
    lambda children: st.one_of(
        st.lists(children, max_size=6),
        st.dictionaries(st.text(max_size=12), children, max_size=6),
    ),
    max_leaves=25,
)


@given(json_values)
def test_roundtrip(value):
    assert codec.decode(codec.encode(value)) == _tuples_to_lists(value)


@given(json_values)
def test_encoding_is_injective_on_reordered_dicts(value):
    # encoding twice, or after reordering dict insertion, is byte-identical
    assert codec.encode(value) == codec.encode(_reinsert(value))


def _tuples_to_lists(value):
    if isinstance(value, (list, tuple)):
        return [_tuples_to_lists(v) for v in value]
    if isinstance(value, dict):
        return {k: _tuples_to_lists(v) for k, v in value.items()}
    return value


def _reinsert(value):
    if isinstance(value, dict):
        return {k: _reinsert(value[k]) for k in reversed(list(value.keys()))}
    if isinstance(value, list):
        return [_reinsert(v) for v in value]
    return value


def test_canonical_json_is_sorted_and_compact():
    assert codec.canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert codec.canonical_json({"s": "é"}) == '{"s":"é"}'
