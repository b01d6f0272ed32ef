import hashlib
import json

import pytest

from medledger import keys
from medledger.keys import Keypair, account_id, is_account_id, verify_signature


def test_account_id_is_last_20_bytes_of_sha256():
    kp = Keypair.from_seed("vector")
    expected = "0x" + hashlib.sha256(kp.public_bytes).digest()[-20:].hex()
    assert kp.account == expected
    assert account_id(kp.public_bytes) == expected


def test_account_id_requires_32_byte_key():
    with pytest.raises(ValueError):
        account_id(b"\x00" * 31)


def test_zero_account_shape():
    assert keys.ZERO_ACCOUNT == "0x" + "0" * 40
    assert is_account_id(keys.ZERO_ACCOUNT)


@pytest.mark.parametrize(
    "bad",
    ["", "0x", "0X" + "a" * 40, "0x" + "A" * 40, "0x" + "g" * 40, "0x" + "a" * 39,
     "0x" + "a" * 41, "a" * 42],
)
def test_is_account_id_rejects(bad):
    assert not is_account_id(bad)


def test_from_seed_is_deterministic_and_distinct():
    a1 = Keypair.from_seed("alpha")
    a2 = Keypair.from_seed("alpha")
    b = Keypair.from_seed("beta")
    assert a1.account == a2.account
    assert a1.private_bytes == a2.private_bytes
    assert a1.account != b.account


def test_seed_derivation_is_sha256_of_seed():
    seed = "pin-this"
    kp = Keypair.from_seed(seed)
    assert kp.private_bytes == hashlib.sha256(seed.encode()).digest()


def test_sign_verify_roundtrip():
    kp = Keypair.from_seed("signer")
    payload = b"attack at dawn"
    sig = kp.sign(payload)
    assert len(sig) == 64
    assert verify_signature(kp.public_bytes, payload, sig)
    assert not verify_signature(kp.public_bytes, payload + b"!", sig)
    assert not verify_signature(kp.public_bytes, payload, b"\x00" * 64)
    other = Keypair.from_seed("other")
    assert not verify_signature(other.public_bytes, payload, sig)


def test_generate_produces_unique_accounts():
    seen = {Keypair.generate().account for _ in range(8)}
    assert len(seen) == 8


def test_save_load_roundtrip(tmp_path):
    kp = Keypair.from_seed("disk")
    path = tmp_path / "key.json"
    kp.save(path, alias="disk-key")
    raw = json.loads(path.read_text())
    assert raw["account"] == kp.account
    assert raw["alias"] == "disk-key"
    loaded = Keypair.load(path)
    assert loaded.account == kp.account
    assert loaded.sign(b"x") == kp.sign(b"x")


def test_load_rejects_mismatched_account(tmp_path):
    kp = Keypair.from_seed("disk2")
    path = tmp_path / "key.json"
    kp.save(path)
    raw = json.loads(path.read_text())
    raw["account"] = "0x" + "1" * 40
    path.write_text(json.dumps(raw))
    with pytest.raises(ValueError):
        Keypair.load(path)
