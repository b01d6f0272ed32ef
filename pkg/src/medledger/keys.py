"""Ed25519 keypairs and wallet-address derivation.

An account id is the trailing 20 bytes of the SHA-256 of the raw 32-byte
public key, rendered as 0x-prefixed lowercase hex. The derivation is
deterministic, so transactions can carry the public key and stay
self-certifying: anyone can check that the key hashes to the sender id.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric import ed25519

ACCOUNT_RE = re.compile(r"^0x[0-9a-f]{40}$")
ZERO_ACCOUNT = "0x" + "0" * 40


def account_id(public_key: bytes) -> str:
    """Derive the wallet address for a raw 32-byte Ed25519 public key."""
    if len(public_key) != 32:
        raise ValueError(f"expected 32-byte public key, got {len(public_key)}")
    return "0x" + hashlib.sha256(public_key).digest()[-20:].hex()


def is_account_id(value: str) -> bool:
    return isinstance(value, str) and bool(ACCOUNT_RE.match(value))


def verify_signature(public_key: bytes, payload: bytes, signature: bytes) -> bool:
    try:
        ed25519.Ed25519PublicKey.from_public_bytes(public_key).verify(signature, payload)
        return True
    except (InvalidSignature, ValueError):
        return False


@dataclass(frozen=True)
class Keypair:
    """A signing identity: private key, public key, derived account id."""

    private_bytes: bytes
    public_bytes: bytes
    account: str

    @classmethod
    def generate(cls) -> "Keypair":
        return cls._from_private(ed25519.Ed25519PrivateKey.generate())

    @classmethod
    def from_seed(cls, seed: str | bytes) -> "Keypair":
        """Deterministic keypair: the private key is SHA-256 of the seed."""
        raw = seed.encode("utf-8") if isinstance(seed, str) else seed
        return cls.from_private_bytes(hashlib.sha256(raw).digest())

    @classmethod
    def from_private_bytes(cls, private_bytes: bytes) -> "Keypair":
        return cls._from_private(ed25519.Ed25519PrivateKey.from_private_bytes(private_bytes))

    @classmethod
    def _from_private(cls, key: ed25519.Ed25519PrivateKey) -> "Keypair":
        from cryptography.hazmat.primitives import serialization

        priv = key.private_bytes(
            serialization.Encoding.Raw,
            serialization.PrivateFormat.Raw,
            serialization.NoEncryption(),
        )
        pub = key.public_key().public_bytes(
            serialization.Encoding.Raw, serialization.PublicFormat.Raw
        )
        return cls(private_bytes=priv, public_bytes=pub, account=account_id(pub))

    def sign(self, payload: bytes) -> bytes:
        key = ed25519.Ed25519PrivateKey.from_private_bytes(self.private_bytes)
        return key.sign(payload)

    # -- key files -------------------------------------------------------

    def save(self, path: str | Path, alias: str | None = None) -> None:
        doc = {
            "account": self.account,
            "private_key": self.private_bytes.hex(),
            "public_key": self.public_bytes.hex(),
        }
        if alias:
            doc["alias"] = alias
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Keypair":
        doc = json.loads(Path(path).read_text())
        pair = cls.from_private_bytes(bytes.fromhex(doc["private_key"]))
        if doc.get("account") not in (None, pair.account):
            raise ValueError(f"key file {path}: account does not match private key")
        return pair
