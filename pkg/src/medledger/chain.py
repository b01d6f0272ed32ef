"""Hash-linked blocks, signed transactions, and the genesis configuration.

Chain layout follows the append-only rule: every block header carries the
SHA-256 of its predecessor's header, so altering any committed byte breaks
the link or a seal and is caught on replay.

Transactions are self-certifying: the wire form carries the sender's
public key, and verification checks both that the key hashes to the
sender's account id and that the Ed25519 signature covers the canonical
encoding of (args, chain_id, nonce, op, sender, value).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import codec
from .contract.state import MAX_BALANCE, ContractState, Role
from .errors import InvalidConfig
from .keys import ZERO_ACCOUNT, Keypair, account_id, is_account_id, verify_signature

GENESIS_PREV_HASH = "0" * 64
DEFAULT_BLOCK_INTERVAL_MS = 2000

_HEX_DIGITS = set("0123456789abcdef")


def _is_hex(value: str, length: int) -> bool:
    # bytes.fromhex would accept uppercase, so the wire form checks the
    # canonical lowercase spelling explicitly
    return len(value) == length and set(value) <= _HEX_DIGITS


# -- transactions --------------------------------------------------------------


@dataclass(frozen=True)
class Transaction:
    chain_id: str
    sender: str
    public_key: str  # 32 raw bytes, hex
    nonce: int
    op: str
    args: dict
    value: int
    signature: str  # 64 raw bytes, hex

    @classmethod
    def build(
        cls,
        key: Keypair,
        chain_id: str,
        nonce: int,
        op: str,
        args: dict,
        value: int = 0,
    ) -> "Transaction":
        unsigned = cls(
            chain_id=chain_id,
            sender=key.account,
            public_key=key.public_bytes.hex(),
            nonce=nonce,
            op=op,
            args=dict(args),
            value=value,
            signature="",
        )
        return cls(
            **{**unsigned.__dict__, "signature": key.sign(unsigned.signing_payload()).hex()}
        )

    def signing_payload(self) -> bytes:
        return codec.encode(
            {
                "args": self.args,
                "chain_id": self.chain_id,
                "nonce": self.nonce,
                "op": self.op,
                "sender": self.sender,
                "value": self.value,
            }
        )

    def to_canonical(self) -> dict:
        return {
            "args": self.args,
            "chain_id": self.chain_id,
            "nonce": self.nonce,
            "op": self.op,
            "public_key": self.public_key,
            "sender": self.sender,
            "signature": self.signature,
            "value": self.value,
        }

    def tx_hash(self) -> str:
        return codec.digest(self.to_canonical())

    def verify(self) -> bool:
        """Signature check: key matches sender id and covers the payload."""
        try:
            pub = bytes.fromhex(self.public_key)
            sig = bytes.fromhex(self.signature)
        except ValueError:
            return False
        if len(pub) != 32 or len(sig) != 64 or account_id(pub) != self.sender:
            return False
        return verify_signature(pub, self.signing_payload(), sig)

    def to_wire(self) -> dict:
        wire = self.to_canonical()
        wire["value"] = str(self.value)  # keep 128-bit values exact in JSON
        return wire

    @classmethod
    def from_wire(cls, wire: dict) -> "Transaction":
        if not isinstance(wire, dict):
            raise ValueError("transaction must be an object")
        required = {
            "args",
            "chain_id",
            "nonce",
            "op",
            "public_key",
            "sender",
            "signature",
            "value",
        }
        if set(wire) != required:
            raise ValueError(f"transaction fields must be exactly {sorted(required)}")
        if not is_account_id(wire["sender"]):
            raise ValueError("sender: not an account id")
        nonce = wire["nonce"]
        if isinstance(nonce, bool) or not isinstance(nonce, int) or not 0 <= nonce < 1 << 64:
            raise ValueError("nonce: not a 64-bit unsigned integer")
        value_raw = wire["value"]
        if isinstance(value_raw, str) and value_raw.isdigit():
            value = int(value_raw)
        elif isinstance(value_raw, int) and not isinstance(value_raw, bool) and value_raw >= 0:
            value = value_raw
        else:
            raise ValueError("value: not an unsigned decimal")
        if value > MAX_BALANCE:
            raise ValueError("value: exceeds 128 bits")
        if not isinstance(wire["op"], str) or not isinstance(wire["args"], dict):
            raise ValueError("op/args malformed")
        if not isinstance(wire["chain_id"], str):
            raise ValueError("chain_id: not a string")
        for k, length in (("public_key", 64), ("signature", 128)):
            if not isinstance(wire[k], str) or not _is_hex(wire[k], length):
                raise ValueError(f"{k}: not {length} lowercase hex chars")
        return cls(
            chain_id=wire["chain_id"],
            sender=wire["sender"],
            public_key=wire["public_key"],
            nonce=nonce,
            op=wire["op"],
            args=wire["args"],
            value=value,
            signature=wire["signature"],
        )


# -- blocks ---------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    chain_id: str
    height: int
    prev_hash: str
    timestamp: int
    proposer: str
    slot: int
    txs: tuple[Transaction, ...]
    state_root: str
    seal_public_key: str = ""
    seal_signature: str = ""

    def tx_root(self) -> str:
        return codec.digest([tx.to_canonical() for tx in self.txs])

    def header(self) -> dict:
        return {
            "chain_id": self.chain_id,
            "height": self.height,
            "prev_hash": self.prev_hash,
            "proposer": self.proposer,
            "slot": self.slot,
            "state_root": self.state_root,
            "timestamp": self.timestamp,
            "tx_root": self.tx_root(),
        }

    def header_hash(self) -> str:
        return codec.digest(self.header())

    def sealed_by(self, key: Keypair) -> "Block":
        sig = key.sign(bytes.fromhex(self.header_hash()))
        return Block(
            **{
                **self.__dict__,
                "seal_public_key": key.public_bytes.hex(),
                "seal_signature": sig.hex(),
            }
        )

    def verify_seal(self) -> bool:
        try:
            pub = bytes.fromhex(self.seal_public_key)
            sig = bytes.fromhex(self.seal_signature)
        except ValueError:
            return False
        if len(pub) != 32 or len(sig) != 64 or account_id(pub) != self.proposer:
            return False
        return verify_signature(pub, bytes.fromhex(self.header_hash()), sig)

    def to_wire(self) -> dict:
        return {
            "chain_id": self.chain_id,
            "height": self.height,
            "prev_hash": self.prev_hash,
            "proposer": self.proposer,
            "seal": {"public_key": self.seal_public_key, "signature": self.seal_signature},
            "slot": self.slot,
            "state_root": self.state_root,
            "timestamp": self.timestamp,
            "txs": [tx.to_wire() for tx in self.txs],
        }

    def to_line(self) -> str:
        """One canonical newline-delimited JSON line for the chain file."""
        return codec.canonical_json(self.to_wire())

    @classmethod
    def from_wire(cls, wire: dict) -> "Block":
        if not isinstance(wire, dict):
            raise ValueError("block must be an object")
        required = {
            "chain_id",
            "height",
            "prev_hash",
            "proposer",
            "seal",
            "slot",
            "state_root",
            "timestamp",
            "txs",
        }
        if set(wire) != required:
            raise ValueError(f"block fields must be exactly {sorted(required)}")
        for k in ("height", "slot", "timestamp"):
            v = wire[k]
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < 1 << 64:
                raise ValueError(f"{k}: not a 64-bit unsigned integer")
        if not isinstance(wire["chain_id"], str):
            raise ValueError("chain_id: not a string")
        for k in ("prev_hash", "state_root"):
            if not isinstance(wire[k], str) or not _is_hex(wire[k], 64):
                raise ValueError(f"{k}: not 64 lowercase hex chars")
        if wire["proposer"] != ZERO_ACCOUNT and not is_account_id(wire["proposer"]):
            raise ValueError("proposer: not an account id")
        seal = wire["seal"]
        if (
            not isinstance(seal, dict)
            or set(seal) != {"public_key", "signature"}
            or not all(isinstance(seal[k], str) for k in seal)
        ):
            raise ValueError("seal malformed")
        # genesis carries an empty seal; anything else must be canonical hex
        if seal["public_key"] and not _is_hex(seal["public_key"], 64):
            raise ValueError("seal public_key: not 64 lowercase hex chars")
        if seal["signature"] and not _is_hex(seal["signature"], 128):
            raise ValueError("seal signature: not 128 lowercase hex chars")
        if not isinstance(wire["txs"], list):
            raise ValueError("txs: not a list")
        return cls(
            chain_id=wire["chain_id"],
            height=wire["height"],
            prev_hash=wire["prev_hash"],
            timestamp=wire["timestamp"],
            proposer=wire["proposer"],
            slot=wire["slot"],
            txs=tuple(Transaction.from_wire(t) for t in wire["txs"]),
            state_root=wire["state_root"],
            seal_public_key=seal["public_key"],
            seal_signature=seal["signature"],
        )

    @classmethod
    def from_line(cls, line: str) -> "Block":
        return cls.from_wire(json.loads(line))


# -- genesis --------------------------------------------------------------------


@dataclass(frozen=True)
class GenesisConfig:
    """Chain identity: authority set, administrators, initial balances."""

    chain_id: str
    authorities: tuple[str, ...]
    administrators: tuple[str, ...]
    balances: dict[str, int] = field(default_factory=dict)
    genesis_time: int = 0
    block_interval_ms: int = DEFAULT_BLOCK_INTERVAL_MS
    permissive_guards: bool = False

    def __post_init__(self):
        if not self.chain_id:
            raise InvalidConfig("chain_id must be non-empty")
        if not self.authorities:
            raise InvalidConfig("authority set must be non-empty")
        for acct in (*self.authorities, *self.administrators, *self.balances):
            if not is_account_id(acct):
                raise InvalidConfig(f"not an account id: {acct}")
        if len(set(self.authorities)) != len(self.authorities):
            raise InvalidConfig("duplicate authority")
        if self.block_interval_ms <= 0:
            raise InvalidConfig("block interval must be positive")
        total = 0
        for amount in self.balances.values():
            if not isinstance(amount, int) or amount < 0 or amount > MAX_BALANCE:
                raise InvalidConfig("balance out of range")
            total += amount
        if total > MAX_BALANCE:
            raise InvalidConfig("total supply exceeds 128 bits")

    def proposer_for(self, height: int, slot: int = 0) -> str:
        """Round-robin schedule; each missed slot passes the turn onward."""
        return self.authorities[(height + slot) % len(self.authorities)]

    def to_wire(self) -> dict:
        return {
            "administrators": list(self.administrators),
            "authorities": list(self.authorities),
            "balances": {a: str(v) for a, v in sorted(self.balances.items())},
            "block_interval_ms": self.block_interval_ms,
            "chain_id": self.chain_id,
            "genesis_time": self.genesis_time,
            "permissive_guards": self.permissive_guards,
        }

    @classmethod
    def from_wire(cls, wire: dict) -> "GenesisConfig":
        try:
            return cls(
                chain_id=wire["chain_id"],
                authorities=tuple(wire["authorities"]),
                administrators=tuple(wire.get("administrators", ())),
                balances={a: int(v) for a, v in wire.get("balances", {}).items()},
                genesis_time=int(wire.get("genesis_time", 0)),
                block_interval_ms=int(wire.get("block_interval_ms", DEFAULT_BLOCK_INTERVAL_MS)),
                permissive_guards=bool(wire.get("permissive_guards", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(str(exc)) from None

    def genesis_hash(self) -> str:
        return codec.digest(self.to_wire())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_wire(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "GenesisConfig":
        try:
            return cls.from_wire(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"genesis config is not valid JSON: {exc}") from None


def genesis_state(config: GenesisConfig) -> ContractState:
    state = ContractState(permissive=config.permissive_guards)
    for admin in config.administrators:
        state.roles[admin] = Role.ADMINISTRATOR
    for account, amount in config.balances.items():
        if amount:
            state.balances[account] = amount
    return state


def genesis_block(config: GenesisConfig) -> Block:
    return Block(
        chain_id=config.chain_id,
        height=0,
        prev_hash=GENESIS_PREV_HASH,
        timestamp=config.genesis_time,
        proposer=ZERO_ACCOUNT,
        slot=0,
        txs=(),
        state_root=genesis_state(config).digest(),
    )
