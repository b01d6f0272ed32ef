"""Ledger node: mempool admission, block proposal, validation, replay.

State mutation is single-writer: it happens only when a block commits, in
block order, under the node lock. Readers always get the last committed
state object, which is never mutated in place after commit (commits build
a fresh state and swap the reference).
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .chain import Block, GenesisConfig, Transaction, genesis_block, genesis_state
from .contract.ops import OPS, apply_operation, validate_args
from .contract.state import ContractState
from .errors import (
    BadNonce,
    BadSignature,
    GuardRejection,
    InvalidArgument,
    LedgerError,
    NotYourTurn,
    UnknownOperation,
)
from .keys import Keypair

MEMPOOL_NONCE_WINDOW = 64

# block rejection reasons
BAD_LINK = "BadLink"
WRONG_PROPOSER = "WrongProposer"
BAD_SEAL = "BadSeal"
BAD_TX = "BadTx"
BAD_STATE_ROOT = "BadStateRoot"


@dataclass
class Receipt:
    tx_hash: str
    op: str
    sender: str
    status: str  # "ok" | "error"
    code: str | None = None
    message: str | None = None
    result: object = None
    height: int | None = None
    index: int | None = None

    def to_wire(self) -> dict:
        return {
            "tx_hash": self.tx_hash,
            "op": self.op,
            "sender": self.sender,
            "status": self.status,
            "code": self.code,
            "message": self.message,
            "result": _wire_result(self.result),
            "height": self.height,
            "index": self.index,
        }


def _wire_result(result):
    if isinstance(result, int) and not isinstance(result, bool) and result >= 1 << 53:
        return str(result)
    return result


def apply_transaction(state: ContractState, tx: Transaction) -> Receipt:
    """Apply one signed transaction to mutable state.

    Admission failures (bad signature, wrong nonce, unknown op, malformed
    args) raise: a block containing such a transaction is invalid. Guard
    rejections produce an error receipt and advance only the nonce.
    """
    if not tx.verify():
        raise BadSignature(tx.tx_hash())
    expected = state.nonce(tx.sender)
    if tx.nonce != expected:
        raise BadNonce(f"got {tx.nonce}, expected {expected}")
    if tx.op not in OPS:
        raise UnknownOperation(tx.op)
    validate_args(tx.op, tx.args)
    if tx.value and not OPS[tx.op].accepts_value:
        raise InvalidArgument(f"{tx.op} does not accept token value")

    state.nonces[tx.sender] = expected + 1
    receipt = Receipt(tx_hash=tx.tx_hash(), op=tx.op, sender=tx.sender, status="ok")
    try:
        receipt.result = apply_operation(state, tx.sender, tx.op, tx.args, tx.value)
    except GuardRejection as exc:
        receipt.status = "error"
        receipt.code = exc.code
        receipt.message = exc.message
    return receipt


def execute_block_txs(
    state: ContractState, txs: Iterable[Transaction], chain_id: str
) -> list[Receipt]:
    """Run a block's transactions in order; raises on any admission failure."""
    receipts = []
    for index, tx in enumerate(txs):
        if tx.chain_id != chain_id:
            raise BadSignature(f"tx {index}: wrong chain id")
        receipt = apply_transaction(state, tx)
        receipt.index = index
        receipts.append(receipt)
    return receipts


@dataclass
class ValidationOutcome:
    ok: bool
    reason: str | None = None
    detail: str | None = None
    state: ContractState | None = None
    receipts: list[Receipt] = field(default_factory=list)


class Node:
    """One ledger replica: committed chain + state, mempool, proposer key."""

    def __init__(
        self,
        config: GenesisConfig,
        key: Keypair | None = None,
        chain_path: str | Path | None = None,
        clock=None,
    ):
        self.config = config
        self.key = key
        self.chain_path = Path(chain_path) if chain_path else None
        self.clock = clock or (lambda: int(time.time()))
        self.lock = threading.RLock()
        self.state: ContractState = genesis_state(config)
        self.blocks: list[Block] = [genesis_block(config)]
        self.receipts: dict[str, Receipt] = {}
        self.mempool: list[Transaction] = []
        self._pool_hashes: set[str] = set()
        if self.chain_path is not None:
            self._open_chain_file()

    # -- chain file --------------------------------------------------------

    def _open_chain_file(self) -> None:
        if self.chain_path.exists() and self.chain_path.stat().st_size > 0:
            lines = self.chain_path.read_text().splitlines()
            blocks = [Block.from_line(line) for line in lines if line]
            if not blocks or blocks[0].header_hash() != self.blocks[0].header_hash():
                raise LedgerError(f"chain file {self.chain_path} does not match genesis")
            for block in blocks[1:]:
                outcome = self.validate_block(block)
                if not outcome.ok:
                    raise LedgerError(
                        f"chain file invalid at height {block.height}: {outcome.reason}"
                    )
                self._commit(block, outcome, persist=False)
        else:
            self.chain_path.parent.mkdir(parents=True, exist_ok=True)
            self.chain_path.write_text(self.blocks[0].to_line() + "\n")

    # -- views ---------------------------------------------------------------

    @property
    def tip(self) -> Block:
        return self.blocks[-1]

    @property
    def height(self) -> int:
        return self.tip.height

    def committed_state(self) -> ContractState:
        return self.state

    def find_tx(self, tx_hash: str) -> tuple[str, Receipt | None]:
        """Status of a transaction: committed, pending, or unknown."""
        with self.lock:
            if tx_hash in self.receipts:
                return "committed", self.receipts[tx_hash]
            if tx_hash in self._pool_hashes:
                return "pending", None
            return "unknown", None

    # -- mempool ---------------------------------------------------------------

    def admit_tx(self, tx: Transaction) -> str:
        """Validate and queue a transaction; returns its hash.

        Raises BadSignature / BadNonce / UnknownOperation / InvalidArgument.
        Nonces may run ahead of the committed one within a small window so
        a sender can queue several transactions.
        """
        if tx.chain_id != self.config.chain_id:
            raise BadSignature("wrong chain id")
        if not tx.verify():
            raise BadSignature(tx.tx_hash())
        if tx.op not in OPS:
            raise UnknownOperation(tx.op)
        validate_args(tx.op, tx.args)
        if tx.value and not OPS[tx.op].accepts_value:
            raise InvalidArgument(f"{tx.op} does not accept token value")
        with self.lock:
            tx_hash = tx.tx_hash()
            if tx_hash in self._pool_hashes or tx_hash in self.receipts:
                raise BadNonce("duplicate transaction")
            committed = self.state.nonce(tx.sender)
            if tx.nonce < committed:
                raise BadNonce(f"got {tx.nonce}, expected {committed}")
            if tx.nonce >= committed + MEMPOOL_NONCE_WINDOW:
                raise BadNonce(f"nonce {tx.nonce} too far ahead of {committed}")
            if any(
                p.sender == tx.sender and p.nonce == tx.nonce for p in self.mempool
            ):
                raise BadNonce(f"nonce {tx.nonce} already pending")
            self.mempool.append(tx)
            self._pool_hashes.add(tx_hash)
            return tx_hash

    def _prune_mempool(self) -> None:
        kept = []
        for tx in self.mempool:
            if tx.tx_hash() in self.receipts or tx.nonce < self.state.nonce(tx.sender):
                self._pool_hashes.discard(tx.tx_hash())
            else:
                kept.append(tx)
        self.mempool = kept

    def _select_txs(self, state: ContractState) -> list[Transaction]:
        """FIFO selection: include every pending tx that admits cleanly.

        `state` is a scratch copy that accumulates the effects of selected
        transactions, so later picks see earlier ones. Re-scans until a
        fixpoint so a tx whose nonce became current in this pass is still
        picked up, preserving arrival order otherwise. Guard rejections do
        not exclude a tx; only admission failures do.
        """
        selected: list[Transaction] = []
        remaining = list(self.mempool)
        progress = True
        while progress:
            progress = False
            still: list[Transaction] = []
            for tx in remaining:
                if tx.nonce != state.nonce(tx.sender):
                    still.append(tx)
                    continue
                trial = state.clone()
                try:
                    apply_transaction(trial, tx)
                except LedgerError:
                    continue  # defensive; pool admission should have caught it
                state = trial
                selected.append(tx)
                progress = True
            remaining = still
        return selected

    # -- proposal / validation / commit ------------------------------------------

    def next_proposal_slot(self, now: int | None = None, automine: bool = False) -> int | None:
        """Smallest due slot this node may seal for the next height, if any."""
        if self.key is None:
            return None
        height = self.height + 1
        n = len(self.config.authorities)
        now = self.clock() if now is None else now
        interval_s = max(1, self.config.block_interval_ms // 1000)
        for slot in range(n):
            if self.config.proposer_for(height, slot) != self.key.account:
                continue
            if automine or now >= self.tip.timestamp + (slot + 1) * interval_s:
                return slot
            return None
        return None

    def propose_block(
        self,
        slot: int = 0,
        timestamp: int | None = None,
        txs: list[Transaction] | None = None,
    ) -> Block:
        """Seal the next block from the mempool (or an explicit tx list)."""
        if self.key is None:
            raise NotYourTurn("node has no sealing key")
        with self.lock:
            height = self.height + 1
            if self.config.proposer_for(height, slot) != self.key.account:
                raise NotYourTurn(
                    f"height {height} slot {slot} belongs to "
                    f"{self.config.proposer_for(height, slot)}"
                )
            timestamp = self.clock() if timestamp is None else timestamp
            timestamp = max(timestamp, self.tip.timestamp)
            state = self.state.clone()
            if txs is None:
                nonce_view = self.state.clone()
                txs = self._select_txs(nonce_view)
            execute_block_txs(state, txs, self.config.chain_id)
            block = Block(
                chain_id=self.config.chain_id,
                height=height,
                prev_hash=self.tip.header_hash(),
                timestamp=timestamp,
                proposer=self.key.account,
                slot=slot,
                txs=tuple(txs),
                state_root=state.digest(),
            )
            return block.sealed_by(self.key)

    def validate_block(self, block: Block) -> ValidationOutcome:
        """Full admission check against the current tip, with state replay."""
        return validate_against(self.config, self.tip, self.state, block)

    def commit_block(self, block: Block) -> ValidationOutcome:
        with self.lock:
            outcome = self.validate_block(block)
            if outcome.ok:
                self._commit(block, outcome)
            return outcome

    def _commit(self, block: Block, outcome: ValidationOutcome, persist: bool = True) -> None:
        self.state = outcome.state
        self.blocks.append(block)
        for receipt in outcome.receipts:
            receipt.height = block.height
            self.receipts[receipt.tx_hash] = receipt
        self._prune_mempool()
        if persist and self.chain_path is not None:
            with self.chain_path.open("a") as fh:
                fh.write(block.to_line() + "\n")

    def seal_pending(self, slot: int = 0, timestamp: int | None = None) -> Block:
        """Propose and immediately commit (single-node / automine path)."""
        block = self.propose_block(slot=slot, timestamp=timestamp)
        outcome = self.commit_block(block)
        if not outcome.ok:
            raise LedgerError(f"own block rejected: {outcome.reason} ({outcome.detail})")
        return block


def validate_against(
    config: GenesisConfig, tip: Block, state: ContractState, block: Block
) -> ValidationOutcome:
    """Stateless-ish block validation: link, schedule, seal, txs, state root."""
    if block.chain_id != config.chain_id:
        return ValidationOutcome(False, BAD_LINK, "wrong chain id")
    if block.height != tip.height + 1:
        return ValidationOutcome(
            False, BAD_LINK, f"height {block.height} does not extend {tip.height}"
        )
    if block.prev_hash != tip.header_hash():
        return ValidationOutcome(False, BAD_LINK, "prev_hash mismatch")
    if block.timestamp < tip.timestamp:
        return ValidationOutcome(False, BAD_LINK, "timestamp regressed")
    if block.proposer not in config.authorities:
        return ValidationOutcome(False, WRONG_PROPOSER, f"{block.proposer} not an authority")
    if block.proposer != config.proposer_for(block.height, block.slot):
        return ValidationOutcome(
            False, WRONG_PROPOSER, f"slot {block.slot} belongs to another authority"
        )
    if not block.verify_seal():
        return ValidationOutcome(False, BAD_SEAL, "seal does not verify")
    trial = state.clone()
    try:
        receipts = execute_block_txs(trial, block.txs, config.chain_id)
    except LedgerError as exc:
        return ValidationOutcome(False, BAD_TX, f"{exc.code}: {exc}")
    if trial.digest() != block.state_root:
        return ValidationOutcome(False, BAD_STATE_ROOT, "state root mismatch on replay")
    return ValidationOutcome(True, state=trial, receipts=receipts)


def verify_chain(
    config: GenesisConfig, lines: Iterable[str]
) -> tuple[bool, int | None, str | None]:
    """Re-execute a serialized chain from genesis.

    Returns (ok, first_bad_height, reason). Parse failures count as
    detection at the height of the offending line.
    """
    expected_genesis = genesis_block(config)
    state = genesis_state(config)
    tip: Block | None = None
    height = 0
    for height, line in enumerate(lines):
        try:
            block = Block.from_line(line)
        except (ValueError, KeyError) as exc:
            return False, height, f"unparseable block: {exc}"
        if height == 0:
            if block.header_hash() != expected_genesis.header_hash():
                return False, 0, "genesis does not match configured genesis"
            tip = block
            continue
        outcome = validate_against(config, tip, state, block)
        if not outcome.ok:
            return False, height, f"{outcome.reason}: {outcome.detail}"
        state = outcome.state
        tip = block
    if tip is None:
        return False, 0, "empty chain"
    return True, None, None
