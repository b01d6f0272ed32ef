"""Deterministic network simulation for the authority consensus.

Single-threaded discrete-event loop over integer virtual milliseconds. All
randomness (message latency) comes from one seeded generator, so a given
parameter set replays byte-identically, including across processes.

Protocol modelled:
  - round-robin proposer schedule with slot timers; if a slot produces no
    commit within one block interval the next authority's slot fires
  - every valid proposal is acknowledged at most once per (height, slot)
    by each authority; acks are broadcast to everyone
  - a block commits on a node once that node has seen acknowledgments from
    a strict majority of authorities (a proposer's seal counts as its ack);
    hearsay commit claims from peers are never trusted on their own
  - committed blocks are rebroadcast so laggards and evidence catch up

Fault models: crash (goes dark), flood (goes dark, spams junk), equivocate
(signs two conflicting blocks for one slot, sent to disjoint halves, then
behaves), sybil (a swarm of unregistered identities proposing and acking).
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field

from .chain import Block, GenesisConfig, Transaction
from .codec import canonical_json
from .contract.state import TOKEN
from .errors import InvalidConfig, LedgerError, UnknownNode
from .keys import Keypair
from .node import Node, WRONG_PROPOSER

FAULT_KINDS = ("crash", "flood", "equivocate", "sybil")

DEFAULT_TARGET_HEIGHT = 12
DEFAULT_INTERVAL_MS = 2000
DEFAULT_LATENCY_MS = (10, 80)
DEFAULT_SYBIL_COUNT = 50
FLOOD_EVERY_MS = 100
FLOOD_FANOUT = 4


@dataclass(frozen=True)
class SimParams:
    seed: int
    n_authorities: int = 4
    target_height: int = DEFAULT_TARGET_HEIGHT
    block_interval_ms: int = DEFAULT_INTERVAL_MS
    latency_ms: tuple[int, int] = DEFAULT_LATENCY_MS
    wallets: int = 4
    tx_every_ms: int = 900
    fault: str | None = None
    fault_node: int = 1
    fault_at_ms: int = 3000
    sybil_count: int = DEFAULT_SYBIL_COUNT
    permissive: bool = False

    def validate(self) -> None:
        if self.n_authorities < 1:
            raise InvalidConfig("need at least one authority")
        if self.fault is not None and self.fault not in FAULT_KINDS:
            raise InvalidConfig(f"unknown fault kind {self.fault!r}")
        if self.target_height < 1:
            raise InvalidConfig("target height must be positive")
        if self.latency_ms[0] < 0 or self.latency_ms[1] < self.latency_ms[0]:
            raise InvalidConfig("bad latency range")
        if self.wallets < 2:
            raise InvalidConfig("need at least two wallets for payments")
        if not 0 <= self.fault_node < self.n_authorities:
            raise InvalidConfig(f"fault node {self.fault_node} out of range")


# -- messages ------------------------------------------------------------------


@dataclass(frozen=True)
class Proposal:
    block: Block


@dataclass(frozen=True)
class Ack:
    height: int
    slot: int
    block_hash: str


@dataclass(frozen=True)
class CommitNote:
    block: Block


@dataclass(frozen=True)
class Junk:
    size: int


class SimNode:
    """One authority replica plus its consensus bookkeeping."""

    def __init__(self, sim: "Simulation", name: str, key: Keypair):
        self.sim = sim
        self.name = name
        self.key = key
        self.account = key.account
        self.node = Node(sim.config, key=key, clock=lambda: self.sim.now // 1000)
        self.dark = False
        self.flooding = False
        self.equivocate_armed = False
        self.acked: set[tuple[int, int]] = set()
        self.seen_headers: set[str] = set()
        self.candidates: dict[int, dict[str, Block]] = {}
        self.pending: dict[int, list[Block]] = {}
        self.ack_sets: dict[str, set[str]] = {}
        self.seen_seals: dict[tuple[int, str], set[str]] = {}
        self.rejected: dict[str, int] = {}
        self.dropped_invalid = 0
        self.commit_log: list[tuple[int, int, int]] = []  # height, time_ms, n_txs

    # -- local chain helpers ----------------------------------------------------

    @property
    def height(self) -> int:
        return self.node.height

    def start(self) -> None:
        self.schedule_slot_timers(1)

    def schedule_slot_timers(self, height: int) -> None:
        interval = self.sim.params.block_interval_ms
        for slot in range(self.sim.params.n_authorities):
            if self.sim.config.proposer_for(height, slot) != self.account:
                continue
            self.sim.schedule(
                (slot + 1) * interval, lambda h=height, s=slot: self.on_slot_timer(h, s)
            )

    # -- timers -------------------------------------------------------------------

    def on_slot_timer(self, height: int, slot: int) -> None:
        if self.dark or self.node.height >= height:
            return
        if self.equivocate_armed and self.sim.now >= self.sim.fault_at_ms:
            self.equivocate_armed = False
            self._propose_equivocating(slot)
            return
        block = self.node.propose_block(slot=slot, timestamp=self.sim.now // 1000)
        self.sim.broadcast(self, Proposal(block))
        self._handle_proposal(block, gossip=False)

    def _propose_equivocating(self, slot: int) -> None:
        ts = self.sim.now // 1000
        block_a = self.node.propose_block(slot=slot, timestamp=ts)
        block_b = self.node.propose_block(slot=slot, timestamp=ts + 1, txs=[])
        others = [n for n in self.sim.authority_nodes if n is not self]
        for i, peer in enumerate(others):
            pick = block_a if i % 2 == 0 else block_b
            self.sim.unicast(self, peer, Proposal(pick))
        # acknowledge both halves to keep each side hopeful
        self.acked.add((block_a.height, slot))
        for block in (block_a, block_b):
            h = block.header_hash()
            self.seen_headers.add(h)
            self.candidates.setdefault(block.height, {})[h] = block
            self.ack_sets.setdefault(h, set()).add(self.account)
            self.sim.broadcast(self, Ack(block.height, slot, h))
        self.sim.equivocations_emitted += 1

    def on_flood_timer(self) -> None:
        if not self.flooding:
            return
        for _ in range(FLOOD_FANOUT):
            self.sim.broadcast(self, Junk(256))
        self.sim.schedule(FLOOD_EVERY_MS, self.on_flood_timer)

    # -- message handlers --------------------------------------------------------

    def on_message(self, sender: str, msg) -> None:
        if self.dark:
            return
        if isinstance(msg, Proposal):
            self._handle_proposal(msg.block)
        elif isinstance(msg, Ack):
            self._record_ack(msg.block_hash, self.sim.account_of(sender))
            self._try_commit()
        elif isinstance(msg, CommitNote):
            self._handle_proposal(msg.block)
            self._record_ack(msg.block.header_hash(), self.sim.account_of(sender))
            self._try_commit()
        elif isinstance(msg, Junk):
            self.dropped_invalid += 1
        else:
            self.dropped_invalid += 1

    def _handle_proposal(self, block: Block, gossip: bool = True) -> None:
        if block.proposer not in self.sim.authority_accounts:
            self.rejected[WRONG_PROPOSER] = self.rejected.get(WRONG_PROPOSER, 0) + 1
            return
        h = block.header_hash()
        if h not in self.seen_headers:
            if not block.verify_seal():
                self.dropped_invalid += 1
                return
            self.seen_headers.add(h)
            seals = self.seen_seals.setdefault((block.height, block.proposer), set())
            seals.add(h)
            self._record_ack(h, block.proposer)
            if gossip:
                self.sim.broadcast(self, Proposal(block))
        if block.height <= self.node.height:
            return
        if block.height > self.node.height + 1:
            self.pending.setdefault(block.height, []).append(block)
            return
        self.candidates.setdefault(block.height, {})[h] = block
        outcome = self.node.validate_block(block)
        if outcome.ok:
            key = (block.height, block.slot)
            if key not in self.acked:
                self.acked.add(key)
                self._record_ack(h, self.account)
                self.sim.broadcast(self, Ack(block.height, block.slot, h))
        else:
            self.rejected[outcome.reason] = self.rejected.get(outcome.reason, 0) + 1
        self._try_commit()

    def _record_ack(self, block_hash: str, account: str) -> None:
        self.ack_sets.setdefault(block_hash, set()).add(account)

    def _try_commit(self) -> None:
        progress = True
        while progress:
            progress = False
            height = self.node.height + 1
            cands = self.candidates.get(height, {})
            for h in sorted(cands):
                acks = self.ack_sets.get(h, set()) & self.sim.authority_accounts
                if len(acks) < self.sim.quorum:
                    continue
                outcome = self.node.commit_block(cands[h])
                if not outcome.ok:
                    continue
                self._on_committed(cands[h])
                progress = True
                break

    def _on_committed(self, block: Block) -> None:
        self.commit_log.append((block.height, self.sim.now, len(block.txs)))
        for height in [k for k in self.candidates if k <= block.height]:
            for h in self.candidates.pop(height):
                self.ack_sets.pop(h, None)
        self.schedule_slot_timers(block.height + 1)
        self.sim.broadcast(self, CommitNote(block))
        for queued in self.pending.pop(block.height + 1, []):
            self._handle_proposal(queued, gossip=False)


class SybilNode:
    """Unregistered identity that forges blocks and spams acknowledgments."""

    def __init__(self, sim: "Simulation", name: str, key: Keypair):
        self.sim = sim
        self.name = name
        self.key = key
        self.account = key.account
        genesis = sim.genesis
        self.tip_height = genesis.height
        self.tip_hash = genesis.header_hash()

    def start(self) -> None:
        self.sim.schedule(self.sim.params.block_interval_ms, self.on_timer)

    def on_timer(self) -> None:
        block = Block(
            chain_id=self.sim.config.chain_id,
            height=self.tip_height + 1,
            prev_hash=self.tip_hash,
            timestamp=self.sim.now // 1000,
            proposer=self.account,
            slot=0,
            txs=(),
            state_root="0" * 64,
        ).sealed_by(self.key)
        self.sim.sybil_proposals += 1
        for peer in self.sim.authority_nodes:
            self.sim.unicast(self, peer, Proposal(block))
            self.sim.unicast(self, peer, Ack(block.height, 0, block.header_hash()))
        self.sim.schedule(self.sim.params.block_interval_ms, self.on_timer)

    def on_message(self, sender: str, msg) -> None:
        # watches traffic to keep forging plausibly linked blocks
        block = None
        if isinstance(msg, (Proposal, CommitNote)):
            block = msg.block
        if block is not None and block.height > self.tip_height:
            self.tip_height = block.height
            self.tip_hash = block.header_hash()


class Simulation:
    def __init__(self, params: SimParams):
        params.validate()
        self.params = params
        self.rng = random.Random(params.seed)
        self.now = 0
        self._seq = itertools.count()
        self._queue: list = []
        self.fault_at_ms = params.fault_at_ms
        self.quorum = params.n_authorities // 2 + 1
        self.messages_sent: dict[str, int] = {}
        self.messages_delivered = 0
        self.sybil_proposals = 0
        self.equivocations_emitted = 0
        self.txs_submitted = 0
        self._wallet_step = 0

        auth_keys = [
            Keypair.from_seed(f"sim-{params.seed}-authority-{i}")
            for i in range(params.n_authorities)
        ]
        self.wallet_keys = [
            Keypair.from_seed(f"sim-{params.seed}-wallet-{i}")
            for i in range(params.wallets)
        ]
        self.config = GenesisConfig(
            chain_id=f"sim-{params.seed}",
            authorities=[k.account for k in auth_keys],
            administrators=[auth_keys[0].account],
            balances={k.account: 1000 * TOKEN for k in self.wallet_keys},
            genesis_time=0,
            block_interval_ms=params.block_interval_ms,
            permissive_guards=params.permissive,
        )
        self.authority_accounts = frozenset(self.config.authorities)
        self.authority_nodes = [
            SimNode(self, f"a{i}", key) for i, key in enumerate(auth_keys)
        ]
        self.sybil_nodes: list[SybilNode] = []
        self.by_name: dict[str, SimNode | SybilNode] = {
            n.name: n for n in self.authority_nodes
        }
        self._accounts = {n.name: n.account for n in self.authority_nodes}
        self.genesis = self.authority_nodes[0].node.blocks[0]
        self.faulted: dict[str, str] = {}  # name -> kind
        self._wallet_nonces = [0] * params.wallets
        if params.fault is not None:
            self.inject_fault(f"a{params.fault_node}", params.fault, params.fault_at_ms)

    # -- wiring ----------------------------------------------------------------

    def account_of(self, name: str) -> str:
        return self._accounts[name]

    def inject_fault(self, name: str, kind: str, at_ms: int = 0) -> None:
        if kind not in FAULT_KINDS:
            raise InvalidConfig(f"unknown fault kind {kind!r}")
        if kind == "sybil":
            self._spawn_sybils(at_ms)
            return
        node = self.by_name.get(name)
        if node is None or not isinstance(node, SimNode):
            raise UnknownNode(name)
        self.faulted[name] = kind
        if kind == "crash":
            self.schedule_at(at_ms, lambda: setattr(node, "dark", True))
        elif kind == "flood":
            def start_flood():
                node.dark = True
                node.flooding = True
                node.on_flood_timer()
            self.schedule_at(at_ms, start_flood)
        elif kind == "equivocate":
            node.equivocate_armed = True

    def _spawn_sybils(self, at_ms: int) -> None:
        for i in range(self.params.sybil_count):
            key = Keypair.from_seed(f"sim-{self.params.seed}-sybil-{i}")
            node = SybilNode(self, f"s{i}", key)
            self.sybil_nodes.append(node)
            self.by_name[node.name] = node
            self._accounts[node.name] = node.account
            self.schedule_at(at_ms, node.start)

    # -- event loop ---------------------------------------------------------------

    def schedule(self, delay_ms: int, fn) -> None:
        self.schedule_at(self.now + delay_ms, fn)

    def schedule_at(self, time_ms: int, fn) -> None:
        heapq.heappush(self._queue, (time_ms, next(self._seq), fn))

    def unicast(self, sender, recipient, msg) -> None:
        latency = self.rng.randint(*self.params.latency_ms)
        kind = type(msg).__name__
        self.messages_sent[kind] = self.messages_sent.get(kind, 0) + 1
        def deliver():
            self.messages_delivered += 1
            recipient.on_message(sender.name, msg)
        self.schedule(latency, deliver)

    def broadcast(self, sender, msg) -> None:
        for peer in self.authority_nodes:
            if peer is not sender:
                self.unicast(sender, peer, msg)
        for peer in self.sybil_nodes:
            if peer is not sender:
                self.unicast(sender, peer, msg)

    # -- payment workload ---------------------------------------------------------

    def _workload_tick(self) -> None:
        if not self._active_done():
            i = self._wallet_step % self.params.wallets
            j = (i + 1 + self._wallet_step // self.params.wallets) % self.params.wallets
            if j == i:
                j = (i + 1) % self.params.wallets
            amount = (1 + self._wallet_step % 7) * (TOKEN // 1000)
            tx = Transaction.build(
                self.wallet_keys[i],
                self.config.chain_id,
                self._wallet_nonces[i],
                "trigger_payment",
                {"beneficiary": self.wallet_keys[j].account},
                value=amount,
            )
            self._wallet_nonces[i] += 1
            self._wallet_step += 1
            self.txs_submitted += 1
            for node in self.authority_nodes:
                if node.dark:
                    continue
                try:
                    node.node.admit_tx(tx)
                except LedgerError:
                    pass
            self.schedule(self.params.tx_every_ms, self._workload_tick)

    # -- run ----------------------------------------------------------------------

    def _active_nodes(self) -> list[SimNode]:
        return [n for n in self.authority_nodes if n.name not in self.faulted]

    def _active_done(self) -> bool:
        return all(n.height >= self.params.target_height for n in self._active_nodes())

    def run(self) -> dict:
        for node in self.authority_nodes:
            node.start()
        self.schedule_at(500, self._workload_tick)
        hard_stop = (self.params.target_height * 4 + 20) * self.params.block_interval_ms
        while self._queue:
            if self._active_done():
                break
            time_ms, _, fn = heapq.heappop(self._queue)
            if time_ms > hard_stop:
                break
            self.now = time_ms
            fn()
        return self.report()

    # -- reporting ------------------------------------------------------------------

    def _honest_nodes(self) -> list[SimNode]:
        """Nodes whose committed prefix should agree: everyone but byzantine."""
        return [
            n
            for n in self.authority_nodes
            if self.faulted.get(n.name) != "equivocate"
        ]

    def report(self) -> dict:
        honest = self._honest_nodes()
        divergent_heights = []
        max_h = max((n.height for n in honest), default=0)
        for h in range(1, max_h + 1):
            hashes = {
                n.node.blocks[h].header_hash() for n in honest if n.height >= h
            }
            roots = {n.node.blocks[h].state_root for n in honest if n.height >= h}
            if len(hashes) > 1 or len(roots) > 1:
                divergent_heights.append(h)
        active = self._active_nodes()
        common = min((n.height for n in active), default=0)
        accepted_sybil = sum(
            1
            for n in honest
            for b in n.node.blocks[1:]
            if b.proposer not in self.authority_accounts
        )
        reference = active[0] if active else self.authority_nodes[0]
        receipts = list(reference.node.receipts.values())
        evidence = {
            n.name: sum(1 for seals in n.seen_seals.values() if len(seals) > 1)
            for n in self.authority_nodes
        }
        report = {
            "schema": "medledger.sim-report.v1",
            "seed": self.params.seed,
            "fault": self.params.fault,
            "fault_node": f"a{self.params.fault_node}" if self.params.fault else None,
            "n_authorities": self.params.n_authorities,
            "quorum": self.quorum,
            "target_height": self.params.target_height,
            "block_interval_ms": self.params.block_interval_ms,
            "latency_ms": list(self.params.latency_ms),
            "permissive": self.params.permissive,
            "duration_ms": self.now,
            "reached_target": self._active_done(),
            "common_height": common,
            "divergent": bool(divergent_heights),
            "divergent_heights": divergent_heights,
            "tips": {
                n.name: {
                    "height": n.height,
                    "root": n.node.tip.state_root,
                    "fault": self.faulted.get(n.name),
                }
                for n in self.authority_nodes
            },
            "evidence": evidence,
            "evidence_total": sum(
                count for name, count in evidence.items() if name not in self.faulted
            ),
            "equivocations_emitted": self.equivocations_emitted,
            "sybil": (
                {
                    "count": len(self.sybil_nodes),
                    "proposals": self.sybil_proposals,
                    "rejected": sum(
                        n.rejected.get(WRONG_PROPOSER, 0) for n in honest
                    ),
                    "accepted": accepted_sybil,
                }
                if self.sybil_nodes
                else None
            ),
            "messages": {
                "sent_by_type": dict(sorted(self.messages_sent.items())),
                "delivered": self.messages_delivered,
                "dropped_invalid": sum(n.dropped_invalid for n in self.authority_nodes),
            },
            "txs": {
                "submitted": self.txs_submitted,
                "committed": len(receipts),
                "ok": sum(1 for r in receipts if r.status == "ok"),
                "rejected": sum(1 for r in receipts if r.status != "ok"),
            },
            "commit_log": {
                n.name: [[h, t, c] for h, t, c in n.commit_log]
                for n in self.authority_nodes
            },
        }
        return report


def run_simulation(params: SimParams) -> dict:
    return Simulation(params).run()


def report_json(report: dict) -> str:
    return canonical_json(report) + "\n"
