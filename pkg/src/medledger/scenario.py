"""Scripted end-to-end runs with reproducible keys and transcripts.

A scenario file is JSON:

    {
      "name": "e2e",
      "seed": "demo-1",
      "chain_id": "demo",
      "permissive": false,
      "actors": {
        "admin":  {"balance": "0"},
        "alice":  {"balance": "100000000000000000000"}
      },
      "authorities": ["admin"],
      "administrators": ["admin"],
      "steps": [
        {"as": "admin", "op": "register_hospital",
         "args": {"hospital": "@general"}, "expect": "ok"}
      ]
    }

Actor keys derive from sha256(seed + ":" + alias), so the same file always
produces the same accounts, transactions, blocks, and transcript bytes.
Each accepted step seals exactly one block with a logical timestamp equal
to the block height; rejected-at-admission steps seal nothing.

`expect` forms: "ok", {"error": CODE}, {"error": CODE, "message": M},
{"result": X}, {"rejected": CODE}. Omitted means no assertion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .chain import GenesisConfig, Transaction
from .codec import canonical_json
from .contract.state import MAX_BALANCE
from .errors import InvalidConfig, LedgerError
from .keys import Keypair, is_account_id
from .node import Node


class ExpectationFailed(AssertionError):
    pass


@dataclass
class ScenarioResult:
    name: str
    config: GenesisConfig
    node: Node
    actors: dict[str, Keypair]
    transcript: dict

    def transcript_json(self) -> str:
        return canonical_json(self.transcript) + "\n"


def load_scenario(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot load scenario {path}: {exc}")
    if not isinstance(doc, dict):
        raise InvalidConfig("scenario must be a JSON object")
    return doc


def _parse_amount(raw, what: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise InvalidConfig(f"{what} must be an integer or decimal string")
    try:
        amount = int(raw)
    except ValueError:
        raise InvalidConfig(f"{what} is not a number: {raw!r}")
    if not 0 <= amount <= MAX_BALANCE:
        raise InvalidConfig(f"{what} out of range")
    return amount


def actor_keys(seed: str, aliases) -> dict[str, Keypair]:
    return {alias: Keypair.from_seed(f"{seed}:{alias}") for alias in aliases}


def run_scenario(doc: dict, chain_path: str | Path | None = None) -> ScenarioResult:
    name = doc.get("name", "scenario")
    seed = doc.get("seed")
    if not isinstance(seed, str) or not seed:
        raise InvalidConfig("scenario needs a non-empty string seed")
    actor_specs = doc.get("actors")
    if not isinstance(actor_specs, dict) or not actor_specs:
        raise InvalidConfig("scenario needs at least one actor")
    actors = actor_keys(seed, actor_specs)
    accounts = {alias: kp.account for alias, kp in actors.items()}

    def resolve(alias_or_account: str, what: str) -> str:
        if isinstance(alias_or_account, str) and alias_or_account.startswith("@"):
            alias = alias_or_account[1:]
            if alias not in accounts:
                raise InvalidConfig(f"{what} references unknown actor {alias!r}")
            return accounts[alias]
        if isinstance(alias_or_account, str) and is_account_id(alias_or_account):
            return alias_or_account
        raise InvalidConfig(f"{what} must be @alias or an account id")

    authority_aliases = doc.get("authorities") or [next(iter(actor_specs))]
    admin_aliases = doc.get("administrators") or [next(iter(actor_specs))]
    balances = {}
    for alias, spec in actor_specs.items():
        if spec and "balance" in spec:
            amount = _parse_amount(spec["balance"], f"balance of {alias}")
            if amount:
                balances[accounts[alias]] = amount
    config = GenesisConfig(
        chain_id=doc.get("chain_id", f"scenario-{name}"),
        authorities=[resolve(f"@{a}" if not a.startswith("@") else a, "authority")
                     for a in authority_aliases],
        administrators=[resolve(f"@{a}" if not a.startswith("@") else a, "administrator")
                        for a in admin_aliases],
        balances=balances,
        genesis_time=0,
        permissive_guards=bool(doc.get("permissive", False)),
    )
    authority_keys = {kp.account: kp for kp in actors.values()}
    node = Node(config, chain_path=chain_path)

    steps_in = doc.get("steps", [])
    entries = []
    for index, step in enumerate(steps_in):
        if not isinstance(step, dict) or "as" not in step or "op" not in step:
            raise InvalidConfig(f"step {index} needs 'as' and 'op'")
        alias = step["as"]
        if alias not in actors:
            raise InvalidConfig(f"step {index}: unknown actor {alias!r}")
        sender = actors[alias]
        args = {}
        for key, raw in (step.get("args") or {}).items():
            if isinstance(raw, str) and raw.startswith("@"):
                args[key] = resolve(raw, f"step {index} arg {key}")
            else:
                args[key] = raw
        value = _parse_amount(step.get("value", 0), f"step {index} value")
        tx = Transaction.build(
            sender,
            config.chain_id,
            node.state.nonce(sender.account),
            step["op"],
            args,
            value=value,
        )
        entry = {
            "step": index,
            "as": alias,
            "op": step["op"],
            "tx_hash": tx.tx_hash(),
        }
        try:
            node.admit_tx(tx)
        except LedgerError as exc:
            entry.update(status="rejected", code=exc.code, message=str(exc))
            _check_expect(step.get("expect"), entry, index)
            entries.append(entry)
            continue
        height = node.height + 1
        proposer = config.proposer_for(height, 0)
        key = authority_keys.get(proposer)
        if key is None:
            raise InvalidConfig(f"no key for scheduled authority {proposer}")
        node.key = key
        block = node.seal_pending(slot=0, timestamp=height)
        receipt = node.receipts[tx.tx_hash()]
        entry.update(
            status=receipt.status,
            code=receipt.code,
            message=receipt.message,
            result=receipt.result,
            height=block.height,
            state_root=block.state_root,
        )
        _check_expect(step.get("expect"), entry, index)
        entries.append(entry)

    final_state = node.committed_state()
    transcript = {
        "schema": "medledger.transcript.v1",
        "name": name,
        "chain_id": config.chain_id,
        "genesis_hash": config.genesis_hash(),
        "permissive": config.permissive_guards,
        "actors": {
            alias: {
                "account": accounts[alias],
                "role": getattr(final_state.role_of(accounts[alias]), "value", ""),
                "balance": str(final_state.balance(accounts[alias])),
                "nonce": final_state.nonce(accounts[alias]),
            }
            for alias in actors
        },
        "steps": entries,
        "final": {
            "height": node.height,
            "state_root": node.tip.state_root,
        },
    }
    return ScenarioResult(name, config, node, actors, transcript)


def _check_expect(expect, entry: dict, index: int) -> None:
    if expect is None:
        return
    if expect == "ok":
        if entry["status"] != "ok":
            raise ExpectationFailed(
                f"step {index}: expected ok, got {entry['status']} "
                f"{entry.get('code')}: {entry.get('message')}"
            )
        return
    if not isinstance(expect, dict):
        raise InvalidConfig(f"step {index}: bad expect clause {expect!r}")
    if "rejected" in expect:
        if entry["status"] != "rejected" or entry["code"] != expect["rejected"]:
            raise ExpectationFailed(
                f"step {index}: expected admission rejection {expect['rejected']}, "
                f"got {entry['status']} {entry.get('code')}"
            )
        return
    if "error" in expect:
        if entry["status"] != "error" or entry["code"] != expect["error"]:
            raise ExpectationFailed(
                f"step {index}: expected error {expect['error']}, "
                f"got {entry['status']} {entry.get('code')}"
            )
        if "message" in expect and entry["message"] != expect["message"]:
            raise ExpectationFailed(
                f"step {index}: expected message {expect['message']!r}, "
                f"got {entry['message']!r}"
            )
        return
    if "result" in expect:
        if entry["status"] != "ok" or entry["result"] != expect["result"]:
            raise ExpectationFailed(
                f"step {index}: expected result {expect['result']!r}, "
                f"got {entry['status']} {entry.get('result')!r}"
            )
        return
    raise InvalidConfig(f"step {index}: bad expect clause {expect!r}")
