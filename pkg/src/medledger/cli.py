"""Command line entry points.

Exit codes: 0 success, 2 validation or configuration failure, 3 guard
rejection (the chain accepted the transaction and said no), 4 I/O or
connectivity failure.
"""

from __future__ import annotations

import json
import sys
import threading
import time
from pathlib import Path

import click

from . import codec
from .chain import GenesisConfig, Transaction
from .errors import GuardRejection, InvalidConfig, LedgerError
from .keys import Keypair, is_account_id
from .node import Node, verify_chain
from .scenario import ExpectationFailed, load_scenario, run_scenario
from .sim import FAULT_KINDS, SimParams, run_simulation
from .store import BlobStore, DEFAULT_MAX_BLOB_BYTES

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GUARD = 3
EXIT_IO = 4


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _echo_json(payload) -> None:
    click.echo(codec.canonical_json(payload))


def _load_config(path: str) -> GenesisConfig:
    try:
        return GenesisConfig.load(path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read config: {exc}")
    except LedgerError as exc:
        _fail(EXIT_VALIDATION, f"bad config: {exc}")


def _load_key(path: str) -> Keypair:
    try:
        return Keypair.load(path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read key: {exc}")
    except (ValueError, KeyError) as exc:
        _fail(EXIT_VALIDATION, f"bad key file: {exc}")


@click.group()
def main():
    """Permissioned healthcare ledger tools."""


# -- keys -----------------------------------------------------------------------


@main.command()
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--seed", default=None, help="Derive the key from a seed string.")
@click.option("--alias", default=None, help="Label stored in the key file.")
@click.option("--json", "as_json", is_flag=True)
def keygen(out, seed, alias, as_json):
    """Create an Ed25519 keypair file."""
    key = Keypair.from_seed(seed) if seed else Keypair.generate()
    try:
        key.save(out, alias=alias)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    if as_json:
        _echo_json({"account": key.account, "path": str(out)})
    else:
        click.echo(f"account {key.account} written to {out}")


# -- genesis ----------------------------------------------------------------------


@main.group()
def genesis():
    """Genesis configuration."""


@genesis.command("init")
@click.option("--chain-id", required=True)
@click.option("--authority", "authorities", multiple=True, required=True)
@click.option("--admin", "admins", multiple=True)
@click.option("--balance", "balances", multiple=True, help="ACCOUNT=AMOUNT base units.")
@click.option("--interval-ms", default=2000, show_default=True)
@click.option("--genesis-time", default=0, show_default=True)
@click.option("--permissive-guards", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def genesis_init(chain_id, authorities, admins, balances, interval_ms, genesis_time,
                 permissive_guards, out):
    """Write a genesis file."""
    parsed = {}
    for raw in balances:
        account, sep, amount = raw.partition("=")
        if not sep or not is_account_id(account):
            _fail(EXIT_VALIDATION, f"bad --balance {raw!r}, want ACCOUNT=AMOUNT")
        try:
            parsed[account] = int(amount)
        except ValueError:
            _fail(EXIT_VALIDATION, f"bad amount in {raw!r}")
    try:
        config = GenesisConfig(
            chain_id=chain_id,
            authorities=list(authorities),
            administrators=list(admins),
            balances=parsed,
            genesis_time=genesis_time,
            block_interval_ms=interval_ms,
            permissive_guards=permissive_guards,
        )
        config.save(out)
    except LedgerError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"genesis {config.genesis_hash()} written to {out}")


# -- node ------------------------------------------------------------------------


@main.group()
def node():
    """Run a node."""


@node.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=False))
@click.option("--key", "key_path", default=None, type=click.Path(exists=False))
@click.option("--chain-file", default=None, type=click.Path(dir_okay=False))
@click.option("--store-dir", default=None, type=click.Path(file_okay=False))
@click.option("--max-blob-bytes", default=DEFAULT_MAX_BLOB_BYTES, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8440, show_default=True)
@click.option("--automine", is_flag=True, help="Seal a block per submitted transaction.")
def node_run(config_path, key_path, chain_file, store_dir, max_blob_bytes, host, port,
             automine):
    """Serve the HTTP gateway over a local node."""
    import uvicorn

    from .gateway import create_app

    config = _load_config(config_path)
    key = _load_key(key_path) if key_path else None
    try:
        ledger_node = Node(config, key=key, chain_path=chain_file)
    except LedgerError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    store_root = Path(store_dir) if store_dir else Path("store")
    store = BlobStore(store_root, max_blob_bytes=max_blob_bytes)
    app = create_app(ledger_node, store, automine=automine)

    if not automine and key is not None and key.account in config.authorities:
        def proposer_loop():
            while True:
                time.sleep(max(0.2, config.block_interval_ms / 4000))
                try:
                    slot = ledger_node.next_proposal_slot()
                    if slot is not None and ledger_node.mempool:
                        ledger_node.seal_pending(slot=slot)
                except LedgerError:
                    continue

        threading.Thread(target=proposer_loop, daemon=True).start()

    uvicorn.run(app, host=host, port=port, log_level="warning")


# -- transactions -----------------------------------------------------------------


@main.group()
def tx():
    """Build, sign, and submit transactions."""


@tx.command("send")
@click.option("--node", "node_url", required=True, help="Gateway base URL.")
@click.option("--key", "key_path", required=True, type=click.Path(exists=False))
@click.option("--op", required=True)
@click.option("--arg", "arg_pairs", multiple=True, help="NAME=VALUE, repeatable.")
@click.option("--value", default="0", help="Token value in base units.")
@click.option("--nonce", default=None, type=int, help="Override the fetched nonce.")
@click.option("--json", "as_json", is_flag=True)
def tx_send(node_url, key_path, op, arg_pairs, value, nonce, as_json):
    """Sign a transaction and submit it to a gateway."""
    import httpx

    from .contract.ops import OPS

    key = _load_key(key_path)
    if op not in OPS:
        _fail(EXIT_VALIDATION, f"unknown operation {op!r}")
    schema = dict(OPS[op].params)
    args = {}
    for raw in arg_pairs:
        name, sep, val = raw.partition("=")
        if not sep:
            _fail(EXIT_VALIDATION, f"bad --arg {raw!r}, want NAME=VALUE")
        if name not in schema:
            _fail(EXIT_VALIDATION, f"{op} takes no argument {name!r}")
        args[name] = int(val) if schema[name] == "uint" else val
    try:
        amount = int(value)
    except ValueError:
        _fail(EXIT_VALIDATION, f"bad --value {value!r}")

    base = node_url.rstrip("/")
    try:
        with httpx.Client(base_url=base, timeout=10.0) as client:
            if nonce is None:
                resp = client.get(f"/accounts/{key.account}")
                resp.raise_for_status()
                nonce = resp.json()["nonce"]
            transaction = Transaction.build(
                key, _chain_id_of(client), nonce, op, args, value=amount
            )
            resp = client.post("/tx", json=transaction.to_wire())
    except httpx.HTTPError as exc:
        _fail(EXIT_IO, f"gateway unreachable: {exc}")
    body = resp.json()
    if as_json:
        _echo_json(body)
    else:
        click.echo(codec.canonical_json(body))
    if resp.status_code == 403:
        sys.exit(EXIT_GUARD)
    if resp.status_code >= 400:
        sys.exit(EXIT_VALIDATION)
    receipt = body.get("receipt")
    if receipt and receipt.get("status") == "error":
        sys.exit(EXIT_GUARD)
    sys.exit(EXIT_OK)


def _chain_id_of(client) -> str:
    resp = client.get("/chain/head")
    resp.raise_for_status()
    return resp.json()["chain_id"]


# -- chain tools -------------------------------------------------------------------


@main.group()
def chain():
    """Inspect and verify chain files."""


@chain.command("verify")
@click.option("--config", "config_path", required=True)
@click.option("--chain-file", required=True, type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def chain_verify(config_path, chain_file, as_json):
    """Re-execute a chain file from genesis and check every link and root."""
    config = _load_config(config_path)
    try:
        lines = Path(chain_file).read_text().splitlines()
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read chain file: {exc}")
    ok, bad_height, reason = verify_chain(config, lines)
    payload = {
        "ok": ok,
        "blocks": len(lines),
        "first_bad_height": bad_height,
        "reason": reason,
    }
    if as_json:
        _echo_json(payload)
    elif ok:
        click.echo(f"ok: {len(lines)} blocks verified")
    else:
        click.echo(f"invalid at height {bad_height}: {reason}")
    sys.exit(EXIT_OK if ok else EXIT_VALIDATION)


# -- simulation ---------------------------------------------------------------------


@main.group()
def sim():
    """Deterministic consensus simulations."""


@sim.command("run")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--authorities", default=4, show_default=True, type=int)
@click.option("--blocks", default=12, show_default=True, type=int)
@click.option("--fault", type=click.Choice(FAULT_KINDS), default=None)
@click.option("--fault-node", default=1, show_default=True, type=int)
@click.option("--fault-at-ms", default=3000, show_default=True, type=int)
@click.option("--permissive-guards", is_flag=True)
@click.option("--report-dir", default=None, type=click.Path(file_okay=False))
@click.option("--json", "as_json", is_flag=True)
def sim_run(seed, authorities, blocks, fault, fault_node, fault_at_ms,
            permissive_guards, report_dir, as_json):
    """Run one seeded simulation; optionally write the report artifacts."""
    try:
        params = SimParams(
            seed=seed,
            n_authorities=authorities,
            target_height=blocks,
            fault=fault,
            fault_node=fault_node,
            fault_at_ms=fault_at_ms,
            permissive=permissive_guards,
        )
        report = run_simulation(params)
    except LedgerError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    if report_dir:
        from .report import write_report

        try:
            paths = write_report(report, report_dir)
        except OSError as exc:
            _fail(EXIT_IO, str(exc))
        if not as_json:
            for path in paths:
                click.echo(f"wrote {path}")
    if as_json:
        _echo_json(report)
    elif not report_dir:
        click.echo(
            f"seed={report['seed']} fault={report['fault']} "
            f"common_height={report['common_height']} divergent={report['divergent']}"
        )
    healthy = report["reached_target"] and not report["divergent"]
    if report["sybil"] is not None:
        healthy = healthy and report["sybil"]["accepted"] == 0
    sys.exit(EXIT_OK if healthy else EXIT_VALIDATION)


# -- scenarios -----------------------------------------------------------------------


@main.group()
def scenario():
    """Scripted end-to-end runs."""


@scenario.command("run")
@click.argument("scenario_file", type=click.Path(dir_okay=False))
@click.option("--chain-file", default=None, type=click.Path(dir_okay=False))
@click.option("--transcript", "transcript_path", default=None,
              type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def scenario_run(scenario_file, chain_file, transcript_path, as_json):
    """Execute a scenario file, sealing one block per accepted step."""
    try:
        doc = load_scenario(scenario_file)
        result = run_scenario(doc, chain_path=chain_file)
    except ExpectationFailed as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except GuardRejection as exc:
        _fail(EXIT_GUARD, str(exc))
    except InvalidConfig as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except LedgerError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    if transcript_path:
        try:
            Path(transcript_path).write_text(result.transcript_json())
        except OSError as exc:
            _fail(EXIT_IO, str(exc))
    if as_json:
        _echo_json(result.transcript)
    else:
        final = result.transcript["final"]
        click.echo(
            f"{result.name}: {len(result.transcript['steps'])} steps, "
            f"height {final['height']}, root {final['state_root'][:16]}…"
        )
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
