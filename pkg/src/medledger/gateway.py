"""HTTP gateway in front of a single node.

Write path: clients POST fully signed transactions; the gateway never holds
keys for callers. Read path: public chain data is open; anything whose
answer depends on who is asking (patient records, counts) requires a signed
read-auth header set proving control of the calling account:

    X-Auth-Account:    0x... account of the caller
    X-Auth-PublicKey:  hex Ed25519 public key matching the account
    X-Auth-Timestamp:  unix seconds, must be within the freshness window
    X-Auth-Nonce:      random hex string, single use within the window
    X-Auth-Signature:  hex Ed25519 over the canonical encoding of
                       {"chain_id", "method", "nonce", "path", "timestamp"}

Guard rejections surface as HTTP 403 with the contract's exact message so
clients can display it untouched.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import codec
from .chain import Transaction
from .contract.ops import apply_operation
from .contract.state import Role
from .errors import (
    BadNonce,
    BadSignature,
    GuardRejection,
    IntegrityError,
    InvalidArgument,
    LedgerError,
    NotAllowed,
    NotFound,
    BlobTooLarge,
    UnknownOperation,
)
from .keys import account_id, is_account_id, verify_signature
from .node import Node
from .store import BlobStore, is_content_hash

DEFAULT_AUTH_WINDOW_S = 60

_STATUS_BY_CODE = {
    "BadSignature": 401,
    "Unauthorized": 401,
    "BadNonce": 409,
    "UnknownOperation": 400,
    "InvalidArgument": 400,
    "InvalidConfig": 400,
    "NotFound": 404,
    "BlobTooLarge": 413,
    "IntegrityError": 500,
}


def _status_for(exc: LedgerError) -> int:
    if isinstance(exc, GuardRejection):
        return 403
    return _STATUS_BY_CODE.get(exc.code, 400)


def read_auth_payload(
    chain_id: str, method: str, path: str, timestamp: int, nonce: str
) -> bytes:
    return codec.encode(
        {
            "chain_id": chain_id,
            "method": method,
            "nonce": nonce,
            "path": path,
            "timestamp": timestamp,
        }
    )


class Unauthorized(LedgerError):
    code = "Unauthorized"
    message = "read auth failed"


def create_app(
    node: Node,
    store: BlobStore,
    automine: bool = False,
    auth_window_s: int = DEFAULT_AUTH_WINDOW_S,
    clock=None,
) -> FastAPI:
    app = FastAPI(title="medledger gateway", docs_url=None, redoc_url=None)
    # auth rides in signed headers, never cookies, so cross-origin browser
    # clients are safe to allow; preflights need the X-Auth-* header names
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Block-Height", "X-State-Root"],
    )
    now = clock or (lambda: int(time.time()))
    seen_nonces: dict[str, int] = {}

    @app.exception_handler(LedgerError)
    async def ledger_error_handler(request: Request, exc: LedgerError):
        # message stays byte-identical to the contract string; any context
        # goes in detail so clients can display message untouched
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": exc.code, "message": exc.message, "detail": exc.detail},
            headers=_chain_headers(),
        )

    def _chain_headers() -> dict[str, str]:
        tip = node.tip
        return {
            "X-Block-Height": str(tip.height),
            "X-State-Root": tip.state_root,
        }

    @app.middleware("http")
    async def add_chain_headers(request: Request, call_next):
        response = await call_next(request)
        for k, v in _chain_headers().items():
            response.headers.setdefault(k, v)
        return response

    def authenticate(request: Request) -> str:
        """Verify the read-auth headers; returns the caller account."""
        headers = request.headers
        account = headers.get("x-auth-account", "")
        pub_hex = headers.get("x-auth-publickey", "")
        ts_raw = headers.get("x-auth-timestamp", "")
        nonce = headers.get("x-auth-nonce", "")
        sig_hex = headers.get("x-auth-signature", "")
        if not (account and pub_hex and ts_raw and nonce and sig_hex):
            raise Unauthorized("missing auth headers")
        try:
            public_key = bytes.fromhex(pub_hex)
            signature = bytes.fromhex(sig_hex)
            timestamp = int(ts_raw)
        except ValueError:
            raise Unauthorized("malformed auth headers")
        if len(public_key) != 32 or account_id(public_key) != account:
            raise Unauthorized("public key does not match account")
        if abs(now() - timestamp) > auth_window_s:
            raise Unauthorized("stale timestamp")
        horizon = now() - auth_window_s * 2
        for old in [k for k, seen in seen_nonces.items() if seen < horizon]:
            del seen_nonces[old]
        if nonce in seen_nonces:
            raise Unauthorized("nonce replayed")
        payload = read_auth_payload(
            node.config.chain_id, request.method, request.url.path, timestamp, nonce
        )
        if not verify_signature(public_key, payload, signature):
            raise Unauthorized("bad signature")
        seen_nonces[nonce] = now()
        return account

    # -- write path --------------------------------------------------------------

    @app.post("/tx")
    async def post_tx(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise InvalidArgument("body is not valid JSON")
        try:
            tx = Transaction.from_wire(body)
        except (ValueError, KeyError, TypeError) as exc:
            raise InvalidArgument(f"malformed transaction: {exc}")
        tx_hash = node.admit_tx(tx)
        receipt = None
        status = "pending"
        if automine:
            node.seal_pending()
            got = node.receipts.get(tx_hash)
            if got is not None:
                status = "committed"
                receipt = got.to_wire()
        return JSONResponse(
            {"tx_hash": tx_hash, "status": status, "receipt": receipt},
            headers=_chain_headers(),
        )

    @app.get("/tx/{tx_hash}")
    def get_tx(tx_hash: str):
        status, receipt = node.find_tx(tx_hash)
        if status == "unknown":
            raise NotFound(f"tx {tx_hash}")
        return {
            "tx_hash": tx_hash,
            "status": status,
            "receipt": receipt.to_wire() if receipt else None,
        }

    # -- public chain reads ---------------------------------------------------------

    @app.get("/chain/head")
    def chain_head():
        return node.tip.to_wire()

    @app.get("/chain/blocks/{height}")
    def chain_block(height: int):
        if height < 0 or height > node.height:
            raise NotFound(f"height {height}")
        return node.blocks[height].to_wire()

    @app.get("/accounts/{account}")
    def get_account(account: str):
        if not is_account_id(account):
            raise InvalidArgument("malformed account id")
        state = node.committed_state()
        role = state.role_of(account)
        return {
            "account": account,
            "role": role.value if role else None,
            "balance": str(state.balance(account)),
            "nonce": state.nonce(account),
        }

    @app.get("/doctors/{account}")
    def get_doctor(account: str):
        if not is_account_id(account):
            raise InvalidArgument("malformed account id")
        state = node.committed_state()
        result = apply_operation(
            state.clone(), account, "get_doctor", {"doctor": account}
        )
        return result

    # -- caller-dependent reads ----------------------------------------------------

    @app.get("/patients/{patient}/records/count")
    def record_count(patient: str, request: Request):
        if not is_account_id(patient):
            raise InvalidArgument("malformed patient id")
        caller = authenticate(request)
        state = node.committed_state().clone()
        role = state.role_of(caller)
        if role == Role.PATIENT and caller == patient:
            count = apply_operation(state, caller, "get_record_count", {})
        elif role == Role.DOCTOR:
            count = apply_operation(
                state, caller, "doctor_get_record_count", {"patient": patient}
            )
        else:
            raise NotAllowed()
        return {"patient": patient, "count": count}

    @app.get("/patients/{patient}/records/{record_id}")
    def record_read(patient: str, record_id: int, request: Request):
        if not is_account_id(patient):
            raise InvalidArgument("malformed patient id")
        caller = authenticate(request)
        state = node.committed_state().clone()
        role = state.role_of(caller)
        if role == Role.PATIENT and caller == patient:
            result = apply_operation(
                state, caller, "get_record", {"record_id": record_id}
            )
        elif role == Role.DOCTOR:
            prescription = apply_operation(
                state,
                caller,
                "doctor_get_record",
                {"patient": patient, "record_id": record_id},
            )
            result = {"record_id": record_id, "prescription": prescription}
        elif role == Role.PHARMACY:
            grant = state.grant_for(patient, caller)
            if not grant.allowed or grant.record_id != record_id:
                raise NotAllowed()
            prescription = apply_operation(
                state, caller, "pharmacy_get_record", {"patient": patient}
            )
            result = {"record_id": record_id, "prescription": prescription}
        elif role == Role.INSURER:
            link = state.link_for(patient, caller)
            if not link.flag_raised or link.claimed_record_id != record_id:
                raise NotAllowed()
            result = apply_operation(
                state, caller, "insurer_get_record", {"patient": patient}
            )
            result = {"record_id": record_id, **result}
        else:
            raise NotAllowed()
        return {"patient": patient, **result}

    # -- document store ------------------------------------------------------------

    @app.post("/documents")
    async def put_document(request: Request):
        blob = await request.body()
        digest = store.put(blob)
        return {"hash": digest, "size": len(blob)}

    @app.get("/documents/{digest}")
    def get_document(digest: str):
        if not is_content_hash(digest):
            raise InvalidArgument("malformed content hash")
        blob = store.get(digest)
        return Response(content=blob, media_type="application/octet-stream")

    return app
