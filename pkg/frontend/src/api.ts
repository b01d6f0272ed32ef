import { bytesToHex } from "@noble/hashes/utils.js";
import { encode, type Canonical } from "./codec.js";
import { sign, type Keypair } from "./keys.js";

export type TxArgs = Record<string, string | number>;

export interface TxWire {
  args: TxArgs;
  chain_id: string;
  nonce: number;
  op: string;
  public_key: string;
  sender: string;
  signature: string;
  value: string;
}

export interface TxReceipt {
  tx_hash: string;
  op: string;
  sender: string;
  status: "ok" | "error";
  code: string | null;
  message: string | null;
  result: unknown;
  height: number | null;
  index: number | null;
}

export interface TxResponse {
  tx_hash: string;
  status: "pending" | "committed";
  receipt: TxReceipt | null;
}

export interface AccountInfo {
  account: string;
  role: string | null;
  balance: string;
  nonce: number;
}

export interface ChainHead {
  chain_id: string;
  height: number;
  state_root: string;
  [key: string]: unknown;
}

// Denial carried back from the gateway. `message` is the server string,
// untouched, because the UI promises to show exactly what the node said.
export class GatewayError extends Error {
  readonly code: string;
  readonly detail: string;
  readonly status: number;

  constructor(code: string, message: string, detail: string, status: number) {
    super(message);
    this.name = "GatewayError";
    this.code = code;
    this.detail = detail;
    this.status = status;
  }
}

export function buildTransaction(
  key: Keypair,
  chainId: string,
  nonce: number,
  op: string,
  args: TxArgs,
  value: bigint = 0n,
): TxWire {
  const payload = encode({
    args: args as Canonical,
    chain_id: chainId,
    nonce,
    op,
    sender: key.account,
    value,
  });
  return {
    args,
    chain_id: chainId,
    nonce,
    op,
    public_key: key.publicKeyHex,
    sender: key.account,
    signature: sign(key, payload),
    value: value.toString(),
  };
}

export function readAuthPayload(
  chainId: string,
  method: string,
  path: string,
  nonce: string,
  timestamp: number,
): Uint8Array {
  return encode({
    chain_id: chainId,
    method,
    nonce,
    path,
    timestamp,
  });
}

function randomNonce(): string {
  const raw = new Uint8Array(16);
  crypto.getRandomValues(raw);
  return bytesToHex(raw);
}

export class GatewayClient {
  private readonly base: string;
  private readonly fetchImpl: typeof fetch;
  private chainId: string | null = null;

  constructor(baseUrl: string, fetchImpl?: typeof fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? globalThis.fetch.bind(globalThis);
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const res = await this.fetchImpl(this.base + path, init);
    const body = (await res.json()) as Record<string, unknown>;
    if (!res.ok) {
      throw new GatewayError(
        String(body.error ?? "Error"),
        String(body.message ?? res.statusText),
        String(body.detail ?? ""),
        res.status,
      );
    }
    return body;
  }

  async head(): Promise<ChainHead> {
    const head = (await this.request("/chain/head")) as ChainHead;
    this.chainId = head.chain_id;
    return head;
  }

  async account(id: string): Promise<AccountInfo> {
    return (await this.request(`/accounts/${id}`)) as AccountInfo;
  }

  async send(
    key: Keypair,
    op: string,
    args: TxArgs,
    value: bigint = 0n,
  ): Promise<TxResponse> {
    if (this.chainId === null) await this.head();
    const info = await this.account(key.account);
    const wire = buildTransaction(
      key,
      this.chainId as string,
      info.nonce,
      op,
      args,
      value,
    );
    return (await this.request("/tx", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(wire),
    })) as TxResponse;
  }

  async signedGet(key: Keypair, path: string): Promise<unknown> {
    if (this.chainId === null) await this.head();
    const nonce = randomNonce();
    const timestamp = Math.floor(Date.now() / 1000);
    const payload = readAuthPayload(
      this.chainId as string,
      "GET",
      path,
      nonce,
      timestamp,
    );
    return this.request(path, {
      headers: {
        "X-Auth-Account": key.account,
        "X-Auth-PublicKey": key.publicKeyHex,
        "X-Auth-Timestamp": String(timestamp),
        "X-Auth-Nonce": nonce,
        "X-Auth-Signature": sign(key, payload),
      },
    });
  }
}
