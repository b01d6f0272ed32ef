import { sha256 } from "@noble/hashes/sha2.js";
import { bytesToHex } from "@noble/hashes/utils.js";

// Tag-length-value encoding shared with the node. Every structure the
// gateway signs or hashes goes through this, so the bytes here must match
// the server exactly or signatures stop verifying.

const TAG_BOOL = 0x01;
const TAG_INT = 0x02;
const TAG_BYTES = 0x03;
const TAG_STR = 0x04;
const TAG_LIST = 0x05;
const TAG_DICT = 0x06;

const MAX_INT = 1n << 256n;

export type Canonical =
  | boolean
  | number
  | bigint
  | string
  | Uint8Array
  | Canonical[]
  | { [key: string]: Canonical };

const utf8 = new TextEncoder();

function u32(n: number): Uint8Array {
  const out = new Uint8Array(4);
  new DataView(out.buffer).setUint32(0, n, false);
  return out;
}

function intMagnitude(n: bigint): Uint8Array {
  if (n === 0n) return new Uint8Array(0);
  let hex = n.toString(16);
  if (hex.length % 2) hex = "0" + hex;
  const out = new Uint8Array(hex.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(hex.slice(i * 2, i * 2 + 2), 16);
  }
  return out;
}

function compareBytes(a: Uint8Array, b: Uint8Array): number {
  const n = Math.min(a.length, b.length);
  for (let i = 0; i < n; i++) {
    const d = (a[i] as number) - (b[i] as number);
    if (d !== 0) return d;
  }
  return a.length - b.length;
}

function encodeInto(value: Canonical, out: Uint8Array[]): void {
  if (typeof value === "boolean") {
    out.push(new Uint8Array([TAG_BOOL, value ? 1 : 0]));
    return;
  }
  if (typeof value === "number" || typeof value === "bigint") {
    if (typeof value === "number" && !Number.isSafeInteger(value)) {
      throw new TypeError(`cannot encode non-integer number: ${value}`);
    }
    const n = BigInt(value);
    if (n < 0n) throw new RangeError(`cannot encode negative integer: ${n}`);
    if (n >= MAX_INT) throw new RangeError("integer exceeds 256-bit bound");
    const mag = intMagnitude(n);
    out.push(new Uint8Array([TAG_INT, mag.length]), mag);
    return;
  }
  if (typeof value === "string") {
    const raw = utf8.encode(value);
    out.push(new Uint8Array([TAG_STR]), u32(raw.length), raw);
    return;
  }
  if (value instanceof Uint8Array) {
    out.push(new Uint8Array([TAG_BYTES]), u32(value.length), value);
    return;
  }
  if (Array.isArray(value)) {
    out.push(new Uint8Array([TAG_LIST]), u32(value.length));
    for (const item of value) encodeInto(item, out);
    return;
  }
  if (value !== null && typeof value === "object") {
    // keys sort by their UTF-8 bytes, not by UTF-16 code units
    const keys = Object.keys(value)
      .map((k) => ({ key: k, raw: utf8.encode(k) }))
      .sort((a, b) => compareBytes(a.raw, b.raw));
    out.push(new Uint8Array([TAG_DICT]), u32(keys.length));
    for (const { key, raw } of keys) {
      out.push(new Uint8Array([TAG_STR]), u32(raw.length), raw);
      encodeInto(value[key] as Canonical, out);
    }
    return;
  }
  throw new TypeError(`cannot encode value of type ${typeof value}`);
}

export function encode(value: Canonical): Uint8Array {
  const chunks: Uint8Array[] = [];
  encodeInto(value, chunks);
  let total = 0;
  for (const c of chunks) total += c.length;
  const out = new Uint8Array(total);
  let at = 0;
  for (const c of chunks) {
    out.set(c, at);
    at += c.length;
  }
  return out;
}

export function digest(value: Canonical): string {
  return bytesToHex(sha256(encode(value)));
}
