import * as ed from "@noble/ed25519";
import { sha256, sha512 } from "@noble/hashes/sha2.js";
import { bytesToHex, utf8ToBytes } from "@noble/hashes/utils.js";

// noble's ed25519 needs an external sha512 for the sync code path
ed.hashes.sha512 = sha512;

export interface Keypair {
  privateKey: Uint8Array;
  publicKey: Uint8Array;
  publicKeyHex: string;
  account: string;
}

export function accountFromPublicKey(publicKey: Uint8Array): string {
  return "0x" + bytesToHex(sha256(publicKey).slice(-20));
}

export function fromSeed(seed: string): Keypair {
  const privateKey = sha256(utf8ToBytes(seed));
  return fromPrivateKey(privateKey);
}

export function fromPrivateKey(privateKey: Uint8Array): Keypair {
  const publicKey = ed.getPublicKey(privateKey);
  return {
    privateKey,
    publicKey,
    publicKeyHex: bytesToHex(publicKey),
    account: accountFromPublicKey(publicKey),
  };
}

export function sign(key: Keypair, payload: Uint8Array): string {
  return bytesToHex(ed.sign(payload, key.privateKey));
}
