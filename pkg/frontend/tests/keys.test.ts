import { describe, expect, it } from "vitest";
import { utf8ToBytes, bytesToHex } from "@noble/hashes/utils.js";
import { fromSeed, sign } from "../src/keys.js";
import { buildTransaction, readAuthPayload } from "../src/api.js";

// Vectors produced by the node's key and transaction code. The console must
// derive the same account and signatures from the same seed.

describe("key derivation", () => {
  const kp = fromSeed("console:demo");

  it("derives the private key from the seed hash", () => {
    expect(bytesToHex(kp.privateKey)).toBe(
      "96a3e42dfb9c18df930b25fe4847dd45d65d8e98b1d3a8679bed69917a844be2",
    );
  });

  it("derives the expected public key", () => {
    expect(kp.publicKeyHex).toBe(
      "1ce50d95e2d13c8b5e063d400053626c9b1e5815714b1c0414f076c70c9c9a6c",
    );
  });

  it("derives the account id from the public key hash tail", () => {
    expect(kp.account).toBe("0x02db26585427f4a3b400e112bbead94e1e903240");
  });

  it("signs deterministically", () => {
    expect(sign(kp, utf8ToBytes("medledger test payload"))).toBe(
      "b08d1da9e6a3635dc9722f4bbb85f0c7ffab024d0993c3f9cc0648e54ac83c47" +
        "494b994fd437bfd522bbf29950636d11742f5b494a6d5a78f0248299b74cc506",
    );
  });
});

describe("transaction wire form", () => {
  const kp = fromSeed("console:demo");
  const wire = buildTransaction(
    kp,
    "con-demo",
    3,
    "trigger_payment",
    { beneficiary: "0x" + "11".repeat(20) },
    7n,
  );

  it("matches the node's signature for the same fields", () => {
    expect(wire.signature).toBe(
      "384cab4321ffd451fcc9e7376536e46e78287afc015fbdc59c83d885aa731c0b" +
        "aa3d434ffc8150a311474412ec11352cf19f5893b356fe8869897a5a3ea20f00",
    );
  });

  it("matches the node's wire object", () => {
    expect(wire).toEqual({
      args: { beneficiary: "0x1111111111111111111111111111111111111111" },
      chain_id: "con-demo",
      nonce: 3,
      op: "trigger_payment",
      public_key:
        "1ce50d95e2d13c8b5e063d400053626c9b1e5815714b1c0414f076c70c9c9a6c",
      sender: "0x02db26585427f4a3b400e112bbead94e1e903240",
      signature: wire.signature,
      value: "7",
    });
  });

  it("carries the value as a decimal string", () => {
    const big = buildTransaction(kp, "c", 0, "trigger_payment", {}, 25n * 10n ** 18n);
    expect(big.value).toBe("25000000000000000000");
  });
});

describe("read auth payload", () => {
  it("matches the node's canonical bytes", () => {
    const payload = readAuthPayload(
      "con-demo",
      "GET",
      "/patients/0x" + "22".repeat(20) + "/records/1",
      "abcd1234",
      1750000000,
    );
    expect(bytesToHex(payload)).toBe(
      "06000000050400000008636861696e5f69640400000008636f6e2d64656d6f04000000066d6574686f64040000000347455404000000056e6f6e636504000000086162636431323334040000000470617468040000003e2f70617469656e74732f3078323232323232323232323232323232323232323232323232323232323232323232323232323232322f7265636f7264732f31040000000974696d657374616d700204684ee180",
    );
  });
});
