import { beforeEach, describe, expect, it } from "vitest";
import { GatewayClient } from "../src/api.js";
import { LedgerConsole } from "../src/console.js";
import { fromSeed } from "../src/keys.js";

// Offline console behaviour against a scripted gateway. The wire-level
// contract is covered by the live-node flow test; this checks that the UI
// repeats the server's words and toggles controls off server answers alone.

const pharmacy = fromSeed("console:pharmacy");
const patient = fromSeed("console:patient");

interface Scripted {
  grantOpen: boolean;
  billReceipt: Record<string, unknown>;
  txCount: number;
}

function scriptedFetch(state: Scripted): typeof fetch {
  return async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input));
    const reply = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
      });
    if (url.pathname === "/chain/head") {
      return reply(200, { chain_id: "t", height: 1, state_root: "00" });
    }
    if (url.pathname.startsWith("/accounts/")) {
      return reply(200, {
        account: url.pathname.split("/")[2],
        role: "Pharmacy",
        balance: "0",
        nonce: state.txCount,
      });
    }
    if (url.pathname === `/patients/${patient.account}/records/1`) {
      if (!state.grantOpen) {
        return reply(403, {
          error: "NotAllowed",
          message: "Not Allowed",
          detail: "grant is closed",
        });
      }
      return reply(200, {
        patient: patient.account,
        record_id: 1,
        prescription: "sha256:" + "5e".repeat(32),
      });
    }
    if (url.pathname === "/tx" && init?.method === "POST") {
      state.txCount += 1;
      return reply(200, {
        tx_hash: "ab".repeat(32),
        status: "committed",
        receipt: state.billReceipt,
      });
    }
    return reply(404, { error: "NotFound", message: "no route", detail: "" });
  };
}

describe("pharmacy console", () => {
  let state: Scripted;
  let ui: LedgerConsole;
  let root: HTMLElement;

  beforeEach(async () => {
    state = {
      grantOpen: false,
      txCount: 0,
      billReceipt: {
        tx_hash: "ab".repeat(32),
        op: "set_bill",
        sender: pharmacy.account,
        status: "ok",
        code: null,
        message: null,
        result: true,
        height: 2,
        index: 0,
      },
    };
    root = document.createElement("div");
    document.body.replaceChildren(root);
    ui = new LedgerConsole(
      root,
      new GatewayClient("http://node.test", scriptedFetch(state)),
      pharmacy,
    );
    await ui.init();
    (root.querySelector("#probe-patient") as HTMLInputElement).value =
      patient.account;
  });

  function el<T extends HTMLElement>(selector: string): T {
    return root.querySelector(selector) as T;
  }

  it("shows identity and role from the gateway", () => {
    expect(el("#identity").textContent).toContain(pharmacy.account);
    expect(el("#identity").textContent).toContain("Pharmacy");
  });

  it("starts with billing disabled", () => {
    expect(el<HTMLButtonElement>("#submit-bill-btn").disabled).toBe(true);
  });

  it("repeats a denial verbatim and keeps billing disabled", async () => {
    el("#check-access-btn").click();
    await ui.settle();
    expect(el("#denial").textContent).toBe("Not Allowed");
    expect(el("#denial").hasAttribute("hidden")).toBe(false);
    expect(el<HTMLButtonElement>("#submit-bill-btn").disabled).toBe(true);
    expect(el("#record-view").textContent).toBe("");
  });

  it("enables billing only after the gateway grants the read", async () => {
    state.grantOpen = true;
    el("#check-access-btn").click();
    await ui.settle();
    expect(el("#denial").textContent).toBe("");
    expect(el("#record-view").textContent).toBe("sha256:" + "5e".repeat(32));
    expect(el<HTMLButtonElement>("#submit-bill-btn").disabled).toBe(false);
  });

  it("shows a receipt denial verbatim, typo and all", async () => {
    state.grantOpen = true;
    el("#check-access-btn").click();
    await ui.settle();
    state.billReceipt = {
      ...state.billReceipt,
      status: "error",
      code: "NotAllowed",
      message: "Transaction Unsucessful",
      result: null,
    };
    (el("#bill-hash") as HTMLInputElement).value = "sha256:" + "b1".repeat(32);
    el("#submit-bill-btn").click();
    await ui.settle();
    expect(el("#denial").textContent).toBe("Transaction Unsucessful");
  });

  it("rechecks access after a successful bill", async () => {
    state.grantOpen = true;
    el("#check-access-btn").click();
    await ui.settle();
    (el("#bill-hash") as HTMLInputElement).value = "sha256:" + "b1".repeat(32);
    // billing closes the grant server-side; the follow-up probe must win
    state.grantOpen = false;
    el("#submit-bill-btn").click();
    await ui.settle();
    expect(el("#denial").textContent).toBe("Not Allowed");
    expect(el<HTMLButtonElement>("#submit-bill-btn").disabled).toBe(true);
  });
});
