import {
  GatewayClient,
  GatewayError,
  type AccountInfo,
  type TxArgs,
  type TxReceipt,
} from "./api.js";
import type { Keypair } from "./keys.js";

function h<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const el = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  el.append(...children);
  return el;
}

function field(label: string, input: HTMLElement): HTMLLabelElement {
  return h("label", {}, label + " ", input);
}

/**
 * One account's view onto a ledger node.
 *
 * Every enabled/disabled state and every denial string comes from a gateway
 * response. The console never second-guesses the node's permission checks,
 * it only reports them.
 */
export class LedgerConsole {
  readonly root: HTMLElement;
  private readonly client: GatewayClient;
  private readonly key: Keypair;

  private identity!: HTMLElement;
  private denial!: HTMLElement;
  private logList!: HTMLElement;
  private panel!: HTMLElement;
  private inflight: Promise<void> = Promise.resolve();

  constructor(root: HTMLElement, client: GatewayClient, key: Keypair) {
    this.root = root;
    this.client = client;
    this.key = key;
  }

  async init(): Promise<void> {
    this.identity = h("p", { id: "identity" });
    this.denial = h("p", { id: "denial", class: "denial", hidden: "" });
    this.panel = h("section", { id: "panel" });
    this.logList = h("ul", { id: "log" });
    this.root.replaceChildren(
      h("header", {}, h("h2", {}, "medledger"), this.identity),
      this.denial,
      this.panel,
      h("section", {}, h("h3", {}, "Activity"), this.logList),
    );
    const info = await this.refreshIdentity();
    this.renderPanel(info.role);
  }

  /** Wait for the action started by the most recent click to finish. */
  settle(): Promise<void> {
    return this.inflight;
  }

  private run(action: Promise<void>): void {
    this.inflight = action;
  }

  private async refreshIdentity(): Promise<AccountInfo> {
    const info = await this.client.account(this.key.account);
    this.identity.textContent =
      `${info.account} · ${info.role ?? "unregistered"} · balance ${info.balance}`;
    return info;
  }

  private showDenial(message: string): void {
    // the banner carries the server's words and nothing else
    this.denial.textContent = message;
    this.denial.removeAttribute("hidden");
  }

  private clearDenial(): void {
    this.denial.textContent = "";
    this.denial.setAttribute("hidden", "");
  }

  private log(line: string): void {
    this.logList.append(h("li", {}, line));
  }

  private async submitOp(
    label: string,
    op: string,
    args: TxArgs,
    value: bigint = 0n,
  ): Promise<TxReceipt | null> {
    this.clearDenial();
    try {
      const res = await this.client.send(this.key, op, args, value);
      const receipt = res.receipt;
      if (receipt === null) {
        this.log(`${label}: pending`);
        return null;
      }
      if (receipt.status === "error") {
        this.showDenial(receipt.message ?? "");
        this.log(`${label}: denied (${receipt.code})`);
        await this.refreshIdentity();
        return null;
      }
      this.log(`${label}: ok`);
      await this.refreshIdentity();
      return receipt;
    } catch (err) {
      if (!(err instanceof GatewayError)) throw err;
      // the node refused to admit the transaction at all
      this.showDenial(err.message);
      this.log(`${label}: rejected (${err.code})`);
      return null;
    }
  }

  private async probe(
    label: string,
    path: string,
    onOk: (data: Record<string, unknown>) => void,
    onDenied: () => void,
  ): Promise<void> {
    this.clearDenial();
    try {
      const data = (await this.client.signedGet(this.key, path)) as Record<
        string,
        unknown
      >;
      onOk(data);
      this.log(`${label}: ok`);
    } catch (err) {
      if (!(err instanceof GatewayError)) throw err;
      onDenied();
      this.showDenial(err.message);
      this.log(`${label}: denied (${err.code})`);
    }
  }

  private renderPanel(role: string | null): void {
    this.panel.replaceChildren();
    switch (role) {
      case "Patient":
        this.renderPatient();
        break;
      case "Pharmacy":
        this.renderPharmacy();
        break;
      case "Insurer":
        this.renderInsurer();
        break;
      case "Doctor":
        this.renderDoctor();
        break;
      case "Hospital":
        this.renderHospital();
        break;
      case "Administrator":
        this.renderAdministrator();
        break;
      default:
        this.panel.append(
          h("p", {}, "This account holds no role on the ledger."),
        );
    }
  }

  private renderPatient(): void {
    const countOut = h("span", { id: "record-count" });
    const countBtn = h("button", { id: "record-count-btn" }, "My record count");
    countBtn.addEventListener("click", () => {
      this.run(
        this.probe(
          "record count",
          `/patients/${this.key.account}/records/count`,
          (data) => {
            countOut.textContent = String(data.count);
          },
          () => {
            countOut.textContent = "";
          },
        ),
      );
    });

    const viewId = h("input", { id: "view-record-id", value: "1", size: "4" });
    const viewBtn = h("button", { id: "view-record-btn" }, "View record");
    const recordView = h("pre", { id: "patient-record-view" });
    viewBtn.addEventListener("click", () => {
      this.run(
        this.probe(
          "record view",
          `/patients/${this.key.account}/records/${viewId.value}`,
          (data) => {
            recordView.textContent = JSON.stringify(data, null, 2);
          },
          () => {
            recordView.textContent = "";
          },
        ),
      );
    });

    const grantPharmacy = h("input", { id: "grant-pharmacy-account", size: "46" });
    const grantRecord = h("input", { id: "grant-record-id", value: "1", size: "4" });
    const grantBtn = h("button", { id: "grant-btn" }, "Grant pharmacy access");
    grantBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          await this.submitOp("pharmacy grant", "allow_pharmacy", {
            pharmacy: grantPharmacy.value,
            record_id: Number(grantRecord.value),
          });
        })(),
      );
    });

    const claimInsurer = h("input", { id: "claim-insurer-account", size: "46" });
    const claimRecord = h("input", { id: "claim-record-id", value: "1", size: "4" });
    const claimBtn = h("button", { id: "claim-btn" }, "Raise claim");
    claimBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          await this.submitOp("claim", "allow_insurer", {
            insurer: claimInsurer.value,
            record_id: Number(claimRecord.value),
          });
        })(),
      );
    });

    this.panel.append(
      h("h3", {}, "Patient"),
      h("div", {}, countBtn, countOut),
      h("div", {}, field("record", viewId), viewBtn),
      recordView,
      h("div", {}, field("pharmacy", grantPharmacy), field("record", grantRecord), grantBtn),
      h("div", {}, field("insurer", claimInsurer), field("record", claimRecord), claimBtn),
    );
  }

  private renderPharmacy(): void {
    const patient = h("input", { id: "probe-patient", size: "46" });
    const recordId = h("input", { id: "probe-record-id", value: "1", size: "4" });
    const checkBtn = h("button", { id: "check-access-btn" }, "Check access");
    const view = h("pre", { id: "record-view" });
    const billHash = h("input", { id: "bill-hash", size: "72" });
    const billBtn = h("button", { id: "submit-bill-btn" }, "Submit bill");
    (billBtn as HTMLButtonElement).disabled = true;

    const probeAccess = () =>
      this.probe(
        "record access",
        `/patients/${patient.value}/records/${recordId.value}`,
        (data) => {
          view.textContent = String(data.prescription);
          (billBtn as HTMLButtonElement).disabled = false;
        },
        () => {
          view.textContent = "";
          (billBtn as HTMLButtonElement).disabled = true;
        },
      );

    checkBtn.addEventListener("click", () => {
      this.run(probeAccess());
    });
    billBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          const receipt = await this.submitOp("bill", "set_bill", {
            patient: patient.value,
            bill: billHash.value,
          });
          // a grant is single use; re-check rather than assume
          if (receipt) await probeAccess();
        })(),
      );
    });

    this.panel.append(
      h("h3", {}, "Pharmacy"),
      h("div", {}, field("patient", patient), field("record", recordId), checkBtn),
      view,
      h("div", {}, field("bill hash", billHash), billBtn),
    );
  }

  private renderInsurer(): void {
    const enrollPatient = h("input", { id: "enroll-patient", size: "46" });
    const enrollBtn = h("button", { id: "enroll-btn" }, "Enroll customer");
    enrollBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          await this.submitOp("enroll", "add_customer", {
            patient: enrollPatient.value,
          });
        })(),
      );
    });

    const patient = h("input", { id: "claim-patient", size: "46" });
    const recordId = h("input", { id: "claim-record-id", value: "1", size: "4" });
    const checkBtn = h("button", { id: "check-claim-btn" }, "Check claim");
    const view = h("pre", { id: "claim-view" });
    const amount = h("input", { id: "pay-amount", size: "24" });
    const payBtn = h("button", { id: "pay-claim-btn" }, "Pay claim");
    (payBtn as HTMLButtonElement).disabled = true;

    const probeClaim = () =>
      this.probe(
        "claim record",
        `/patients/${patient.value}/records/${recordId.value}`,
        (data) => {
          view.textContent = `prescription ${data.prescription}\nbill ${data.bill}`;
          (payBtn as HTMLButtonElement).disabled = false;
        },
        () => {
          view.textContent = "";
          (payBtn as HTMLButtonElement).disabled = true;
        },
      );

    checkBtn.addEventListener("click", () => {
      this.run(probeClaim());
    });
    payBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          let value: bigint;
          try {
            value = BigInt(amount.value);
          } catch {
            this.log("payout: invalid amount");
            return;
          }
          const receipt = await this.submitOp(
            "payout",
            "insurance_payment",
            { patient: patient.value },
            value,
          );
          // payout clears the claim flag; the node decides what is left
          if (receipt) await probeClaim();
        })(),
      );
    });

    this.panel.append(
      h("h3", {}, "Insurer"),
      h("div", {}, field("patient", enrollPatient), enrollBtn),
      h("div", {}, field("patient", patient), field("record", recordId), checkBtn),
      view,
      h("div", {}, field("amount", amount), payBtn),
    );
  }

  private renderDoctor(): void {
    const patient = h("input", { id: "probe-patient", size: "46" });
    const recordId = h("input", { id: "probe-record-id", value: "1", size: "4" });
    const checkBtn = h("button", { id: "check-record-btn" }, "View record");
    const view = h("pre", { id: "record-view" });
    checkBtn.addEventListener("click", () => {
      this.run(
        this.probe(
          "record view",
          `/patients/${patient.value}/records/${recordId.value}`,
          (data) => {
            view.textContent = String(data.prescription);
          },
          () => {
            view.textContent = "";
          },
        ),
      );
    });

    const rxPatient = h("input", { id: "rx-patient", size: "46" });
    const rxHash = h("input", { id: "rx-hash", size: "72" });
    const rxBtn = h("button", { id: "add-prescription-btn" }, "Add prescription");
    rxBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          await this.submitOp("prescription", "add_prescription", {
            patient: rxPatient.value,
            prescription: rxHash.value,
          });
        })(),
      );
    });

    this.panel.append(
      h("h3", {}, "Doctor"),
      h("div", {}, field("patient", patient), field("record", recordId), checkBtn),
      view,
      h("div", {}, field("patient", rxPatient), field("prescription hash", rxHash), rxBtn),
    );
  }

  private renderHospital(): void {
    const patient = h("input", { id: "rec-patient", size: "46" });
    const doctor = h("input", { id: "rec-doctor", size: "46" });
    const admission = h("input", { id: "rec-admission", size: "12" });
    const discharge = h("input", { id: "rec-discharge", size: "12" });
    const addBtn = h("button", { id: "add-record-btn" }, "Open record");
    addBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          const receipt = await this.submitOp("record", "add_record", {
            patient: patient.value,
            doctor: doctor.value,
            admission: Number(admission.value),
            discharge: Number(discharge.value),
          });
          if (receipt) this.log(`record id: ${receipt.result}`);
        })(),
      );
    });

    this.panel.append(
      h("h3", {}, "Hospital"),
      h("div", {}, field("patient", patient), field("doctor", doctor)),
      h("div", {}, field("admission", admission), field("discharge", discharge), addBtn),
    );
  }

  private renderAdministrator(): void {
    const kind = h("select", { id: "reg-kind" });
    for (const k of ["patient", "doctor", "hospital", "insurer", "pharmacy"]) {
      kind.append(h("option", { value: k }, k));
    }
    const fields = h("span", { id: "reg-fields" });
    const renderFields = () => {
      fields.replaceChildren(field("account", h("input", { id: "reg-account", size: "46" })));
      if (kind.value === "patient") {
        fields.append(
          field("age", h("input", { id: "reg-age", size: "4" })),
          field("gender", h("input", { id: "reg-gender", size: "4" })),
        );
      } else if (kind.value === "doctor") {
        fields.append(
          field("name", h("input", { id: "reg-name", size: "18" })),
          field("hospital", h("input", { id: "reg-hospital", size: "46" })),
          field("specialty", h("input", { id: "reg-spec", size: "18" })),
        );
      }
    };
    renderFields();
    kind.addEventListener("change", renderFields);

    const input = (id: string) =>
      (fields.querySelector(`#${id}`) as HTMLInputElement).value;
    const regBtn = h("button", { id: "register-btn" }, "Register");
    regBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          const k = kind.value;
          let args: TxArgs;
          if (k === "patient") {
            args = {
              patient: input("reg-account"),
              age: Number(input("reg-age")),
              gender: input("reg-gender"),
            };
          } else if (k === "doctor") {
            args = {
              doctor: input("reg-account"),
              name: input("reg-name"),
              hospital: input("reg-hospital"),
              spec: input("reg-spec"),
            };
          } else {
            args = { [k]: input("reg-account") };
          }
          await this.submitOp(`register ${k}`, `register_${k}`, args);
        })(),
      );
    });

    const removeTarget = h("input", { id: "remove-target", size: "46" });
    const removeBtn = h("button", { id: "remove-btn" }, "Remove stakeholder");
    removeBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          await this.submitOp("remove", "remove_stakeholder", {
            target: removeTarget.value,
          });
        })(),
      );
    });

    const payTo = h("input", { id: "pay-to", size: "46" });
    const payAmount = h("input", { id: "pay-amount", size: "24" });
    const payBtn = h("button", { id: "transfer-btn" }, "Transfer");
    payBtn.addEventListener("click", () => {
      this.run(
        (async () => {
          let value: bigint;
          try {
            value = BigInt(payAmount.value);
          } catch {
            this.log("transfer: invalid amount");
            return;
          }
          await this.submitOp(
            "transfer",
            "trigger_payment",
            { beneficiary: payTo.value },
            value,
          );
        })(),
      );
    });

    this.panel.append(
      h("h3", {}, "Administrator"),
      h("div", {}, field("kind", kind), fields, regBtn),
      h("div", {}, field("account", removeTarget), removeBtn),
      h("div", {}, field("to", payTo), field("amount", payAmount), payBtn),
    );
  }
}
