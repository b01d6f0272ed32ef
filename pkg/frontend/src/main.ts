import { GatewayClient } from "./api.js";
import { LedgerConsole } from "./console.js";
import { fromSeed } from "./keys.js";

const app = document.getElementById("app");
if (app) {
  app.innerHTML = `
    <h1>medledger console</h1>
    <form id="login">
      <label>node <input id="node-url" value="http://127.0.0.1:8545" size="32"></label>
      <label>seed <input id="seed" type="password" size="32"></label>
      <button>Open</button>
    </form>
    <div id="workspace"></div>`;
  const form = app.querySelector("#login") as HTMLFormElement;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const url = (app.querySelector("#node-url") as HTMLInputElement).value;
    const seed = (app.querySelector("#seed") as HTMLInputElement).value;
    const workspace = app.querySelector("#workspace") as HTMLElement;
    const view = new LedgerConsole(
      workspace,
      new GatewayClient(url),
      fromSeed(seed),
    );
    void view.init();
  });
}

export { GatewayClient, LedgerConsole, fromSeed };
