// DOM bootstrap: binds the controller to the page. All rendering comes
// from controller.html(); event handlers call one controller method each.

import { Client } from "./api.js";
import { SessionController } from "./controller.js";
import { TACTIC_COMPLETIONS } from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const got = document.getElementById(id);
  if (!got) throw new Error(`missing element #${id}`);
  return got as T;
}

function download(bytes: ArrayBuffer, filename: string): void {
  const blob = new Blob([bytes], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

async function boot(): Promise<void> {
  const client = new Client(window.location.origin);
  const controller = new SessionController(client);
  const panel = el<HTMLDivElement>("panel");
  const tacticInput = el<HTMLInputElement>("tactic");

  const completions = el<HTMLDataListElement>("tactic-list");
  for (const t of TACTIC_COMPLETIONS) {
    const opt = document.createElement("option");
    opt.value = t;
    completions.appendChild(opt);
  }

  const theorySelect = el<HTMLSelectElement>("theory");
  for (const name of await client.theories()) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    theorySelect.appendChild(opt);
  }

  const repaint = () => {
    panel.innerHTML = controller.html();
  };

  el<HTMLFormElement>("open-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const goal = el<HTMLInputElement>("goal").value;
    try {
      await controller.open(theorySelect.value, goal);
    } catch (err) {
      controller.lastError = err instanceof Error ? err.message : String(err);
    }
    repaint();
    tacticInput.focus();
  });

  el<HTMLFormElement>("tactic-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const text = tacticInput.value.trim();
    if (!text) return;
    if (await controller.applyTactic(text)) tacticInput.value = "";
    repaint();
  });

  tacticInput.addEventListener("keydown", (ev) => {
    if (ev.key !== "ArrowUp" && ev.key !== "ArrowDown") return;
    const recalled = controller.recallCommand(ev.key === "ArrowUp" ? -1 : 1);
    if (recalled !== null) {
      tacticInput.value = recalled;
      ev.preventDefault();
    }
  });

  el<HTMLButtonElement>("undo").addEventListener("click", async () => {
    await controller.undo();
    repaint();
  });

  el<HTMLButtonElement>("export").addEventListener("click", async () => {
    try {
      download(await controller.exportProof(), "proof.mlproof");
    } catch (err) {
      controller.lastError = err instanceof Error ? err.message : String(err);
      repaint();
    }
  });

  panel.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const key = target.dataset["foldKey"];
    if (key) {
      controller.toggleFold(key);
      repaint();
    }
  });

  repaint();
}

void boot();
