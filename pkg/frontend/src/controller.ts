// Session controller: the full panel behaviour without any DOM bindings,
// so tests can drive it headlessly against a real service. Every mutation
// waits for the service response before the view changes (no optimism).

import { Client, StateView } from "./api.js";
import { renderHistory, renderState, type FoldKeys } from "./render.js";

export class SessionController {
  private sid: string | null = null;
  private state: StateView | null = null;
  private folds = new Set<string>();
  readonly commandHistory: string[] = [];
  private historyCursor = -1;
  lastError: string | null = null;

  constructor(private readonly client: Client) {}

  get sessionId(): string | null {
    return this.sid;
  }

  get current(): StateView | null {
    return this.state;
  }

  async open(theory: string, goal: string): Promise<void> {
    const reply = await this.client.createSession(theory, goal);
    this.sid = reply.id;
    this.state = reply.state;
    this.folds.clear();
    this.lastError = null;
  }

  async applyTactic(tactic: string): Promise<boolean> {
    if (this.sid === null) throw new Error("no open session");
    this.commandHistory.push(tactic);
    this.historyCursor = this.commandHistory.length;
    try {
      const reply = await this.client.tactic(this.sid, tactic);
      this.state = reply.state;
      this.lastError = null;
      return true;
    } catch (err) {
      // the session is unchanged on tactic errors; surface the diagnostic
      this.lastError = err instanceof Error ? err.message : String(err);
      return false;
    }
  }

  async undo(): Promise<boolean> {
    if (this.sid === null) throw new Error("no open session");
    try {
      const reply = await this.client.undo(this.sid);
      this.state = reply.state;
      this.lastError = null;
      return true;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      return false;
    }
  }

  async exportProof(): Promise<ArrayBuffer> {
    if (this.sid === null) throw new Error("no open session");
    return this.client.exportProof(this.sid);
  }

  toggleFold(key: string): void {
    // presentation only: no service call, the session does not change
    if (this.folds.has(key)) this.folds.delete(key);
    else this.folds.add(key);
  }

  recallCommand(direction: -1 | 1): string | null {
    if (this.commandHistory.length === 0) return null;
    const next = this.historyCursor + direction;
    if (next < 0 || next > this.commandHistory.length) return null;
    this.historyCursor = Math.min(next, this.commandHistory.length);
    return this.historyCursor === this.commandHistory.length
      ? ""
      : this.commandHistory[this.historyCursor] ?? null;
  }

  foldKeys(): FoldKeys {
    return this.folds;
  }

  html(): string {
    if (this.state === null) return `<div id="empty">No session.</div>`;
    const error = this.lastError === null
      ? ""
      : `<div id="tactic-error">${this.lastError
          .replace(/&/g, "&amp;").replace(/</g, "&lt;")}</div>`;
    return [
      renderState(this.state, this.folds),
      error,
      renderHistory(this.state.steps),
    ].join("\n");
  }
}
