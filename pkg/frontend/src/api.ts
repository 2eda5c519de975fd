// Typed client for the proof-session service. Every method is exactly one
// HTTP call; the client holds no proof logic of its own.

export interface PatternView {
  folded: string;
  expanded: string;
}

export interface HypothesisView extends PatternView {
  name: string;
}

export interface Obligation {
  kind: string;
  target: string;
  discharged: boolean;
}

export interface StateView {
  obligations: Obligation[];
  theory: string;
  axioms: string[];
  hypotheses: HypothesisView[];
  goal: PatternView | null;
  goals_open: number;
  closed: boolean;
  goal_stack: string[];
  rendering: string;
  steps: string[];
}

export interface SessionReply {
  id: string;
  state: StateView;
}

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function decode<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // keep the status text
    }
    throw new ServiceError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class Client {
  constructor(readonly base: string, private readonly doFetch: typeof fetch = fetch) {}

  private url(path: string): string {
    return `${this.base.replace(/\/$/, "")}${path}`;
  }

  async theories(): Promise<string[]> {
    const body = await decode<{ theories: string[] }>(
      await this.doFetch(this.url("/theories")),
    );
    return body.theories;
  }

  async createSession(theory: string, goal: string): Promise<SessionReply> {
    return decode(
      await this.doFetch(this.url("/sessions"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ theory, goal }),
      }),
    );
  }

  async state(id: string): Promise<SessionReply> {
    return decode(await this.doFetch(this.url(`/sessions/${id}/state`)));
  }

  async tactic(id: string, tactic: string): Promise<SessionReply> {
    return decode(
      await this.doFetch(this.url(`/sessions/${id}/tactic`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ tactic }),
      }),
    );
  }

  async undo(id: string): Promise<SessionReply> {
    return decode(
      await this.doFetch(this.url(`/sessions/${id}/undo`), { method: "POST" }),
    );
  }

  async exportProof(id: string): Promise<ArrayBuffer> {
    const resp = await this.doFetch(this.url(`/sessions/${id}/proof`));
    if (!resp.ok) {
      const body = (await resp.json()) as { error?: string };
      throw new ServiceError(resp.status, body.error ?? resp.statusText);
    }
    return resp.arrayBuffer();
  }
}
