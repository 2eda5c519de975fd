import { describe, expect, it } from "vitest";

import type { StateView } from "../src/api.js";
import {
  escapeHtml, renderGoal, renderHistory, renderHypotheses, renderState,
} from "../src/render.js";

// A verbatim service response (shape of GET /sessions/{id}/state .state):
// the client must render exactly these strings and never derive its own.
const STATE: StateView = {
  obligations: [{ kind: "well_formed", target: "goal", discharged: true }],
  theory: "DEF",
  axioms: ["Definedness"],
  hypotheses: [
    {
      name: "H0",
      folded: "⌈ pY and pX ⌉",
      expanded: "def $ ((((pY ---> ⊥) ---> ⊥) ---> pX ---> ⊥) ---> ⊥)",
    },
    {
      name: "H1",
      folded: "! ⌊ pY ---> pX ⌋ or ! ⌊ pX ---> pY ⌋",
      expanded: "(irrelevant for this test)",
    },
  ],
  goal: { folded: "⊥", expanded: "⊥" },
  goals_open: 1,
  closed: false,
  goal_stack: ["⊥"],
  rendering: "Γ ⊢\n...",
  steps: ['mlIntro "H0"', 'mlIntro "H1"'],
};

describe("state rendering", () => {
  it("shows hypotheses verbatim from the service", () => {
    const html = renderHypotheses(STATE, new Set());
    expect(html).toContain('"H0"');
    expect(html).toContain(escapeHtml("⌈ pY and pX ⌉"));
    expect(html).toContain(
      escapeHtml("! ⌊ pY ---> pX ⌋ or ! ⌊ pX ---> pY ⌋"),
    );
    // no client-side rewriting: the folded string appears character-exact
    expect(html.includes("pY ---&gt; pX")).toBe(true);
  });

  it("fold toggle switches to the service's expanded string only", () => {
    const folded = renderHypotheses(STATE, new Set());
    expect(folded).not.toContain("def $");
    const expanded = renderHypotheses(STATE, new Set(["hyp:H0"]));
    expect(expanded).toContain(escapeHtml(STATE.hypotheses[0]!.expanded));
    // the other hypothesis stays folded
    expect(expanded).toContain(escapeHtml(STATE.hypotheses[1]!.folded));
  });

  it("renders the goal and the closed state", () => {
    expect(renderGoal(STATE, new Set())).toContain("⊥");
    const done: StateView = { ...STATE, goal: null, closed: true, goals_open: 0 };
    expect(renderGoal(done, new Set())).toContain("No more goals.");
  });

  it("snapshot of the full panel", () => {
    expect(renderState(STATE, new Set())).toMatchInlineSnapshot(`
      "<ul id="obligations"><li class="done">well_formed(goal) ✓</li></ul>
      <details id="global-context"><summary>DEF (1 axioms)</summary><ul><li>Definedness</li></ul></details>
      <table id="hypotheses"><tr><td class="hyp-name">"H0"</td><td><span class="pattern folded" data-fold-key="hyp:H0" title="click to toggle notation folding">⌈ pY and pX ⌉</span></td></tr><tr><td class="hyp-name">"H1"</td><td><span class="pattern folded" data-fold-key="hyp:H1" title="click to toggle notation folding">! ⌊ pY ---&gt; pX ⌋ or ! ⌊ pX ---&gt; pY ⌋</span></td></tr></table>
      <hr class="turnstile">
      <div id="goal"><span class="pattern folded" data-fold-key="goal" title="click to toggle notation folding">⊥</span></div>
      <nav id="goal-stack">1 open: <span class="crumb focused">⊥</span></nav>"
    `);
  });

  it("renders command history in order", () => {
    const html = renderHistory(STATE.steps);
    expect(html).toContain("1. mlIntro ");
    expect(html).toContain("2. mlIntro ");
  });
});
