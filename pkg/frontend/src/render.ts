// Pure view rendering: service JSON in, HTML strings out. The client never
// computes a pattern transformation; folded/expanded strings both come from
// the service and the toggle merely chooses which one to show.

import type { StateView } from "./api.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export type FoldKeys = ReadonlySet<string>;

function patternSpan(key: string, folded: string, expanded: string,
                     showExpanded: boolean): string {
  const text = showExpanded ? expanded : folded;
  const mode = showExpanded ? "expanded" : "folded";
  return (
    `<span class="pattern ${mode}" data-fold-key="${escapeHtml(key)}" ` +
    `title="click to toggle notation folding">${escapeHtml(text)}</span>`
  );
}

export function renderObligations(state: StateView): string {
  const items = state.obligations
    .map(
      (o) =>
        `<li class="${o.discharged ? "done" : "open"}">` +
        `${escapeHtml(o.kind)}(${escapeHtml(o.target)})` +
        `${o.discharged ? " ✓" : ""}</li>`,
    )
    .join("");
  return `<ul id="obligations">${items}</ul>`;
}

export function renderGlobalContext(state: StateView): string {
  const axioms = state.axioms.map((a) => `<li>${escapeHtml(a)}</li>`).join("");
  return (
    `<details id="global-context"><summary>${escapeHtml(state.theory)} ` +
    `(${state.axioms.length} axioms)</summary><ul>${axioms}</ul></details>`
  );
}

export function renderHypotheses(state: StateView, folds: FoldKeys): string {
  const rows = state.hypotheses
    .map((h) => {
      const key = `hyp:${h.name}`;
      return (
        `<tr><td class="hyp-name">"${escapeHtml(h.name)}"</td>` +
        `<td>${patternSpan(key, h.folded, h.expanded, folds.has(key))}</td></tr>`
      );
    })
    .join("");
  return `<table id="hypotheses">${rows}</table>`;
}

export function renderGoal(state: StateView, folds: FoldKeys): string {
  if (state.goal === null) {
    return `<div id="goal" class="closed">No more goals.</div>`;
  }
  return (
    `<div id="goal">${patternSpan("goal", state.goal.folded,
                                  state.goal.expanded, folds.has("goal"))}</div>`
  );
}

export function renderBreadcrumbs(state: StateView): string {
  const crumbs = state.goal_stack
    .map((g, i) =>
      `<span class="crumb${i === 0 ? " focused" : ""}">${escapeHtml(g)}</span>`)
    .join(" · ");
  return `<nav id="goal-stack">${state.goals_open} open: ${crumbs}</nav>`;
}

export function renderState(state: StateView, folds: FoldKeys): string {
  return [
    renderObligations(state),
    renderGlobalContext(state),
    renderHypotheses(state, folds),
    `<hr class="turnstile">`,
    renderGoal(state, folds),
    renderBreadcrumbs(state),
  ].join("\n");
}

export function renderHistory(steps: readonly string[]): string {
  const items = steps
    .map((s, i) => `<li><code>${i + 1}. ${escapeHtml(s)}</code></li>`)
    .join("");
  return `<ol id="history">${items}</ol>`;
}

export const TACTIC_COMPLETIONS = [
  "mlIntro",
  "mlRevertLast",
  "mlClear",
  "mlExact",
  "mlDestructOr",
  "mlApply",
  "mlApplyMeta",
  "mlRewrite",
  "mlTauto",
] as const;
