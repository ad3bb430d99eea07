/** Pure view rendering: one session payload in, one HTML string out.
 *
 * Nothing here touches the DOM or the network, so the whole surface is
 * snapshot-testable: same payload, same markup, character for character.
 */

import type { SessionView, StepView } from "./protocol.js";

export interface Notice {
  kind: "reject" | "error" | "info";
  text: string;
  retryable?: boolean;
}

/** Everything the page shows: the last payload plus transient UI bits. */
export interface UiState {
  view: SessionView | null;
  /** step numbers whose hidden derivation is unfolded */
  revealed: ReadonlySet<number>;
  notice: Notice | null;
  pending: boolean;
  inputText: string;
  hint: string | null;
}

export function initialUi(): UiState {
  return {
    view: null,
    revealed: new Set(),
    notice: null,
    pending: false,
    inputText: "",
    hint: null,
  };
}

const ENTITIES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"]/g, (ch) => ENTITIES[ch]);
}

// display-only sugar; what goes back to the server stays ASCII
const PRETTY: [RegExp, string][] = [
  [/ != /g, " ≠ "],
  [/ >= /g, " ≥ "],
  [/ <= /g, " ≤ "],
  [/ \* /g, " ⋅ "],
  [/\bsqrt /g, "√"],
];

export function pretty(formula: string): string {
  let out = formula;
  for (const [pattern, glyph] of PRETTY) out = out.replace(pattern, glyph);
  return out;
}

function show(text: string): string {
  return escapeHtml(pretty(text));
}

function badge(step: StepView): string {
  if (!step.safe) return '<span class="badge unsafe">unsafe</span>';
  if (step.hidden) return '<span class="badge hidden">hidden</span>';
  return "";
}

function stepRow(step: StepView, cursor: boolean, extra = ""): string {
  const classes = ["row", extra, cursor ? "cursor" : "", step.safe ? "" : "unsafe-row"]
    .filter(Boolean)
    .join(" ");
  const tactic =
    step.tactic === null
      ? ""
      : `<span class="tactic">${show(step.tactic)}</span>`;
  return (
    `<div class="${classes}" style="--level: ${step.level}" data-n="${step.n}">` +
    `<span class="formula">${show(step.formula)}</span>` +
    badge(step) +
    tactic +
    `</div>`
  );
}

/** Rows in payload order; runs of hidden steps fold behind a toggle. */
function calcLines(view: SessionView, revealed: ReadonlySet<number>): string {
  const parts: string[] = [];
  let fold: StepView[] = [];

  const flush = (anchor: number) => {
    if (!fold.length) return;
    if (revealed.has(anchor)) {
      parts.push(
        `<div class="derivation revealed" data-anchor="${anchor}">` +
          fold.map((s) => stepRow(s, false, "hidden-step")).join("") +
          `<button class="reveal" data-reveal="${anchor}">hide derivation</button>` +
          `</div>`,
      );
    } else {
      parts.push(
        `<button class="reveal" data-reveal="${anchor}">` +
          `show derivation (${fold.length} step${fold.length === 1 ? "" : "s"})` +
          `</button>`,
      );
    }
    fold = [];
  };

  const lastVisible = [...view.steps].reverse().find((s) => !s.hidden);
  for (const step of view.steps) {
    if (step.hidden) {
      fold.push(step);
      continue;
    }
    flush(step.n);
    parts.push(stepRow(step, step === lastVisible));
  }
  flush(-1); // trailing hidden run; cannot normally happen but keep it visible
  return parts.join("\n");
}

function header(view: SessionView): string {
  const model = Object.entries(view.model)
    .map(([name, value]) => `${name} = ${show(value)}`)
    .join(", ");
  return (
    `<header class="spec">` +
    `<span class="problem">${escapeHtml(view.problem.join("."))}</span>` +
    `<span class="method">${escapeHtml(view.method.join("."))}</span>` +
    `<span class="model">${model}</span>` +
    `</header>`
  );
}

function noticeBanner(notice: Notice | null): string {
  if (!notice) return "";
  const retry = notice.retryable
    ? '<button class="retry" data-action="retry">retry</button>'
    : "";
  return `<div class="notice ${notice.kind}">${escapeHtml(notice.text)}${retry}</div>`;
}

function inputArea(ui: UiState): string {
  const view = ui.view!;
  if (view.finished) {
    return `<div class="done">finished: ${show(view.current_formula)}</div>`;
  }
  const disabled = ui.pending ? " disabled" : "";
  return (
    `<div class="input-area">` +
    `<input class="term-input" value="${escapeHtml(ui.inputText)}"` +
    ` placeholder="next formula or tactic"${disabled}>` +
    `<button data-action="term"${disabled}>check formula</button>` +
    `<button data-action="tactic"${disabled}>check tactic</button>` +
    `<button data-action="hint"${disabled}>hint</button>` +
    `<button data-action="undo"${disabled}>undo</button>` +
    `<button data-action="auto"${disabled}>finish</button>` +
    `</div>`
  );
}

function sideNotes(view: SessionView, hint: string | null): string {
  const parts: string[] = [];
  if (hint !== null) parts.push(`<div class="hint">${show(hint)}</div>`);
  if (view.assumptions.length) {
    parts.push(
      `<ul class="assumptions">` +
        view.assumptions.map((a) => `<li>${show(a)}</li>`).join("") +
        `</ul>`,
    );
  }
  if (view.warnings.length) {
    parts.push(
      `<ul class="warnings">` +
        view.warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("") +
        `</ul>`,
    );
  }
  return parts.join("\n");
}

export function renderState(ui: UiState): string {
  if (!ui.view) {
    return `<div class="app empty">${noticeBanner(ui.notice)}no session</div>`;
  }
  return (
    `<div class="app">\n` +
    header(ui.view) +
    `\n<div class="calc">\n${calcLines(ui.view, ui.revealed)}\n</div>\n` +
    noticeBanner(ui.notice) +
    sideNotes(ui.view, ui.hint) +
    inputArea(ui) +
    `\n</div>`
  );
}
