import { describe, expect, it } from "vitest";

import type { SessionView } from "../src/protocol.js";
import { escapeHtml, initialUi, pretty, renderState, UiState } from "../src/render.js";

import freshStart from "./fixtures/view_fresh_start.json";
import safeStep from "./fixtures/view_safe_step.json";
import hiddenSub from "./fixtures/view_hidden_subproblem.json";
import finished from "./fixtures/view_finished.json";
import unsafeStep from "./fixtures/view_unsafe_step.json";

const FIXTURES: Record<string, SessionView> = {
  fresh_start: freshStart as SessionView,
  safe_step: safeStep as SessionView,
  hidden_subproblem: hiddenSub as SessionView,
  finished: finished as SessionView,
  unsafe_step: unsafeStep as SessionView,
};

function uiFor(view: SessionView, extra: Partial<UiState> = {}): UiState {
  return { ...initialUi(), view, ...extra };
}

describe("renderState snapshots", () => {
  for (const [name, view] of Object.entries(FIXTURES)) {
    it(`renders ${name} stably`, () => {
      expect(renderState(uiFor(view))).toMatchSnapshot();
    });
  }

  it("is a pure function of the payload", () => {
    const view = FIXTURES.hidden_subproblem;
    expect(renderState(uiFor(view))).toBe(renderState(uiFor(view)));
  });
});

describe("calculation layout", () => {
  it("shows only the header, start line, and input box at the beginning", () => {
    const html = renderState(uiFor(FIXTURES.fresh_start));
    expect(html).toContain('<header class="spec">');
    expect(html).toContain('class="term-input"');
    expect(html.match(/class="row/g)).toHaveLength(1);
    expect(html).not.toContain('<span class="tactic">');
  });

  it("indents by nesting level and right-aligns tactics", () => {
    const html = renderState(uiFor(FIXTURES.hidden_subproblem));
    expect(html).toContain('style="--level: 0"');
    expect(html).toContain('style="--level: 1"');
    expect(html).toContain('<span class="tactic">');
  });

  it("puts the cursor on the last visible line", () => {
    const html = renderState(uiFor(FIXTURES.safe_step));
    const cursorRows = html.split("\n").filter((l) => l.includes("cursor"));
    expect(cursorRows).toHaveLength(1);
    expect(cursorRows[0]).toContain("<span class=\"formula\">4</span>");
  });

  it("collapses hidden steps until revealed", () => {
    const view = FIXTURES.hidden_subproblem;
    const folded = renderState(uiFor(view));
    expect(folded).toContain("show derivation (1 step)");
    expect(folded).not.toContain('data-n="4"'); // the hidden row itself

    const anchor = view.steps.find((s) => s.hidden)!;
    const after = view.steps.find((s) => s.n > anchor.n && !s.hidden)!;
    const open = renderState(uiFor(view, { revealed: new Set([after.n]) }));
    expect(open).toContain("hide derivation");
    expect(open).toContain(`data-n="${anchor.n}"`);
  });

  it("marks unsafe steps", () => {
    const html = renderState(uiFor(FIXTURES.unsafe_step));
    expect(html).toContain('<span class="badge unsafe">unsafe</span>');
    expect(html).toContain("unsafe-row");
  });

  it("replaces the input box with the result when finished", () => {
    const html = renderState(uiFor(FIXTURES.finished));
    expect(html).toContain('<div class="done">finished: gcd = 4</div>');
    expect(html).not.toContain("term-input");
  });

  it("disables controls while a request is in flight", () => {
    const html = renderState(uiFor(FIXTURES.safe_step, { pending: true }));
    expect(html).toContain('<button data-action="term" disabled>');
  });

  it("keeps the typed text in the input box", () => {
    const html = renderState(uiFor(FIXTURES.safe_step, { inputText: "8 mod 4" }));
    expect(html).toContain('value="8 mod 4"');
  });
});

describe("text handling", () => {
  it("escapes markup in formulas", () => {
    expect(escapeHtml("<b> & \"x\"")).toBe("&lt;b&gt; &amp; &quot;x&quot;");
  });

  it("prettifies operators for display only", () => {
    expect(pretty("x != 0")).toBe("x ≠ 0");
    expect(pretty("a >= b")).toBe("a ≥ b");
    expect(pretty("x = sqrt 2")).toBe("x = √2");
    expect(pretty("2 * x")).toBe("2 ⋅ x");
  });

  it("renders rejection notices verbatim", () => {
    const ui = uiFor(FIXTURES.safe_step, {
      notice: { kind: "reject", text: "no derivation reaches the input" },
    });
    expect(renderState(ui)).toContain(
      '<div class="notice reject">no derivation reaches the input</div>',
    );
  });

  it("offers a retry button on network failures", () => {
    const ui = uiFor(FIXTURES.safe_step, {
      notice: { kind: "error", text: "network failure: boom", retryable: true },
    });
    expect(renderState(ui)).toContain('data-action="retry"');
  });
});
