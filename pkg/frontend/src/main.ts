/** Browser bootstrap: wires the controller to a root element. */

import { SessionController } from "./controller.js";
import { fetchTransport } from "./protocol.js";

const DEFAULTS = {
  problem: ["diophantine", "gcd"],
  method: ["diophantine", "gcd", "euclid"],
  model: { a: "12", b: "8" },
};

export function mount(root: HTMLElement, baseUrl = ""): SessionController {
  const controller = new SessionController(fetchTransport(baseUrl));

  const redraw = () => {
    root.innerHTML = controller.render();
    const input = root.querySelector<HTMLInputElement>(".term-input");
    input?.addEventListener("input", () => controller.setInput(input.value));
    input?.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") act(() => controller.submitTerm());
    });
  };

  const act = (run: () => Promise<void>) => {
    redraw(); // show the disabled state while the request is out
    void run().then(redraw);
  };

  root.addEventListener("click", (ev) => {
    const el = ev.target as HTMLElement;
    const reveal = el.dataset.reveal;
    if (reveal !== undefined) {
      controller.toggleReveal(Number(reveal));
      redraw();
      return;
    }
    switch (el.dataset.action) {
      case "term":
        return act(() => controller.submitTerm());
      case "tactic":
        return act(() => controller.submitTactic());
      case "hint":
        return act(() => controller.hint());
      case "undo":
        return act(() => controller.undo());
      case "auto":
        return act(() => controller.auto());
      case "retry":
        return act(() => controller.retry());
    }
  });

  void controller
    .start(DEFAULTS.problem, DEFAULTS.method, DEFAULTS.model)
    .then(redraw);
  return controller;
}
