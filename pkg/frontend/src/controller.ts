/** Session state machine: user actions in, protocol calls out.
 *
 * One mutating request may be in flight at a time; every outcome,
 * including rejections, is whatever the server said, verbatim.
 */

import { ApiClient, ProtocolError, Reply, Transport } from "./protocol.js";
import { initialUi, renderState, UiState } from "./render.js";

export class SessionController {
  readonly client: ApiClient;
  ui: UiState = initialUi();
  private lastAction: (() => Promise<void>) | null = null;

  constructor(transport: Transport) {
    this.client = new ApiClient(transport);
  }

  render(): string {
    return renderState(this.ui);
  }

  setInput(text: string): void {
    this.ui = { ...this.ui, inputText: text };
  }

  toggleReveal(anchor: number): void {
    const revealed = new Set(this.ui.revealed);
    if (revealed.has(anchor)) revealed.delete(anchor);
    else revealed.add(anchor);
    this.ui = { ...this.ui, revealed };
  }

  /** Re-issue the action behind a network-failure banner. */
  retry(): Promise<void> {
    return this.lastAction ? this.lastAction() : Promise.resolve();
  }

  private async guarded(action: () => Promise<void>): Promise<void> {
    if (this.ui.pending) return;
    this.lastAction = action;
    this.ui = { ...this.ui, pending: true, notice: null, hint: null };
    try {
      await action();
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.ui = {
          ...this.ui,
          notice: { kind: "error", text: `${err.kind}: ${err.message}` },
        };
      } else {
        this.ui = {
          ...this.ui,
          notice: {
            kind: "error",
            text: `network failure: ${(err as Error).message}`,
            retryable: true,
          },
        };
      }
    } finally {
      this.ui = { ...this.ui, pending: false };
    }
  }

  start(
    problem: string[],
    method: string[],
    model: Record<string, string>,
  ): Promise<void> {
    return this.guarded(async () => {
      const view = await this.client.startSession(problem, method, model);
      this.ui = { ...initialUi(), view };
    });
  }

  /** Accepted input clears the box; a rejection keeps it for editing. */
  private applyReply(reply: Reply, rejectKinds: string[]): void {
    const kind = reply.result?.kind ?? "";
    if (rejectKinds.includes(kind)) {
      const reason = (reply.result?.message as string | undefined) ?? kind;
      this.ui = { ...this.ui, notice: { kind: "reject", text: reason } };
      return;
    }
    this.ui = {
      ...this.ui,
      view: reply.view ?? this.ui.view,
      inputText: "",
      notice:
        kind === "unsafe"
          ? { kind: "info", text: "accepted, but off the known path" }
          : null,
    };
  }

  submitTerm(): Promise<void> {
    return this.guarded(async () => {
      const reply = await this.client.submitTerm(
        this.ui.view!.id,
        this.ui.inputText,
      );
      this.applyReply(reply, ["not_derivable"]);
    });
  }

  submitTactic(): Promise<void> {
    return this.guarded(async () => {
      const reply = await this.client.submitTactic(
        this.ui.view!.id,
        this.ui.inputText,
      );
      this.applyReply(reply, ["not_locatable"]);
    });
  }

  hint(detail = "full"): Promise<void> {
    return this.guarded(async () => {
      const result = await this.client.hint(this.ui.view!.id, detail);
      const parts = [result.tactic, result.formula].filter(
        (p): p is string => typeof p === "string",
      );
      this.ui = {
        ...this.ui,
        hint: result.kind === "end" ? "nothing left to do" : parts.join("  ↦  "),
      };
    });
  }

  auto(): Promise<void> {
    return this.guarded(async () => {
      const reply = await this.client.auto(this.ui.view!.id);
      this.ui = { ...this.ui, view: reply.view ?? this.ui.view };
    });
  }

  undo(): Promise<void> {
    return this.guarded(async () => {
      const reply = await this.client.undo(this.ui.view!.id);
      this.ui = { ...this.ui, view: reply.view ?? this.ui.view };
    });
  }
}
