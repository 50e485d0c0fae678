// Poll-worker panel: lifecycle buttons gated by phase, the fingerprint
// pages as pushed by the server, and the annotate-to-ata action.

import type { PollworkerAction, SelaClient } from "./api.js";
import { ApiError } from "./api.js";
import { pollworkerEnabled, type ViewState } from "./state.js";

const ACTIONS: PollworkerAction[] = [
  "init", "zeresima", "section", "open_voter",
  "close_voter", "finalize", "annotate_ata",
];

export class PollworkerPanel {
  private buttons = new Map<PollworkerAction, HTMLButtonElement>();
  private pages: HTMLElement;
  private ata: HTMLElement;
  private notice: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly client: SelaClient,
    private readonly sessionId: string,
  ) {
    root.innerHTML = `
      <div class="actions" data-testid="pollworker-actions"></div>
      <h3>visor pages</h3>
      <div class="pages" data-testid="digest-pages"></div>
      <h3>ata</h3>
      <pre class="ata" data-testid="ata-summary"></pre>
      <div class="notice" data-testid="pollworker-notice"></div>
    `;
    const bar = root.querySelector("[data-testid=pollworker-actions]")!;
    for (const action of ACTIONS) {
      const button = document.createElement("button");
      button.textContent = action.replace("_", " ");
      button.dataset.action = action;
      button.addEventListener("click", () => void this.act(action));
      bar.appendChild(button);
      this.buttons.set(action, button);
    }
    this.pages = root.querySelector("[data-testid=digest-pages]")!;
    this.ata = root.querySelector("[data-testid=ata-summary]")!;
    this.notice = root.querySelector("[data-testid=pollworker-notice]")!;
  }

  private async act(action: PollworkerAction): Promise<void> {
    this.notice.textContent = "";
    try {
      const state = await this.client.pollworker(this.sessionId, action);
      this.renderServerState(state.digest_pages, state.ata_zeresima, state.ata_final);
    } catch (error) {
      this.notice.textContent =
        error instanceof ApiError ? error.detail : String(error);
    }
  }

  // digest pages and ata lines come straight from the service
  async refresh(): Promise<void> {
    const state = await this.client.getState(this.sessionId);
    this.renderServerState(state.digest_pages, state.ata_zeresima, state.ata_final);
  }

  private renderServerState(
    pages: string[],
    zeresima: string | null,
    final: string | null,
  ): void {
    this.pages.textContent = pages.join("  ");
    const lines = [];
    if (zeresima) lines.push(`ZERESIMA=${zeresima}`);
    if (final) lines.push(`FINAL=${final}`);
    this.ata.textContent = lines.join("\n");
  }

  update(view: ViewState): void {
    const enabled = new Set(pollworkerEnabled(view.phase));
    for (const [action, button] of this.buttons) {
      button.disabled = !enabled.has(action);
    }
  }
}
