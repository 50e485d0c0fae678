// Auditor panel: posts the session's artifacts to /audit and lists the
// findings with a verdict badge.

import type { SelaClient } from "./api.js";
import { ApiError } from "./api.js";
import type { ViewState } from "./state.js";

export class AuditorPanel {
  private sealBox: HTMLInputElement;
  private badge: HTMLElement;
  private findings: HTMLElement;
  private notice: HTMLElement;
  private runButton: HTMLButtonElement;

  constructor(
    root: HTMLElement,
    private readonly client: SelaClient,
    private readonly sessionId: string,
  ) {
    root.innerHTML = `
      <label><input type="checkbox" checked data-testid="seal-intact">
        seals intact</label>
      <button data-testid="run-audit">run audit</button>
      <div class="badge" data-testid="verdict-badge"></div>
      <ul class="findings" data-testid="findings"></ul>
      <div class="notice" data-testid="auditor-notice"></div>
    `;
    this.sealBox = root.querySelector("[data-testid=seal-intact]")!;
    this.badge = root.querySelector("[data-testid=verdict-badge]")!;
    this.findings = root.querySelector("[data-testid=findings]")!;
    this.notice = root.querySelector("[data-testid=auditor-notice]")!;
    this.runButton = root.querySelector("[data-testid=run-audit]")!;
    this.runButton.addEventListener("click", () => void this.run());
  }

  private async run(): Promise<void> {
    this.notice.textContent = "";
    try {
      const report = await this.client.audit({
        session_id: this.sessionId,
        seal_intact: this.sealBox.checked,
      });
      this.badge.textContent = report.overall;
      this.badge.className = `badge ${report.overall === "OK" ? "ok" : "bad"}`;
      this.findings.innerHTML = "";
      for (const finding of report.findings) {
        const item = document.createElement("li");
        item.dataset.check = finding.check;
        item.dataset.verdict = finding.verdict;
        item.textContent = `[${finding.verdict}] ${finding.check}: ${finding.detail}`;
        this.findings.appendChild(item);
      }
    } catch (error) {
      this.notice.textContent =
        error instanceof ApiError ? error.detail : String(error);
    }
  }

  update(view: ViewState): void {
    // auditing only makes sense once the device is sealed in audit mode,
    // but the button stays clickable so a failed precondition is shown
    // as the service's own error message
    this.runButton.classList.toggle(
      "suggested", view.phase === "FINALIZED_AUDIT",
    );
  }
}
