// Voter booth: keypad plus the two displays side by side. Actions go to
// the server and the screen only changes when the stream confirms them.

import type { SelaClient } from "./api.js";
import { ApiError } from "./api.js";
import { isDigestPage, keypadEnabled, matchCue, type ViewState } from "./state.js";

const KEYS = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0"];
const WORDS = ["BRANCO", "NULO", "CORRIGE", "CONFIRMA"];

export class BoothPanel {
  private keypad: HTMLButtonElement[] = [];
  private contestInput: HTMLInputElement;
  private ueCell: HTMLElement;
  private visorCell: HTMLElement;
  private cue: HTMLElement;
  private notice: HTMLElement;
  private cycleButton: HTMLButtonElement;
  private pages: string[] = [];
  private pageIndex = 0;

  constructor(
    root: HTMLElement,
    private readonly client: SelaClient,
    private readonly sessionId: string,
  ) {
    root.innerHTML = `
      <div class="displays">
        <div class="display-block">
          <h3>voting machine</h3>
          <div class="display ue" data-testid="ue-display"></div>
        </div>
        <div class="display-block">
          <h3>audit device visor</h3>
          <div class="display visor" data-testid="sela-visor"></div>
          <button data-testid="cycle-page" hidden>next page</button>
        </div>
      </div>
      <div class="cue" data-testid="match-cue"></div>
      <label>contest
        <input type="number" min="1" max="255" value="1" data-testid="contest">
      </label>
      <div class="keypad" data-testid="keypad"></div>
      <div class="notice" data-testid="booth-notice"></div>
    `;
    this.contestInput = root.querySelector("[data-testid=contest]")!;
    this.ueCell = root.querySelector("[data-testid=ue-display]")!;
    this.visorCell = root.querySelector("[data-testid=sela-visor]")!;
    this.cue = root.querySelector("[data-testid=match-cue]")!;
    this.notice = root.querySelector("[data-testid=booth-notice]")!;
    this.cycleButton = root.querySelector("[data-testid=cycle-page]")!;
    this.cycleButton.addEventListener("click", () => void this.cyclePage());

    const keypad = root.querySelector("[data-testid=keypad]")!;
    for (const key of [...KEYS, ...WORDS]) {
      const button = document.createElement("button");
      button.textContent = key;
      button.dataset.key = key;
      button.addEventListener("click", () => void this.press(key));
      keypad.appendChild(button);
      this.keypad.push(button);
    }
  }

  // steps the visor through the server-provided fingerprint pages;
  // purely a display aid, the pages themselves come from the service
  private async cyclePage(): Promise<void> {
    if (this.pages.length === 0) {
      const state = await this.client.getState(this.sessionId);
      this.pages = state.digest_pages;
      if (this.pages.length === 0) return;
    }
    this.pageIndex = (this.pageIndex + 1) % this.pages.length;
    this.visorCell.textContent = this.pages[this.pageIndex] ?? "";
  }

  private async press(key: string): Promise<void> {
    const contest = parseInt(this.contestInput.value, 10);
    this.notice.textContent = "";
    try {
      await this.client.voterKeys(this.sessionId, contest, key);
      // the stream event updates the displays
    } catch (error) {
      this.notice.textContent =
        error instanceof ApiError ? error.detail : String(error);
    }
  }

  update(view: ViewState): void {
    this.ueCell.textContent = view.ueDisplay;
    this.visorCell.textContent = view.selaVisor;
    const enabled = keypadEnabled(view.phase);
    for (const button of this.keypad) button.disabled = !enabled;

    const digestShown = isDigestPage(view.selaVisor);
    this.cycleButton.hidden = !digestShown;
    if (!digestShown) {
      this.pages = [];
      this.pageIndex = 0;
    }

    const cue = matchCue(view.ueDisplay, view.selaVisor);
    this.cue.textContent =
      cue === "match" ? "displays match" :
      cue === "mismatch" ? "DISPLAYS DIFFER" : "";
    this.cue.className = `cue ${cue ?? ""}`;

    if (!view.connected) this.notice.textContent = "connection lost";
  }
}
