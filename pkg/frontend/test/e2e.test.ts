// Scripted browser-style session against the live service: two voters,
// one correction, finalize, audit. Runs only when SELA_API_URL points at
// a running server (run_e2e.sh arranges that); the artifacts the session
// produces must be byte-identical to the CLI run in SELA_EXPECTED_DIR.

// @vitest-environment jsdom

import { readFileSync } from "node:fs";
import { join } from "node:path";

import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SelaClient } from "../src/api.js";
import { mountApp, type AppHandles } from "../src/app.js";

const API = process.env.SELA_API_URL;
const EXPECTED = process.env.SELA_EXPECTED_DIR;

const suite = API && EXPECTED ? describe : describe.skip;

function waitFor(
  predicate: () => boolean, what: string, timeoutMs = 5000,
): Promise<void> {
  const started = Date.now();
  return new Promise((resolve, reject) => {
    const poll = () => {
      if (predicate()) return resolve();
      if (Date.now() - started > timeoutMs) {
        return reject(new Error(`timed out waiting for ${what}`));
      }
      setTimeout(poll, 10);
    };
    poll();
  });
}

suite("booth UI end to end", () => {
  let client: SelaClient;
  let app: AppHandles;
  let sessionId: string;
  let root: HTMLElement;

  const q = <T extends HTMLElement>(selector: string): T => {
    const node = root.querySelector<T>(selector);
    if (!node) throw new Error(`missing ${selector}`);
    return node;
  };

  const textOf = (testId: string) =>
    q(`[data-testid=${testId}]`).textContent ?? "";

  async function clickWhenEnabled(selector: string): Promise<void> {
    const button = q<HTMLButtonElement>(selector);
    await waitFor(() => !button.disabled, `${selector} enabled`);
    const before = app.view().seq;
    button.click();
    await waitFor(() => app.view().seq > before, `event after ${selector}`);
  }

  const pollworker = (action: string) =>
    clickWhenEnabled(`[data-action=${action}]`);
  const key = (k: string) => clickWhenEnabled(`[data-key="${k}"]`);

  beforeAll(async () => {
    // jsdom has no fetch/WebSocket of its own; use the real ones
    if (typeof globalThis.fetch !== "function") {
      throw new Error("node fetch not available");
    }
    (globalThis as Record<string, unknown>).WebSocket = WebSocket;

    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
    client = new SelaClient(API!);
    const created = await client.createSession(7, 9);
    sessionId = created.id;
    app = await mountApp(root, client, sessionId);
    await waitFor(() => app.view().connected, "stream connect");
  });

  afterAll(() => {
    app?.socket?.close();
  });

  it("runs the full election day through the three panels", async () => {
    await pollworker("init");
    expect(app.view().phase).toBe("READY");

    await pollworker("zeresima");
    expect(app.view().selaVisor).toMatch(/^1:[0-9a-f]{4}$/);
    // the ten fingerprint pages come from the server
    await waitFor(
      () => textOf("digest-pages").split(/\s+/).filter(Boolean).length === 10,
      "digest pages rendered",
    );
    await pollworker("annotate_ata");
    expect(textOf("ata-summary")).toContain("ZERESIMA=");

    await pollworker("section");
    await pollworker("open_voter");

    // first voter mistypes 42, corrects, votes 13, then blanks contest 2
    await key("4");
    await key("2");
    expect(app.view().selaVisor).toBe("00042");
    expect(textOf("match-cue")).toBe("displays match");

    await key("CORRIGE");
    expect(textOf("match-cue")).toBe("");

    await key("1");
    await key("3");
    expect(app.view().selaVisor).toBe("00013");
    expect(app.view().ueDisplay).toBe("13");
    expect(textOf("match-cue")).toBe("displays match");
    await key("CONFIRMA");

    q<HTMLInputElement>("[data-testid=contest]").value = "2";
    await key("BRANCO");
    expect(app.view().selaVisor).toBe("BBBBB");
    expect(textOf("match-cue")).toBe("displays match");
    await key("CONFIRMA");

    await pollworker("close_voter");

    // second voter votes 13 in contest 1
    await pollworker("open_voter");
    q<HTMLInputElement>("[data-testid=contest]").value = "1";
    await key("1");
    await key("3");
    await key("CONFIRMA");
    await pollworker("close_voter");

    // finalize: keypad locks, the final fingerprint pages show up
    await pollworker("finalize");
    expect(app.view().phase).toBe("FINALIZED_AUDIT");
    expect(app.view().selaVisor).toMatch(/^1:[0-9a-f]{4}$/);
    const keypadButtons = root.querySelectorAll<HTMLButtonElement>(".keypad button");
    expect([...keypadButtons].every((b) => b.disabled)).toBe(true);
    await waitFor(
      () => textOf("digest-pages").split(/\s+/).filter(Boolean).length === 10,
      "final digest pages",
    );

    // the booth visor can step through the fingerprint pages
    const firstPage = app.view().selaVisor;
    const cycle = q<HTMLButtonElement>("[data-testid=cycle-page]");
    expect(cycle.hidden).toBe(false);
    cycle.click();
    await waitFor(
      () => textOf("sela-visor").startsWith("2:"), "second visor page",
    );
    expect(textOf("sela-visor")).not.toBe(firstPage);

    await pollworker("annotate_ata");
    expect(textOf("ata-summary")).toContain("FINAL=");

    // auditor panel: run the audit, expect a clean verdict
    q<HTMLButtonElement>("[data-testid=run-audit]").click();
    await waitFor(() => textOf("verdict-badge") !== "", "audit verdict");
    expect(textOf("verdict-badge")).toBe("OK");
    const findings = root.querySelectorAll("[data-testid=findings] li");
    expect(findings.length).toBe(5);
    expect(
      [...findings].every((f) => (f as HTMLElement).dataset.verdict === "pass"),
    ).toBe(true);
  }, 30_000);

  it("produced artifacts identical to the CLI-script run", async () => {
    const artifacts = await client.artifacts(sessionId);
    const expected = (name: string) =>
      readFileSync(join(EXPECTED!, name), "utf-8");

    expect(artifacts.bu).toBe(expected("e2e.bu"));
    expect(artifacts.ata).toBe(expected("e2e.ata"));
    const exportBytes = Buffer.from(artifacts.export_hex!, "hex");
    expect(exportBytes.equals(readFileSync(join(EXPECTED!, "e2e.selamem"))))
      .toBe(true);
  });

  it("reconstructs the same view after a reload", async () => {
    const fresh = document.createElement("div");
    document.body.appendChild(fresh);
    const again = await mountApp(fresh, client, sessionId, false);
    expect(again.view().phase).toBe("FINALIZED_AUDIT");
    expect(again.view().selaVisor).toBe(app.view().selaVisor);
    const pages = fresh.querySelector("[data-testid=digest-pages]")!;
    expect((pages.textContent ?? "").split(/\s+/).filter(Boolean).length)
      .toBe(10);
  });
});
