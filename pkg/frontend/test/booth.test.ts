// DOM-level booth tests against a scripted fake of the service client.
// The fake replays canned stream payloads (fixtures, not computations),
// so the panel is exercised exactly as the real stream would drive it.

// @vitest-environment jsdom

import { beforeEach, describe, expect, it, vi } from "vitest";

import type { SelaClient, StreamEvent } from "../src/api.js";
import { BoothPanel } from "../src/booth.js";
import { applyEvent, initialView, type ViewState } from "../src/state.js";

function event(partial: Partial<StreamEvent>, seq: number): StreamEvent {
  return {
    seq,
    phase: "VOTER_OPEN",
    ue_display: "",
    sela_visor: "",
    last_response: "ACK",
    ...partial,
  };
}

describe("BoothPanel", () => {
  let root: HTMLElement;
  let view: ViewState;
  let panel: BoothPanel;
  let sent: Array<{ contest: number; keys: string }>;
  let client: Pick<SelaClient, "voterKeys">;

  const dispatch = (e: StreamEvent) => {
    view = applyEvent(view, e);
    panel.update(view);
  };

  beforeEach(() => {
    document.body.innerHTML = '<div id="booth"></div>';
    root = document.getElementById("booth")!;
    sent = [];
    let seq = 0;
    client = {
      voterKeys: vi.fn(async (_id: string, contest: number, keys: string) => {
        sent.push({ contest, keys });
        // canned visor fixtures for the keys this suite presses
        const visors: Record<string, [string, string]> = {
          "1": ["00001", "1"],
          "3": ["00013", "13"],
          CORRIGE: ["", ""],
          CONFIRMA: ["", ""],
          BRANCO: ["BBBBB", "BRANCO"],
        };
        const [visor, ue] = visors[keys] ?? ["", ""];
        dispatch(event({ sela_visor: visor, ue_display: ue }, ++seq));
        return undefined as never;
      }),
    };
    view = initialView();
    panel = new BoothPanel(root, client as SelaClient, "sid");
    dispatch(event({ phase: "VOTER_OPEN" }, 0));
  });

  const press = async (key: string) => {
    root.querySelector<HTMLButtonElement>(`[data-key="${key}"]`)!.click();
    await vi.waitFor(() => {
      expect(client.voterKeys).toHaveBeenCalled();
    });
    await Promise.resolve();
  };

  it("dispatches keys with the selected contest", async () => {
    await press("1");
    await press("3");
    expect(sent).toEqual([
      { contest: 1, keys: "1" },
      { contest: 1, keys: "3" },
    ]);
    expect(root.querySelector("[data-testid=sela-visor]")!.textContent)
      .toBe("00013");
    expect(root.querySelector("[data-testid=ue-display]")!.textContent)
      .toBe("13");
  });

  it("shows the match cue when both displays agree", async () => {
    await press("1");
    await press("3");
    const cue = root.querySelector("[data-testid=match-cue]")!;
    expect(cue.textContent).toBe("displays match");
    expect(cue.className).toContain("match");
  });

  it("clears both displays after a correction", async () => {
    await press("1");
    await press("CORRIGE");
    expect(root.querySelector("[data-testid=sela-visor]")!.textContent).toBe("");
    expect(root.querySelector("[data-testid=match-cue]")!.textContent).toBe("");
  });

  it("disables the keypad outside the voting phase", () => {
    dispatch(event({ phase: "FINALIZED_AUDIT", sela_visor: "1:ab12" }, 99));
    const buttons = root.querySelectorAll<HTMLButtonElement>(".keypad button");
    expect([...buttons].every((b) => b.disabled)).toBe(true);
  });

  it("shows no cue for digest pages", () => {
    dispatch(event(
      { phase: "FINALIZED_AUDIT", sela_visor: "1:ab12", ue_display: "" }, 99,
    ));
    expect(root.querySelector("[data-testid=match-cue]")!.textContent).toBe("");
  });

  it("surfaces device refusals without changing the displays", async () => {
    const { ApiError } = await import("../src/api.js");
    (client.voterKeys as ReturnType<typeof vi.fn>).mockRejectedValueOnce(
      new ApiError(409, "ERR_NO_PENDING"),
    );
    root.querySelector<HTMLButtonElement>('[data-key="CORRIGE"]')!.click();
    await vi.waitFor(() => {
      expect(
        root.querySelector("[data-testid=booth-notice]")!.textContent,
      ).toBe("ERR_NO_PENDING");
    });
  });

  it("cycles the fingerprint pages the server provides", async () => {
    const pages = [
      "1:ab00", "2:ab01", "3:ab02", "4:ab03", "5:ab04",
      "6:ab05", "7:ab06", "8:ab07", "9:ab08", "10:ab09",
    ];
    (client as { getState?: unknown }).getState = vi.fn(async () => ({
      digest_pages: pages,
    }));
    const cycle = root.querySelector<HTMLButtonElement>(
      "[data-testid=cycle-page]",
    )!;
    expect(cycle.hidden).toBe(true);

    dispatch(event({ phase: "FINALIZED_AUDIT", sela_visor: "1:ab00" }, 50));
    expect(cycle.hidden).toBe(false);

    const visor = root.querySelector("[data-testid=sela-visor]")!;
    cycle.click();
    await vi.waitFor(() => expect(visor.textContent).toBe("2:ab01"));
    cycle.click();
    await vi.waitFor(() => expect(visor.textContent).toBe("3:ab02"));
  });
});
