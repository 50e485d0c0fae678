// Bootstrap: create or join a session, open the stream, and fan the
// view out to the three role panels. Reloading mid-session rebuilds the
// identical view from GET /sessions/{id} plus the stream.

import { SelaClient, type StreamEvent } from "./api.js";
import { AuditorPanel } from "./auditor.js";
import { BoothPanel } from "./booth.js";
import { PollworkerPanel } from "./pollworker.js";
import { applyEvent, initialView, type ViewState } from "./state.js";

export interface AppHandles {
  booth: BoothPanel;
  pollworker: PollworkerPanel;
  auditor: AuditorPanel;
  view: () => ViewState;
  dispatch: (event: StreamEvent) => void;
  socket: WebSocket | null;
}

export async function mountApp(
  root: HTMLElement,
  client: SelaClient,
  sessionId: string,
  withStream = true,
): Promise<AppHandles> {
  root.innerHTML = `
    <header>
      <span class="session" data-testid="session-id"></span>
      <span class="phase" data-testid="phase"></span>
    </header>
    <main>
      <section id="booth"><h2>booth</h2><div></div></section>
      <section id="pollworker"><h2>poll worker</h2><div></div></section>
      <section id="auditor"><h2>auditor</h2><div></div></section>
    </main>
  `;
  root.querySelector("[data-testid=session-id]")!.textContent = sessionId;
  const phaseCell = root.querySelector<HTMLElement>("[data-testid=phase]")!;

  const booth = new BoothPanel(
    root.querySelector("#booth div")!, client, sessionId);
  const pollworker = new PollworkerPanel(
    root.querySelector("#pollworker div")!, client, sessionId);
  const auditor = new AuditorPanel(
    root.querySelector("#auditor div")!, client, sessionId);

  let view = initialView();
  const render = () => {
    phaseCell.textContent = view.phase;
    booth.update(view);
    pollworker.update(view);
    auditor.update(view);
  };

  const dispatch = (event: StreamEvent) => {
    view = applyEvent(view, event);
    render();
  };

  // seed from the full state, then follow the stream
  const state = await client.getState(sessionId);
  dispatch(state);
  await pollworker.refresh();

  let socket: WebSocket | null = null;
  if (withStream) {
    socket = client.openStream(sessionId, dispatch, () => {
      view = { ...view, connected: false };
      render();
    });
  }

  return { booth, pollworker, auditor, view: () => view, dispatch, socket };
}

// browser entry point; tests mount the app themselves
export async function start(): Promise<void> {
  const root = document.querySelector<HTMLElement>("#app");
  if (!root) return;
  const base = window.location.origin;
  const client = new SelaClient(base);
  const params = new URLSearchParams(window.location.search);

  let sessionId = params.get("session");
  if (!sessionId) {
    const zone = parseInt(params.get("zone") ?? "1", 10);
    const section = parseInt(params.get("section") ?? "1", 10);
    const created = await client.createSession(zone, section);
    sessionId = created.id;
    params.set("session", sessionId);
    history.replaceState(null, "", `?${params}`);
  }
  await mountApp(root, client, sessionId);
}

if (typeof window !== "undefined" && "__SELA_AUTOSTART__" in window) {
  void start();
}
