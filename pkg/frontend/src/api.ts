// Typed client for the session service. Every value shown in the UI
// comes from these responses; nothing is computed client side.

export interface StreamEvent {
  seq: number;
  phase: string;
  ue_display: string;
  sela_visor: string;
  last_response: string;
}

export interface SessionState extends StreamEvent {
  id: string;
  zone: number;
  section: number;
  pending_contest: number | null;
  digest_pages: string[];
  published_zero: string;
  published_crc: string;
  ata_zeresima: string | null;
  ata_final: string | null;
  artifacts_ready: boolean;
}

export interface Artifacts {
  bu: string | null;
  ata: string | null;
  export_hex: string | null;
  code_hex: string | null;
  transcript: string;
}

export interface AuditFinding {
  check: string;
  verdict: "pass" | "fail" | "skipped";
  detail: string;
}

export interface AuditReport {
  overall: string;
  exit_code: number;
  findings: AuditFinding[];
}

export type PollworkerAction =
  | "init"
  | "zeresima"
  | "section"
  | "open_voter"
  | "close_voter"
  | "finalize"
  | "annotate_ata";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
  } catch {
    // keep the status text
  }
  return new ApiError(response.status, detail);
}

export class SelaClient {
  constructor(private readonly base: string) {}

  private async request<T>(path: string, method: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  createSession(zone: number, section: number, codeHex?: string): Promise<SessionState> {
    return this.request("/sessions", "POST", {
      zone,
      section,
      ...(codeHex ? { code_hex: codeHex } : {}),
    });
  }

  getState(id: string): Promise<SessionState> {
    return this.request(`/sessions/${id}`, "GET");
  }

  pollworker(id: string, action: PollworkerAction): Promise<SessionState> {
    return this.request(`/sessions/${id}/pollworker`, "POST", { action });
  }

  voterKeys(id: string, contest: number, keys: string): Promise<SessionState> {
    return this.request(`/sessions/${id}/voter`, "POST", { contest, keys });
  }

  artifacts(id: string): Promise<Artifacts> {
    return this.request(`/sessions/${id}/artifacts`, "GET");
  }

  audit(body: Record<string, unknown>): Promise<AuditReport> {
    return this.request("/audit", "POST", body);
  }

  streamUrl(id: string): string {
    return this.base.replace(/^http/, "ws") + `/sessions/${id}/stream`;
  }

  openStream(
    id: string,
    onEvent: (event: StreamEvent) => void,
    onClose?: () => void,
  ): WebSocket {
    const socket = new WebSocket(this.streamUrl(id));
    socket.onmessage = (message: MessageEvent) => {
      try {
        onEvent(JSON.parse(String(message.data)) as StreamEvent);
      } catch {
        // a malformed push is dropped; the next event resyncs the view
      }
    };
    if (onClose) socket.onclose = () => onClose();
    return socket;
  }
}
