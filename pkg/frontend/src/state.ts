// Pure view logic: stream reducer, display normalization, phase gating.
// The UI never computes a count or a fingerprint; it only renders what
// the service pushed.

import type { PollworkerAction, StreamEvent } from "./api.js";

export interface ViewState {
  seq: number;
  phase: string;
  ueDisplay: string;
  selaVisor: string;
  lastResponse: string;
  connected: boolean;
}

export function initialView(): ViewState {
  return {
    seq: -1,
    phase: "POWERED",
    ueDisplay: "",
    selaVisor: "",
    lastResponse: "",
    connected: false,
  };
}

// Applies a server push; stale or duplicate events (seq not advancing)
// are ignored so a reconnect snapshot can never rewind the view.
export function applyEvent(view: ViewState, event: StreamEvent): ViewState {
  if (event.seq < view.seq) return view;
  return {
    seq: event.seq,
    phase: event.phase,
    ueDisplay: event.ue_display,
    selaVisor: event.sela_visor,
    lastResponse: event.last_response,
    connected: true,
  };
}

// "00013" and "13" name the same candidate; BBBBB/NNNNN are the visor
// spellings of BRANCO/NULO. Returns null for anything non-comparable
// (blank, or a digest page like "1:da39").
export function normalizeDisplay(text: string): string | null {
  if (!text) return null;
  if (/^B{5}$/.test(text) || text === "BRANCO") return "BRANCO";
  if (/^N{5}$/.test(text) || text === "NULO") return "NULO";
  if (/^\d+$/.test(text)) return String(parseInt(text, 10));
  return null;
}

export type MatchCue = "match" | "mismatch" | null;

// The voter's check: both displays must name the same vote. No cue is
// shown unless both sides are comparable.
export function matchCue(ueDisplay: string, selaVisor: string): MatchCue {
  const ue = normalizeDisplay(ueDisplay);
  const visor = normalizeDisplay(selaVisor);
  if (ue === null || visor === null) return null;
  return ue === visor ? "match" : "mismatch";
}

const GATING: Record<string, PollworkerAction[]> = {
  POWERED: ["init"],
  READY: ["zeresima"],
  ZERESIMA_SHOWN: ["annotate_ata", "section"],
  SESSION_OPEN: ["open_voter", "finalize"],
  VOTER_OPEN: ["close_voter"],
  FINALIZED_AUDIT: ["annotate_ata"],
};

export function pollworkerEnabled(phase: string): PollworkerAction[] {
  return GATING[phase] ?? [];
}

export function keypadEnabled(phase: string): boolean {
  return phase === "VOTER_OPEN";
}

export function isDigestPage(visor: string): boolean {
  return /^\d+:[0-9a-f]{4}$/.test(visor);
}
