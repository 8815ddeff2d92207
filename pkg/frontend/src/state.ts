// Console state and the two request flows. State is immutable: every
// transition returns a fresh object, so a failed request leaves the caller
// holding the untouched previous state. The transcript only ever grows, and
// probe flows never touch it.

import type { DecisionPayload, Outcome, ServiceApi } from "./api.js";

export interface TranscriptEntry {
  user: string;
  response: string;
  decisionId: number;
  /** Missing when the decision lookup failed after a successful chat call. */
  outcome?: Outcome;
}

export interface ProbeResult {
  text: string;
  value: number;
  decision: DecisionPayload;
}

export interface ConsoleState {
  readonly baseUrl: string;
  readonly transcript: readonly TranscriptEntry[];
  readonly selected: DecisionPayload | null;
  readonly threshold: number;
  readonly probe: ProbeResult | null;
}

export function createConsoleState(baseUrl: string, threshold = 0.4): ConsoleState {
  return {
    baseUrl,
    transcript: [],
    selected: null,
    threshold: clampThreshold(threshold),
    probe: null,
  };
}

export function clampThreshold(value: number): number {
  if (!Number.isFinite(value)) {
    throw new RangeError(`threshold must be a finite number, got ${value}`);
  }
  return Math.min(1, Math.max(0, value));
}

export function setThreshold(state: ConsoleState, value: number): ConsoleState {
  return { ...state, threshold: clampThreshold(value) };
}

export function appendEntry(
  state: ConsoleState,
  entry: TranscriptEntry,
): ConsoleState {
  return { ...state, transcript: [...state.transcript, entry] };
}

export function selectDecision(
  state: ConsoleState,
  decision: DecisionPayload | null,
): ConsoleState {
  return { ...state, selected: decision };
}

export function setProbe(
  state: ConsoleState,
  probe: ProbeResult | null,
): ConsoleState {
  return { ...state, probe };
}

/**
 * Send one chat message: POST /chat, append the exchange, then pull the
 * decision trace by id for the trace pane. A failed chat call throws before
 * anything is appended; a failed trace lookup still keeps the exchange,
 * just without an outcome badge.
 */
export async function sendMessage(
  state: ConsoleState,
  client: ServiceApi,
  text: string,
): Promise<ConsoleState> {
  const reply = await client.chat(text);
  let decision: DecisionPayload | null = null;
  try {
    decision = await client.decision(reply.decision_id);
  } catch {
    decision = null;
  }
  const next = appendEntry(state, {
    user: text,
    response: reply.response,
    decisionId: reply.decision_id,
    outcome: decision?.outcome,
  });
  return selectDecision(next, decision ?? state.selected);
}

/**
 * What-if probe: classify `text` under an overridden threshold without
 * chatting. The transcript is carried over untouched by construction.
 */
export async function probeThreshold(
  state: ConsoleState,
  client: ServiceApi,
  text: string,
  value?: number,
): Promise<ConsoleState> {
  const threshold = clampThreshold(value ?? state.threshold);
  const decision = await client.classify(text, threshold);
  return setProbe(state, { text, value: threshold, decision });
}
