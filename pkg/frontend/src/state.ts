// Pure view-state logic. The app renders only confirmed server responses:
// every transition here takes the snapshot returned by the service, so the
// chat log is a faithful record of what actually happened server-side.

import type {
  AnswerBody,
  AnswerKind,
  CatalogDetail,
  CatalogRow,
  Outcome,
  Query,
  SessionSnapshot,
  TranscriptEvent,
} from "./api.js";

export interface Message {
  role: "agent" | "user" | "notice";
  text: string;
}

export interface ChatViewState {
  sessionId: string;
  catalogId: string;
  kMax: number;
  status: string;
  turn: number;
  messages: Message[];
  pending: Query | null;
  remaining: number;
  uncertainty: number;
  initialUncertainty: number;
  outcome: Outcome | null;
  // one entry per confirmed exchange, built from what the UI displayed
  observed: TranscriptEvent[];
}

export interface AppState {
  phase: "setup" | "chat";
  catalogs: CatalogRow[];
  detail: CatalogDetail | null;
  view: ChatViewState | null;
  banner: string | null;
  setupError: string | null;
  busy: boolean;
}

export function initialAppState(): AppState {
  return {
    phase: "setup",
    catalogs: [],
    detail: null,
    view: null,
    banner: null,
    setupError: null,
    busy: false,
  };
}

export function describeQuery(q: Query): string {
  switch (q.kind) {
    case "item":
      return `Do you want ${q.item}?`;
    case "attribute":
      return `Which ${q.attr} do you want?`;
    case "value":
      return `Do you want ${q.attr} = ${q.value}?`;
    case "threshold":
      return `Do you want ${q.attr} >= ${q.threshold}?`;
  }
}

export function describeAnswer(a: AnswerBody): string {
  switch (a.kind) {
    case "yes":
      return "Yes";
    case "no":
      return "No";
    case "not_care":
      return "Not care";
    case "value":
      return String(a.value);
  }
}

// Mirrors the server's admissibility table: exactly these answer kinds get
// a clickable control, anything else would be refused with a 409.
export function answerKindsFor(q: Query): AnswerKind[] {
  if (q.kind === "item") {
    return ["yes", "no"];
  }
  if (q.kind === "attribute") {
    return ["value", "not_care"];
  }
  return ["yes", "no", "not_care"];
}

export function gaugePercent(state: ChatViewState): number {
  if (state.initialUncertainty <= 0) {
    return 0;
  }
  const pct = (state.uncertainty / state.initialUncertainty) * 100;
  return Math.max(0, Math.min(100, pct));
}

export function terminalText(outcome: Outcome): string {
  if (outcome.status === "success") {
    return `Recommended: ${outcome.success_item} (turn ${outcome.success_turn})`;
  }
  if (outcome.status === "exhausted") {
    return outcome.recommendation
      ? `Out of turns. Best remaining guess: ${outcome.recommendation}`
      : "Out of turns.";
  }
  return "No catalog item matches your answers.";
}

export function startView(snap: SessionSnapshot): ChatViewState {
  const first = snap.first_query ?? snap.pending_query ?? null;
  const messages: Message[] = [];
  if (first) {
    messages.push({ role: "agent", text: describeQuery(first) });
  }
  return {
    sessionId: snap.session_id,
    catalogId: snap.catalog_id,
    kMax: snap.k_max,
    status: snap.status,
    turn: snap.turn,
    messages,
    pending: first,
    remaining: snap.remaining,
    uncertainty: snap.uncertainty,
    initialUncertainty: snap.initial_uncertainty,
    outcome: snap.outcome ?? null,
    observed: [],
  };
}

// Record one confirmed exchange: the query the UI had on screen, the answer
// that was clicked, and the counts the service reported back. Append the
// next agent bubble if the session is still live.
export function applyAnswer(
  state: ChatViewState,
  answer: AnswerBody,
  snap: SessionSnapshot,
): ChatViewState {
  const asked = state.pending;
  if (!asked) {
    return state;
  }
  const wire: AnswerBody =
    answer.kind === "value" ? { kind: "value", value: answer.value } : { kind: answer.kind };
  const observed = state.observed.concat({
    turn: state.observed.length + 1,
    action: asked,
    answer: wire,
    remaining: snap.remaining,
    uncertainty: snap.uncertainty,
  });
  const messages = state.messages.concat({ role: "user", text: describeAnswer(answer) });
  const pending = snap.pending_query ?? null;
  if (pending) {
    messages.push({ role: "agent", text: describeQuery(pending) });
  }
  return {
    ...state,
    status: snap.status,
    turn: snap.turn,
    messages,
    pending,
    remaining: snap.remaining,
    uncertainty: snap.uncertainty,
    outcome: snap.outcome ?? null,
    observed,
  };
}
