// Typed client for the querycore session service. The shapes below mirror
// the wire contract exactly; the UI stores and replays them untouched.

export type QueryKind = "item" | "attribute" | "value" | "threshold";
export type AnswerKind = "yes" | "no" | "value" | "not_care";
export type SessionStatus = "active" | "success" | "exhausted" | "failed";

export interface Query {
  kind: QueryKind;
  item?: string;
  attr?: string;
  value?: unknown;
  threshold?: number;
  gain: number | null;
}

export interface AnswerBody {
  kind: AnswerKind;
  value?: unknown;
}

export interface TranscriptEvent {
  turn: number;
  action: Query;
  answer: AnswerBody;
  remaining: number;
  uncertainty: number;
}

export interface Outcome {
  status: SessionStatus;
  k_max: number;
  success_turn: number | null;
  forced: boolean;
  success_item?: string;
  reason?: string;
  recommendation?: string;
}

export interface SessionSnapshot {
  session_id: string;
  catalog_id: string;
  status: SessionStatus;
  turn: number;
  k_max: number;
  policy: string;
  mode: string;
  remaining: number;
  uncertainty: number;
  initial_uncertainty: number;
  first_query?: Query | null;
  pending_query?: Query | null;
  outcome?: Outcome;
  event?: TranscriptEvent;
  events?: TranscriptEvent[];
}

export interface CatalogRow {
  catalog_id: string;
  n_items: number;
  n_attrs: number;
}

export interface AttributeDef {
  name: string;
  kind: "discrete" | "continuous";
  query_style: string;
  values?: (string | number)[];
}

export interface CatalogDetail {
  catalog_id: string;
  attributes: AttributeDef[];
  items: { id: string; values: Record<string, unknown> }[];
}

export interface StartRequest {
  catalog_id: string;
  policy: string;
  mode: string;
  k_max: number;
  scores_id?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class Client {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data: unknown = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      const err = data as { code?: string; message?: string };
      throw new ApiError(resp.status, err.code ?? "error", err.message ?? resp.statusText);
    }
    return data as T;
  }

  healthz(): Promise<{ status: string }> {
    return this.request("GET", "/v1/healthz");
  }

  listCatalogs(): Promise<{ catalogs: CatalogRow[] }> {
    return this.request("GET", "/v1/catalogs");
  }

  getCatalog(catalogId: string): Promise<CatalogDetail> {
    return this.request("GET", `/v1/catalogs/${encodeURIComponent(catalogId)}`);
  }

  openSession(req: StartRequest): Promise<SessionSnapshot> {
    return this.request("POST", "/v1/sessions", req);
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request("GET", `/v1/sessions/${encodeURIComponent(sessionId)}`);
  }

  postAnswer(sessionId: string, answer: AnswerBody): Promise<SessionSnapshot> {
    return this.request("POST", `/v1/sessions/${encodeURIComponent(sessionId)}/answers`, answer);
  }
}
