// Typed client for the classifier service's JSON endpoints. The console
// renders whatever the service sends back; nothing is recomputed here.

export type Outcome = "in_scope" | "out_of_scope";

export interface ShortlistRow {
  intent_id: string;
  score: number;
}

export interface PromptOption {
  position: number;
  letter: string;
  intent_id: string | null;
  label: string;
}

export interface PromptMessage {
  role: string;
  content: string;
}

export interface PromptPayload {
  template_id: string;
  options: PromptOption[];
  rendered: PromptMessage[];
}

export interface VerdictPayload {
  kind: string;
  intent_id: string | null;
  raw: string;
}

export interface TracePayload {
  normalized_text: string;
  gate_rule: string;
  shortlist: ShortlistRow[];
  prompt: PromptPayload | null;
  verdict: VerdictPayload | null;
}

export interface DecisionPayload {
  outcome: Outcome;
  intent_id: string | null;
  confidence: number | null;
  trace?: TracePayload;
}

export interface ChatReply {
  response: string;
  decision_id: number;
}

export interface IntentInfo {
  id: string;
  description: string;
  response?: string;
}

/** Non-2xx answer from the service, carrying its {"error": ...} message. */
export class ServiceError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ServiceError";
    this.status = status;
  }
}

/** What the state flows need from a client; lets tests swap in fakes. */
export interface ServiceApi {
  classify(text: string, thresholdOverride?: number): Promise<DecisionPayload>;
  chat(text: string): Promise<ChatReply>;
  decision(decisionId: number): Promise<DecisionPayload>;
  intents(includeResponses?: boolean): Promise<IntentInfo[]>;
}

export class ServiceClient implements ServiceApi {
  readonly baseUrl: string;

  /** baseUrl "" talks to the page's own origin. No trailing slash. */
  constructor(baseUrl = "") {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  async classify(
    text: string,
    thresholdOverride?: number,
  ): Promise<DecisionPayload> {
    const body: Record<string, unknown> = { text };
    if (thresholdOverride !== undefined) {
      body.threshold_override = thresholdOverride;
    }
    return this.request<DecisionPayload>("/classify", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async chat(text: string): Promise<ChatReply> {
    return this.request<ChatReply>("/chat", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  async decision(decisionId: number): Promise<DecisionPayload> {
    return this.request<DecisionPayload>(`/decisions/${decisionId}`);
  }

  async intents(includeResponses = false): Promise<IntentInfo[]> {
    const path = includeResponses ? "/intents?include_responses=true" : "/intents";
    const body = await this.request<{ intents: IntentInfo[] }>(path);
    return body.intents;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) {
      let message = `HTTP ${res.status}`;
      try {
        const body: unknown = await res.json();
        if (
          typeof body === "object" &&
          body !== null &&
          typeof (body as { error?: unknown }).error === "string"
        ) {
          message = (body as { error: string }).error;
        }
      } catch {
        // non-JSON error body; the status code is all we have
      }
      throw new ServiceError(res.status, message);
    }
    return (await res.json()) as T;
  }
}
