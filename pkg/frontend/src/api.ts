/**
 * HTTP client for the derivation service, plus the edit queue that keeps
 * at most one edit in flight per session. Later edits wait their turn
 * client-side; the service applies each one atomically.
 */

import type {
  EditCommand,
  ErrorBody,
  ExportPayload,
  RuleDocPayload,
  RulesPayload,
  SessionState,
} from "./protocol.js";

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;
  readonly span?: ErrorBody["span"];

  constructor(status: number, body: ErrorBody) {
    super(body.message);
    this.code = body.error;
    this.status = status;
    this.span = body.span;
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (res.ok) return (await res.json()) as T;
  let body: ErrorBody;
  try {
    body = (await res.json()) as ErrorBody;
  } catch {
    body = { error: "HttpError", message: `${res.status} ${res.statusText}` };
  }
  throw new ServiceError(res.status, body);
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body ?? {}),
    }).then((r) => unwrap<T>(r));
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchImpl(this.base + path).then((r) => unwrap<T>(r));
  }

  createSession(init: { system: string } | { document: string }): Promise<SessionState> {
    return this.post("/sessions", init);
  }

  getState(session: string): Promise<SessionState> {
    return this.get(`/sessions/${session}/state`);
  }

  edit(session: string, cmd: EditCommand): Promise<SessionState> {
    return this.post(`/sessions/${session}/edits`, cmd);
  }

  undo(session: string): Promise<SessionState> {
    return this.post(`/sessions/${session}/undo`);
  }

  redo(session: string): Promise<SessionState> {
    return this.post(`/sessions/${session}/redo`);
  }

  rules(session: string, query = "", category?: string): Promise<RulesPayload> {
    const params = new URLSearchParams();
    if (query) params.set("query", query);
    if (category) params.set("category", category);
    const qs = params.toString();
    return this.get(`/sessions/${session}/rules${qs ? "?" + qs : ""}`);
  }

  docForRule(session: string, rule: string): Promise<RuleDocPayload> {
    return this.get(`/sessions/${session}/doc?rule=${encodeURIComponent(rule)}`);
  }

  docForNode(session: string, node: string): Promise<RuleDocPayload> {
    return this.get(`/sessions/${session}/doc?node=${encodeURIComponent(node)}`);
  }

  exportDocument(session: string): Promise<ExportPayload> {
    return this.get(`/sessions/${session}/export`);
  }
}

/**
 * Serializes edits: a submitted task starts only after every earlier
 * task has settled. `pending` counts tasks not yet settled, so the UI
 * can show the in-flight indicator and disable conflicting inputs.
 */
export class EditQueue {
  private tail: Promise<unknown> = Promise.resolve();
  private inFlight = 0;

  get pending(): number {
    return this.inFlight;
  }

  submit<T>(task: () => Promise<T>): Promise<T> {
    this.inFlight++;
    const run = this.tail.then(task);
    // keep the chain alive whether the task succeeds or fails
    this.tail = run.catch(() => undefined);
    return run.finally(() => {
      this.inFlight--;
    });
  }
}
