/** Wire types and client for the calculation session protocol. */

export type StepSource = "start" | "engine" | "user" | "end";

export interface StepView {
  n: number;
  level: number;
  formula: string;
  tactic: string | null;
  source: StepSource;
  safe: boolean;
  hidden: boolean;
  assumptions: string[];
}

export interface SessionView {
  id: string;
  problem: string[];
  method: string[];
  model: Record<string, string>;
  steps: StepView[];
  finished: boolean;
  level: number;
  current_formula: string;
  assumptions: string[];
  warnings: string[];
  state_hash: string;
}

/** Outcome of a term/tactic/hint/auto/undo call; `kind` discriminates. */
export interface ResultPayload {
  kind: string;
  [extra: string]: unknown;
}

export interface Reply {
  result?: ResultPayload;
  view?: SessionView;
}

export interface HttpRequest {
  method: "GET" | "POST";
  path: string;
  body?: unknown;
}

export interface HttpResponse {
  status: number;
  body: unknown;
}

/** The single seam between the client and the network (stubbed in tests). */
export type Transport = (req: HttpRequest) => Promise<HttpResponse>;

export class ProtocolError extends Error {
  constructor(
    readonly kind: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

interface ErrorDetail {
  detail?: { kind?: string; message?: string };
}

function raiseFor(res: HttpResponse): never {
  const detail = (res.body as ErrorDetail | null)?.detail;
  throw new ProtocolError(
    detail?.kind ?? "http_error",
    detail?.message ?? `request failed with status ${res.status}`,
    res.status,
  );
}

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  private async call(req: HttpRequest): Promise<unknown> {
    const res = await this.transport(req);
    if (res.status >= 400) raiseFor(res);
    return res.body;
  }

  async startSession(
    problem: string[],
    method: string[],
    model: Record<string, string>,
  ): Promise<SessionView> {
    const body = (await this.call({
      method: "POST",
      path: "/session",
      body: { problem, method, model },
    })) as Reply;
    return body.view!;
  }

  async state(id: string): Promise<SessionView> {
    const body = (await this.call({
      method: "GET",
      path: `/session/${id}`,
    })) as Reply;
    return body.view!;
  }

  submitTerm(id: string, formula: string): Promise<Reply> {
    return this.call({
      method: "POST",
      path: `/session/${id}/term`,
      body: { formula },
    }) as Promise<Reply>;
  }

  submitTactic(id: string, tactic: string): Promise<Reply> {
    return this.call({
      method: "POST",
      path: `/session/${id}/tactic`,
      body: { tactic },
    }) as Promise<Reply>;
  }

  async hint(id: string, detail = "full"): Promise<ResultPayload> {
    const body = (await this.call({
      method: "GET",
      path: `/session/${id}/hint?detail=${detail}`,
    })) as Reply;
    return body.result!;
  }

  auto(id: string, steps?: number): Promise<Reply> {
    return this.call({
      method: "POST",
      path: `/session/${id}/auto`,
      body: steps === undefined ? {} : { steps },
    }) as Promise<Reply>;
  }

  undo(id: string): Promise<Reply> {
    return this.call({
      method: "POST",
      path: `/session/${id}/undo`,
    }) as Promise<Reply>;
  }
}

/** Browser transport over fetch; test code substitutes its own. */
export function fetchTransport(baseUrl: string): Transport {
  return async (req) => {
    const res = await fetch(baseUrl + req.path, {
      method: req.method,
      headers: req.body === undefined ? {} : { "Content-Type": "application/json" },
      body: req.body === undefined ? undefined : JSON.stringify(req.body),
    });
    return { status: res.status, body: await res.json() };
  };
}
