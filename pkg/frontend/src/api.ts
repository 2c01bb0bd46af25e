import type {
  GenerateConfig,
  GenerateResponse,
  HighlightResponse,
  RectJson,
  RestoreResponse,
  SavedEntry,
  SavedRef,
  SelectionJson,
  SessionSummary,
  SynthRequest,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface RunningJob {
  status: "running";
  poll: string;
}

function isRunning(payload: unknown): payload is RunningJob {
  return typeof payload === "object" && payload !== null && (payload as RunningJob).status === "running";
}

/**
 * Typed client for the palette server. Fetch is injectable so tests can
 * replay a recorded fixture; the base URL is configurable for deployment.
 */
export class ApiClient {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
    private readonly pollDelayMs: number = 150,
  ) {}

  private async request(method: string, path: string, body?: string): Promise<unknown> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = body;
      init.headers = { "content-type": "application/json" };
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const payload: unknown = await resp.json();
    if (resp.status === 202) {
      return payload;
    }
    if (!resp.ok) {
      const message =
        typeof payload === "object" && payload !== null && "error" in payload
          ? String((payload as { error: unknown }).error)
          : `request failed with status ${resp.status}`;
      throw new ApiError(resp.status, message);
    }
    return payload;
  }

  /** Upload a dataset body: JSON text, CSV text, or a synth request. */
  async createSession(body: string | { synth: SynthRequest }): Promise<SessionSummary> {
    const text = typeof body === "string" ? body : JSON.stringify(body);
    return (await this.request("POST", "/sessions", text)) as SessionSummary;
  }

  /** Replace the session's dataset; the server drops the pair. */
  async replaceDataset(sessionId: string, body: string | { synth: SynthRequest }): Promise<SessionSummary> {
    const text = typeof body === "string" ? body : JSON.stringify(body);
    return (await this.request("POST", `/sessions/${sessionId}`, text)) as SessionSummary;
  }

  /** Generate a palette pair, following the 202 poll path when offered. */
  async generatePalette(sessionId: string, config: GenerateConfig): Promise<GenerateResponse> {
    let payload = await this.request("POST", `/sessions/${sessionId}/palette`, JSON.stringify(config));
    while (isRunning(payload)) {
      await new Promise((resolve) => setTimeout(resolve, this.pollDelayMs));
      payload = await this.request("GET", payload.poll);
    }
    return payload as GenerateResponse;
  }

  async highlight(sessionId: string, selection: SelectionJson): Promise<HighlightResponse> {
    return (await this.request(
      "POST",
      `/sessions/${sessionId}/highlight`,
      JSON.stringify(selection),
    )) as HighlightResponse;
  }

  async highlightBrush(sessionId: string, rect: RectJson): Promise<HighlightResponse> {
    return (await this.request(
      "POST",
      `/sessions/${sessionId}/highlight`,
      JSON.stringify({ brush: rect }),
    )) as HighlightResponse;
  }

  async saveScheme(sessionId: string, name?: string): Promise<SavedRef> {
    const body = name === undefined ? {} : { name };
    return (await this.request("POST", `/sessions/${sessionId}/saved`, JSON.stringify(body))) as SavedRef;
  }

  async listSaved(sessionId: string): Promise<SavedEntry[]> {
    const payload = (await this.request("GET", `/sessions/${sessionId}/saved`)) as { saved: SavedEntry[] };
    return payload.saved;
  }

  async restoreScheme(sessionId: string, index: number): Promise<RestoreResponse> {
    return (await this.request("POST", `/sessions/${sessionId}/saved/${index}/restore`)) as RestoreResponse;
  }
}
