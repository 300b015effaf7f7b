/** Typed client for the coding service. All server interaction goes through
 * here, so the UI can only ever touch the documented routes. */

import type {
  CodebookDoc,
  CodedEvent,
  FeedbackResponse,
  PrentResponse,
  SampledEvent,
  SessionStatus,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    public baseUrl: string = "http://127.0.0.1:8000",
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = await response.json();
        detail = typeof payload.detail === "string" ? payload.detail : JSON.stringify(payload.detail);
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; backend: string }> {
    return this.request("GET", "/health");
  }

  templates(): Promise<Record<string, string>> {
    return this.request("GET", "/templates");
  }

  prent(
    text: string,
    templateIds?: string[],
    topK?: number,
    threshold?: number,
  ): Promise<PrentResponse> {
    return this.request("POST", "/prent", {
      text,
      template_ids: templateIds ?? null,
      top_k: topK ?? null,
      threshold: threshold ?? null,
    });
  }

  codeText(text: string, codebook: string | CodebookDoc): Promise<{ types: string[] }> {
    return this.request("POST", "/code", { text, codebook });
  }

  codeCorpus(
    corpusRef: string,
    codebook: string | CodebookDoc,
  ): Promise<{ coded: CodedEvent[] }> {
    return this.request("POST", "/code", { corpus_ref: corpusRef, codebook });
  }

  listCodebooks(): Promise<{ codebooks: string[] }> {
    return this.request("GET", "/codebooks");
  }

  getCodebook(name: string): Promise<CodebookDoc> {
    return this.request("GET", `/codebooks/${encodeURIComponent(name)}`);
  }

  putCodebook(name: string, document: CodebookDoc): Promise<{ stored: string }> {
    return this.request("PUT", `/codebooks/${encodeURIComponent(name)}`, document);
  }

  /** Download targets for the export buttons. */
  codebookExportUrl(name: string): string {
    return `${this.baseUrl}/export/codebook/${encodeURIComponent(name)}`;
  }

  sessionExportUrl(id: string): string {
    return `${this.baseUrl}/sessions/${encodeURIComponent(id)}/export`;
  }

  createSession(
    id: string,
    codebook: string,
    corpusRef = "demo",
    seed = 0,
  ): Promise<{ id: string; events_total: number }> {
    return this.request("POST", "/sessions", {
      id,
      codebook,
      corpus_ref: corpusRef,
      seed,
    });
  }

  sessionStatus(id: string): Promise<SessionStatus> {
    return this.request("GET", `/sessions/${encodeURIComponent(id)}`);
  }

  sample(id: string, n: number): Promise<{ events: SampledEvent[] }> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/sample`, { n });
  }

  feedback(id: string, eventId: string, accepted: string[]): Promise<FeedbackResponse> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/feedback`, {
      event_id: eventId,
      accepted,
    });
  }
}
