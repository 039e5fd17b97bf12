/** Typed fetch client for the gateway API — the UI's only data source. */

import type {
  ApiErrorBody,
  CandidateDetail,
  CandidatePage,
  HealthInfo,
  PreviewMode,
  PreviewSet,
  SelectionDoc,
  SelectionEntry,
} from "./types.js";

export interface ClientOptions {
  baseUrl: string;
  /** Injection point for tests; defaults to the global fetch. */
  fetchImpl?: typeof fetch;
}

/** A gateway error response, carrying the server's error code verbatim. */
export class GatewayError extends Error {
  readonly code: string;
  readonly status: number;
  readonly extra: Record<string, unknown>;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "GatewayError";
    this.status = status;
    this.code = body.code;
    const { code: _c, message: _m, ...extra } = body;
    this.extra = extra;
  }
}

export class GatewayClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: typeof fetch;

  constructor(options: ClientOptions) {
    this.baseUrl = options.baseUrl.endsWith("/")
      ? options.baseUrl.slice(0, -1)
      : options.baseUrl;
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  /** Absolute URL for a server-relative resource like `/candidates/x/image`. */
  url(path: string): string {
    return this.baseUrl + path;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.url(path), init);
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "unknown", message: `HTTP ${response.status}` };
      }
      throw new GatewayError(response.status, body);
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json() as Promise<T>;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return response.json() as Promise<T>;
  }

  private async postBytes(path: string, body: unknown): Promise<Uint8Array> {
    const response = await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return new Uint8Array(await response.arrayBuffer());
  }

  health(): Promise<HealthInfo> {
    return this.getJson("/health");
  }

  listCandidates(offset: number, limit: number): Promise<CandidatePage> {
    return this.getJson(`/candidates?offset=${offset}&limit=${limit}`);
  }

  getCandidate(id: string): Promise<CandidateDetail> {
    return this.getJson(`/candidates/${encodeURIComponent(id)}`);
  }

  /** Raw PNG bytes of any server-relative image URL. */
  async fetchImage(relUrl: string): Promise<Uint8Array> {
    const response = await this.request(relUrl);
    return new Uint8Array(await response.arrayBuffer());
  }

  generate(count: number, seed: number): Promise<{ items: CandidateDetail[]; total: number }> {
    return this.postJson("/generate", { count, seed });
  }

  interpolate(
    fromId: string,
    toId: string,
    steps: number,
    mode: PreviewMode,
  ): Promise<PreviewSet> {
    return this.postJson("/interpolate", {
      from_id: fromId,
      to_id: toId,
      steps,
      mode,
    });
  }

  neighborhood(id: string, radius: number, n: number, seed: number): Promise<PreviewSet> {
    return this.postJson("/neighborhood", { id, radius, n, seed });
  }

  /** Append a previewed frame's latent to the catalog as a candidate. */
  promote(latent: number[]): Promise<CandidateDetail> {
    return this.postJson("/promote", { latent });
  }

  /** Deterministic PNG contact sheet over the given candidate ids. */
  exportSheet(ids: string[], columns: number): Promise<Uint8Array> {
    return this.postBytes("/sheets", { ids, columns });
  }

  async listSelections(): Promise<string[]> {
    return (await this.getJson<{ names: string[] }>("/selections")).names;
  }

  getSelection(name: string): Promise<SelectionDoc> {
    return this.getJson(`/selections/${encodeURIComponent(name)}`);
  }

  mutateSelection(
    name: string,
    expectedRevision: number,
    set: Record<string, SelectionEntry>,
    remove: string[] = [],
  ): Promise<SelectionDoc> {
    return this.postJson(`/selections/${encodeURIComponent(name)}`, {
      expected_revision: expectedRevision,
      set,
      remove,
    });
  }
}
