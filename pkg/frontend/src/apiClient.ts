/** Typed fetch client for the search service. */

import { ApiErrorBody, QueryBody, SearchResponse } from "./types.js";

export class ApiError extends Error {
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

export class SearchApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  async search(query: QueryBody): Promise<SearchResponse> {
    return this.post<SearchResponse>("/search", query);
  }

  async indexPages(pages: unknown[]): Promise<{ indexed: number; total: number }> {
    return this.post<{ indexed: number; total: number }>("/index", { pages });
  }

  async health(): Promise<{ status: string; pages: number }> {
    const response = await this.fetchImpl(this.baseUrl + "/health");
    if (!response.ok) throw new ApiError("unhealthy", `health check failed: ${response.status}`);
    return (await response.json()) as { status: string; pages: number };
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError("network", `cannot reach the search service: ${String(err)}`);
    }
    if (!response.ok) {
      let parsed: ApiErrorBody | null = null;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; fall through to the generic message
      }
      throw new ApiError(parsed?.code ?? "http_error", parsed?.message ?? `HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }
}
