/** Thin fetch client for the voiceshop REST endpoints. */

import {
  Health,
  OutcomeRecord,
  Product,
  ProductSearchResult,
  SessionSnapshot,
  TranscriptEvent,
  isErrorBody,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ShopApi {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // default to the ambient fetch, bound so it keeps its expected receiver
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  /** ws:// or wss:// address of a session's event stream. */
  streamUrl(sessionId: string): string {
    return (
      this.baseUrl.replace(/^http/, "ws") +
      `/api/sessions/${encodeURIComponent(sessionId)}/stream`
    );
  }

  async health(): Promise<Health> {
    return this.request("GET", "/api/health");
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>(
      "POST",
      "/api/sessions",
    );
    return body.session_id;
  }

  async sendEvent(
    sessionId: string,
    event: TranscriptEvent,
  ): Promise<OutcomeRecord> {
    return this.request(
      "POST",
      `/api/sessions/${encodeURIComponent(sessionId)}/events`,
      event,
    );
  }

  async getState(
    sessionId: string,
  ): Promise<{ session_id: string; last_seq: number; state: SessionSnapshot }> {
    return this.request(
      "GET",
      `/api/sessions/${encodeURIComponent(sessionId)}/state`,
    );
  }

  async searchProducts(query: string, page = 0): Promise<ProductSearchResult> {
    const params = new URLSearchParams({ q: query, page: String(page) });
    return this.request("GET", `/api/products?${params}`);
  }

  async getProduct(productId: string): Promise<Product> {
    return this.request(
      "GET",
      `/api/products/${encodeURIComponent(productId)}`,
    );
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (cause) {
      throw new ApiError("NETWORK", `cannot reach ${this.baseUrl}`, 0);
    }
    const payload: unknown = await response.json().catch(() => null);
    if (!response.ok) {
      if (isErrorBody(payload)) {
        throw new ApiError(
          payload.error.code,
          payload.error.message,
          response.status,
        );
      }
      throw new ApiError("HTTP", `unexpected ${response.status}`, response.status);
    }
    return payload as T;
  }
}
