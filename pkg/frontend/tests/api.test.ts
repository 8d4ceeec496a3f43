import { describe, expect, it } from "vitest";

import { ApiError, ShopApi } from "../src/api.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function fakeFetch(
  responder: (url: string, init?: RequestInit) => { status: number; body: unknown },
): { calls: Call[]; fetch: (url: string, init?: RequestInit) => Promise<Response> } {
  const calls: Call[] = [];
  return {
    calls,
    fetch: async (url, init) => {
      calls.push({ url, init });
      const { status, body } = responder(url, init);
      return new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      });
    },
  };
}

describe("ShopApi", () => {
  it("creates sessions against the sessions endpoint", async () => {
    const { calls, fetch } = fakeFetch(() => ({
      status: 201,
      body: { session_id: "s-1" },
    }));
    const api = new ShopApi("http://shop.test/", fetch);
    const sessionId = await api.createSession();
    expect(sessionId).toBe("s-1");
    expect(calls[0]?.url).toBe("http://shop.test/api/sessions");
    expect(calls[0]?.init?.method).toBe("POST");
  });

  it("posts events as JSON with the content type set", async () => {
    const { calls, fetch } = fakeFetch(() => ({
      status: 200,
      body: { outcome: "DEFERRED", speech: "Listening." },
    }));
    const api = new ShopApi("http://shop.test", fetch);
    await api.sendEvent("s-1", { seq: 1, text: "search red", is_final: false });
    const call = calls[0];
    expect(call?.url).toBe("http://shop.test/api/sessions/s-1/events");
    expect(call?.init?.headers).toEqual({ "content-type": "application/json" });
    expect(JSON.parse(String(call?.init?.body))).toEqual({
      seq: 1,
      text: "search red",
      is_final: false,
    });
  });

  it("encodes search queries and paging", async () => {
    const { calls, fetch } = fakeFetch(() => ({
      status: 200,
      body: { query: "red shoes", page: 1, page_size: 5, total: 0, products: [] },
    }));
    const api = new ShopApi("http://shop.test", fetch);
    await api.searchProducts("red shoes", 1);
    expect(calls[0]?.url).toBe("http://shop.test/api/products?q=red+shoes&page=1");
  });

  it("raises ApiError carrying the server's code for error bodies", async () => {
    const { fetch } = fakeFetch(() => ({
      status: 409,
      body: { error: { code: "ORDERING", message: "seq 1 is not newer" } },
    }));
    const api = new ShopApi("http://shop.test", fetch);
    const failure = await api
      .sendEvent("s-1", { seq: 1, text: "x", is_final: true })
      .catch((error: unknown) => error);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).code).toBe("ORDERING");
    expect((failure as ApiError).status).toBe(409);
  });

  it("maps unreachable hosts to a NETWORK ApiError", async () => {
    const api = new ShopApi("http://shop.test", async () => {
      throw new TypeError("fetch failed");
    });
    const failure = await api.health().catch((error: unknown) => error);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).code).toBe("NETWORK");
    expect((failure as ApiError).status).toBe(0);
  });

  it("derives the websocket address from the base url", () => {
    const api = new ShopApi("https://shop.test:8443", async () => new Response());
    expect(api.streamUrl("s-2")).toBe(
      "wss://shop.test:8443/api/sessions/s-2/stream",
    );
  });
});
