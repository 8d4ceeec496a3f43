/** End-to-end: drives a real server over real HTTP and WebSocket.
 *
 * The server is the `voiceshop` Python package's service, started as a
 * subprocess on a free port; the test talks to it exactly the way the
 * browser app does (ShopApi + EventStream), never through any back door.
 */

import { spawn, ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { ApiError, ShopApi } from "../src/api.js";
import { EventStream, SocketFactory } from "../src/stream.js";
import { OutcomeRecord, TranscriptEvent, isErrorBody } from "../src/types.js";

const GOLDEN_PURCHASE: TranscriptEvent[] = [
  { seq: 1, text: "search red", is_final: false },
  { seq: 2, text: "search red shoes", is_final: true },
  { seq: 3, text: "um hello there my friend", is_final: true },
  { seq: 4, text: "next page", is_final: true },
  { seq: 5, text: "go back", is_final: true },
  { seq: 6, text: "select the first one", is_final: true },
  { seq: 7, text: "describe", is_final: true },
  { seq: 8, text: "add to cart", is_final: true },
  { seq: 9, text: "add the red shoes to my cart", is_final: true },
  { seq: 10, text: "show my cart", is_final: true },
  { seq: 11, text: "checkout", is_final: true, word_confidences: [0.3] },
  { seq: 12, text: "checkout please", is_final: true },
  { seq: 13, text: "confirm", is_final: true },
];

const wsFactory: SocketFactory = (url) =>
  new WebSocket(url) as unknown as ReturnType<SocketFactory>;

let server: ChildProcess;
let api: ShopApi;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const { port } = address;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port assigned"));
      }
    });
  });
}

beforeAll(async () => {
  const port = await freePort();
  server = spawn(
    "python3",
    ["-m", "voiceshop.cli", "serve", "--port", String(port), "--host", "127.0.0.1"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  api = new ShopApi(`http://127.0.0.1:${port}`);
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const health = await api.health();
      expect(health.status).toBe("ok");
      break;
    } catch {
      if (Date.now() > deadline) {
        throw new Error("server did not come up");
      }
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
}, 30_000);

afterAll(() => {
  server?.kill("SIGINT");
});

async function runPurchase(stream: EventStream): Promise<OutcomeRecord[]> {
  const records: OutcomeRecord[] = [];
  for (const event of GOLDEN_PURCHASE) {
    const reply = await stream.send(event);
    expect(isErrorBody(reply)).toBe(false);
    records.push(reply as OutcomeRecord);
    expect((reply as OutcomeRecord).speech.length).toBeGreaterThan(0);
  }
  return records;
}

function expectCompletedPurchase(records: OutcomeRecord[]): void {
  expect(records[0]?.outcome).toBe("DEFERRED");
  expect(records[0]?.committed).toBe(false);
  expect(records[2]?.outcome).toBe("NO_MATCH");
  expect(records[10]?.outcome).toBe("LOW_CONFIDENCE");
  const final = records[records.length - 1]!;
  expect(final.outcome).toBe("MATCHED");
  expect(final.intent).toBe("confirm");
  expect(final.state.page.kind).toBe("ORDER_PLACED");
  expect(final.state.cart.lines).toEqual([]);
  expect(final.state.cart.total_minor).toBe(0);
  expect(final.state.orders_placed).toBe(1);
}

describe("against a live server", () => {
  it("completes the golden purchase over plain http", async () => {
    const sessionId = await api.createSession();
    const stream = new EventStream(api, sessionId, () => {
      throw new Error("force http fallback");
    });
    const records = await runPurchase(stream);
    expectCompletedPurchase(records);
    expect(stream.usingWebSocket).toBe(false);

    const snapshot = await api.getState(sessionId);
    expect(snapshot.last_seq).toBe(13);
    expect(snapshot.state).toEqual(records[records.length - 1]!.state);
  });

  it("completes the same purchase over a real websocket", async () => {
    const sessionId = await api.createSession();
    const stream = new EventStream(api, sessionId, wsFactory);
    const records = await runPurchase(stream);
    expect(stream.usingWebSocket).toBe(true);
    expectCompletedPurchase(records);
    stream.close();
  }, 15_000);

  it("http and websocket transports produce identical outcomes", async () => {
    const httpSession = await api.createSession();
    const httpStream = new EventStream(api, httpSession, () => {
      throw new Error("force http");
    });
    const wsSession = await api.createSession();
    const wsStream = new EventStream(api, wsSession, wsFactory);

    const httpRecords = await runPurchase(httpStream);
    const wsRecords = await runPurchase(wsStream);
    wsStream.close();

    const strip = (record: OutcomeRecord) => {
      const { session_id: _ignored, ...rest } = record;
      return rest;
    };
    expect(wsRecords.map(strip)).toEqual(httpRecords.map(strip));
  }, 15_000);

  it("reports ordering problems on both transports without killing the stream", async () => {
    const sessionId = await api.createSession();
    const stream = new EventStream(api, sessionId, wsFactory);
    const first = await stream.send({ seq: 5, text: "help", is_final: true });
    expect(isErrorBody(first)).toBe(false);

    const stale = await stream.send({ seq: 5, text: "help", is_final: true });
    expect(stale).toMatchObject({ error: { code: "ORDERING" } });

    const recovered = await stream.send({ seq: 6, text: "show my cart", is_final: true });
    expect((recovered as OutcomeRecord).outcome).toBe("MATCHED");
    expect(stream.usingWebSocket).toBe(true);
    stream.close();

    const viaHttp = await api
      .sendEvent(sessionId, { seq: 6, text: "help", is_final: true })
      .catch((error: unknown) => error);
    expect(viaHttp).toBeInstanceOf(ApiError);
    expect((viaHttp as ApiError).code).toBe("ORDERING");
    expect((viaHttp as ApiError).status).toBe(409);
  }, 15_000);

  it("searches and fetches products over the documented endpoints", async () => {
    const results = await api.searchProducts("red shoes");
    expect(results.total).toBeGreaterThan(0);
    const top = results.products[0]!;
    expect(top.title).toBe("red shoes");
    const detail = await api.getProduct(top.id);
    expect(detail).toEqual(top);

    const missing = await api.getProduct("nope").catch((error: unknown) => error);
    expect(missing).toBeInstanceOf(ApiError);
    expect((missing as ApiError).status).toBe(404);
  });
});
