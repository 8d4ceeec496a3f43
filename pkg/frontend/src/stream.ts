/** Session event stream: WebSocket when possible, plain HTTP when not.
 *
 * The server answers every frame in order, so replies are matched to sends
 * first-in first-out. If the socket cannot be opened (or dies mid-session)
 * the stream degrades to POSTing each event, which the server treats
 * identically.
 */

import { ApiError, ShopApi } from "./api.js";
import { StreamReply, TranscriptEvent, isErrorBody } from "./types.js";

interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

function defaultSocketFactory(url: string): SocketLike {
  const ctor = (globalThis as { WebSocket?: new (url: string) => SocketLike })
    .WebSocket;
  if (!ctor) {
    throw new Error("WebSocket is not available");
  }
  return new ctor(url);
}

interface Pending {
  resolve: (reply: StreamReply) => void;
  reject: (error: Error) => void;
}

export class EventStream {
  readonly api: ShopApi;
  readonly sessionId: string;
  private socket: SocketLike | null = null;
  private opened: Promise<boolean> | null = null;
  private readonly pending: Pending[] = [];
  private wsBroken = false;
  private readonly socketFactory: SocketFactory;

  constructor(api: ShopApi, sessionId: string, socketFactory?: SocketFactory) {
    this.api = api;
    this.sessionId = sessionId;
    this.socketFactory = socketFactory ?? defaultSocketFactory;
  }

  /** True when the last send travelled over the socket. */
  get usingWebSocket(): boolean {
    return this.socket !== null && !this.wsBroken;
  }

  /** Send one transcript event and resolve with the server's reply frame.
   *
   * Error frames (schema/ordering problems) resolve normally — the caller
   * decides how to surface them; the stream itself stays usable.
   */
  async send(event: TranscriptEvent): Promise<StreamReply> {
    if (!this.wsBroken) {
      const ok = await this.ensureSocket();
      if (ok && this.socket) {
        return new Promise<StreamReply>((resolve, reject) => {
          this.pending.push({ resolve, reject });
          try {
            this.socket?.send(JSON.stringify(event));
          } catch (cause) {
            this.pending.pop();
            this.failSocket();
            this.sendOverHttp(event).then(resolve, reject);
          }
        });
      }
    }
    return this.sendOverHttp(event);
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }

  private async sendOverHttp(event: TranscriptEvent): Promise<StreamReply> {
    try {
      return await this.api.sendEvent(this.sessionId, event);
    } catch (error) {
      if (error instanceof ApiError && error.status > 0) {
        // mirror the socket's error frames so callers see one shape
        return { error: { code: error.code, message: error.message } };
      }
      throw error;
    }
  }

  private ensureSocket(): Promise<boolean> {
    if (this.opened) {
      return this.opened;
    }
    this.opened = new Promise<boolean>((resolve) => {
      let socket: SocketLike;
      try {
        socket = this.socketFactory(this.api.streamUrl(this.sessionId));
      } catch {
        this.wsBroken = true;
        resolve(false);
        return;
      }
      socket.onopen = () => {
        this.socket = socket;
        resolve(true);
      };
      socket.onerror = () => {
        if (!this.socket) {
          this.wsBroken = true;
          resolve(false);
        }
      };
      socket.onclose = () => {
        if (!this.socket) {
          this.wsBroken = true;
          resolve(false);
        } else {
          this.failSocket();
        }
      };
      socket.onmessage = (message) => {
        const next = this.pending.shift();
        if (!next) {
          return;
        }
        try {
          const reply = JSON.parse(String(message.data)) as StreamReply;
          next.resolve(reply);
          if (isErrorBody(reply) && reply.error.code === "NOT_FOUND") {
            // the server closes the stream after these
            this.failSocket();
          }
        } catch (error) {
          next.reject(error as Error);
        }
      };
    });
    return this.opened;
  }

  private failSocket(): void {
    this.wsBroken = true;
    this.socket = null;
    this.opened = null;
    while (this.pending.length > 0) {
      const waiter = this.pending.shift();
      waiter?.reject(new Error("stream closed"));
    }
  }
}
