/** Application wiring: session bootstrap, voice/text input, and rendering.
 *
 * Everything the page shows comes from the server's outcome records; this
 * module only routes events in and snapshots out. Voice input and voiced
 * replies are progressive enhancements — typing into the text box drives
 * the exact same pipeline.
 */

import { ShopApi } from "./api.js";
import { EventStream } from "./stream.js";
import { TranscriptTicker } from "./transcript.js";
import { Speaker } from "./speech.js";
import { createRecognizer } from "./recognizer.js";
import {
  ProductMap,
  productIdsNeeded,
  renderCartBadge,
  renderPage,
  renderTicker,
} from "./render.js";
import {
  OutcomeRecord,
  Product,
  SessionSnapshot,
  isErrorBody,
} from "./types.js";

class ProductCache {
  private readonly api: ShopApi;
  private readonly known: ProductMap = new Map();

  constructor(api: ShopApi) {
    this.api = api;
  }

  async resolve(ids: string[]): Promise<ProductMap> {
    const missing = ids.filter((id) => !this.known.has(id));
    const fetched = await Promise.all(
      missing.map((id) => this.api.getProduct(id).catch(() => null)),
    );
    for (const product of fetched) {
      if (product) {
        this.known.set(product.id, product as Product);
      }
    }
    return this.known;
  }
}

function mustFind(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in the page`);
  }
  return node;
}

export async function boot(baseUrl?: string): Promise<void> {
  const api = new ShopApi(baseUrl ?? window.location.origin);
  const pageRoot = mustFind("page");
  const tickerRoot = mustFind("ticker");
  const captionRoot = mustFind("caption");
  const badgeRoot = mustFind("cart-badge");
  const statusRoot = mustFind("status");
  const form = mustFind("text-form") as HTMLFormElement;
  const input = mustFind("text-input") as HTMLInputElement;
  const micButton = mustFind("mic") as HTMLButtonElement;

  const speaker = new Speaker((text) => {
    captionRoot.textContent = text;
  });
  const ticker = new TranscriptTicker();
  const products = new ProductCache(api);

  const health = await api.health();
  const sessionId = await api.createSession();
  const stream = new EventStream(api, sessionId);
  statusRoot.textContent = `session ${sessionId} · grammar ${health.vocab_class}/${health.mode}`;

  async function draw(snapshot: SessionSnapshot): Promise<void> {
    const map = await products.resolve(productIdsNeeded(snapshot));
    renderPage(pageRoot, snapshot, map);
    renderCartBadge(badgeRoot, snapshot.cart);
  }

  async function handleOutcome(record: OutcomeRecord): Promise<void> {
    if (record.committed) {
      speaker.say(record.speech);
      await draw(record.state);
    } else {
      // previews and deferrals are shown, never voiced
      statusRoot.textContent = record.speech;
    }
  }

  async function submitFinal(text: string, confidence?: number): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed) {
      return;
    }
    const confidences =
      confidence === undefined
        ? undefined
        : trimmed.split(/\s+/).map(() => confidence);
    const event = ticker.final(trimmed, confidences);
    renderTicker(tickerRoot, ticker.lines());
    const reply = await stream.send(event);
    if (isErrorBody(reply)) {
      statusRoot.textContent = `${reply.error.code}: ${reply.error.message}`;
      return;
    }
    await handleOutcome(reply);
  }

  async function submitPartial(text: string): Promise<void> {
    const event = ticker.partial(text);
    renderTicker(tickerRoot, ticker.lines());
    const reply = await stream.send(event);
    if (!isErrorBody(reply)) {
      await handleOutcome(reply);
    }
  }

  form.addEventListener("submit", (submitEvent) => {
    submitEvent.preventDefault();
    const text = input.value;
    input.value = "";
    void submitFinal(text);
  });

  const recognizer = createRecognizer({
    onPartial: (text) => void submitPartial(text),
    onFinal: (text, confidence) =>
      void submitFinal(text, confidence ?? undefined),
    onEnd: () => {
      micButton.dataset.listening = "false";
      micButton.textContent = "Start listening";
    },
  });
  if (recognizer) {
    micButton.addEventListener("click", () => {
      if (micButton.dataset.listening === "true") {
        recognizer.stop();
        micButton.dataset.listening = "false";
        micButton.textContent = "Start listening";
      } else {
        recognizer.start();
        micButton.dataset.listening = "true";
        micButton.textContent = "Stop listening";
      }
    });
  } else {
    micButton.disabled = true;
    micButton.textContent = "Voice input unavailable — type below";
  }

  const initial = await api.getState(sessionId);
  await draw(initial.state);
  speaker.say(
    'Welcome to the voice shop. Try "search for red shoes", or say help.',
  );
}

// boot immediately when loaded in a real page (tests import pieces instead)
if (typeof document !== "undefined" && document.getElementById("page")) {
  void boot().catch((error) => {
    const status = document.getElementById("status");
    if (status) {
      status.textContent = `could not start: ${String(error)}`;
    }
  });
}
