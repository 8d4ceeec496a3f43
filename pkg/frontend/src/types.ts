/** Wire types for the voiceshop HTTP + WebSocket API. */

export type PageKind =
  | "HOME"
  | "SEARCH_RESULTS"
  | "PRODUCT_DETAIL"
  | "CART_VIEW"
  | "CHECKOUT_CONFIRM"
  | "ORDER_PLACED";

export interface HomePage {
  kind: "HOME";
}

export interface SearchResultsPage {
  kind: "SEARCH_RESULTS";
  query: string;
  page_index: number;
  result_ids: string[];
}

export interface ProductDetailPage {
  kind: "PRODUCT_DETAIL";
  product_id: string;
}

export interface CartViewPage {
  kind: "CART_VIEW";
}

export interface CheckoutConfirmPage {
  kind: "CHECKOUT_CONFIRM";
}

export interface OrderPlacedPage {
  kind: "ORDER_PLACED";
  order_id: string;
}

export type Page =
  | HomePage
  | SearchResultsPage
  | ProductDetailPage
  | CartViewPage
  | CheckoutConfirmPage
  | OrderPlacedPage;

export interface CartLine {
  product_id: string;
  quantity: number;
  unit_price_minor: number;
  line_total_minor: number;
}

export interface Cart {
  lines: CartLine[];
  total_minor: number;
  item_count: number;
}

export interface SessionSnapshot {
  page: Page;
  cart: Cart;
  history_depth: number;
  orders_placed: number;
}

export type Outcome = "MATCHED" | "NO_MATCH" | "LOW_CONFIDENCE" | "DEFERRED";

export interface OutcomeRecord {
  outcome: Outcome;
  intent: string | null;
  slots: Record<string, unknown>;
  confidence: number | null;
  action: string;
  speech: string;
  session_id: string;
  seq: number;
  is_final: boolean;
  committed: boolean;
  state: SessionSnapshot;
}

export interface TranscriptEvent {
  seq: number;
  text: string;
  is_final: boolean;
  word_confidences?: number[];
  delay_ms?: number;
}

export interface Product {
  id: string;
  title: string;
  category: string;
  price_minor: number;
  description: string;
  image_ref: string;
  in_stock: boolean;
}

export interface ProductSearchResult {
  query: string;
  page: number;
  page_size: number;
  total: number;
  products: Product[];
}

export interface Health {
  status: string;
  sessions: number;
  vocab_class: string;
  mode: string;
}

export interface ErrorBody {
  error: {
    code: string;
    message: string;
  };
}

/** One reply frame on the event stream: an outcome or an error record. */
export type StreamReply = OutcomeRecord | ErrorBody;

export function isErrorBody(value: unknown): value is ErrorBody {
  return (
    typeof value === "object" &&
    value !== null &&
    typeof (value as ErrorBody).error === "object" &&
    (value as ErrorBody).error !== null &&
    typeof (value as ErrorBody).error.code === "string"
  );
}

/** Render minor currency units (cents) as a dollar string, e.g. 4999 -> "$49.99". */
export function formatMinor(totalMinor: number): string {
  const sign = totalMinor < 0 ? "-" : "";
  const abs = Math.abs(totalMinor);
  const dollars = Math.floor(abs / 100);
  const cents = String(abs % 100).padStart(2, "0");
  return `${sign}$${dollars}.${cents}`;
}
