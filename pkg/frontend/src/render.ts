/** DOM rendering for the shop pages. One function per page kind, all fed
 * from the session snapshot the server returns with every outcome — the
 * browser never invents state of its own.
 */

import {
  Cart,
  Page,
  Product,
  SessionSnapshot,
  formatMinor,
} from "./types.js";
import { TickerLine } from "./transcript.js";

export type ProductMap = Map<string, Product>;

function el(
  tag: string,
  className?: string,
  text?: string,
): HTMLElement {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

/** Product ids a snapshot needs resolved before it can be drawn. */
export function productIdsNeeded(snapshot: SessionSnapshot): string[] {
  const ids = new Set<string>();
  if (snapshot.page.kind === "SEARCH_RESULTS") {
    for (const id of snapshot.page.result_ids) {
      ids.add(id);
    }
  }
  if (snapshot.page.kind === "PRODUCT_DETAIL") {
    ids.add(snapshot.page.product_id);
  }
  for (const line of snapshot.cart.lines) {
    ids.add(line.product_id);
  }
  return [...ids];
}

function renderHome(): HTMLElement {
  const section = el("section", "page page-home");
  section.appendChild(el("h2", undefined, "Welcome"));
  section.appendChild(
    el(
      "p",
      "hint",
      'Say or type something like "search for red shoes" to get started. Say "help" anytime.',
    ),
  );
  return section;
}

function renderResults(page: Page, products: ProductMap): HTMLElement {
  if (page.kind !== "SEARCH_RESULTS") {
    throw new Error("not a results page");
  }
  const section = el("section", "page page-results");
  section.appendChild(
    el("h2", undefined, `Results for "${page.query}" — page ${page.page_index + 1}`),
  );
  const list = el("ol", "results");
  list.setAttribute("start", String(page.page_index * page.result_ids.length + 1));
  for (const id of page.result_ids) {
    const product = products.get(id);
    const item = el("li", "result");
    item.dataset.productId = id;
    if (product) {
      item.appendChild(el("span", "title", product.title));
      item.appendChild(el("span", "price", formatMinor(product.price_minor)));
      if (!product.in_stock) {
        item.appendChild(el("span", "stock-out", "out of stock"));
      }
    } else {
      item.appendChild(el("span", "title", id));
    }
    list.appendChild(item);
  }
  if (page.result_ids.length === 0) {
    section.appendChild(el("p", "hint", "No results. Try different words."));
  }
  section.appendChild(list);
  section.appendChild(
    el("p", "hint", 'Say "select the first one", "next page", or search again.'),
  );
  return section;
}

function renderDetail(page: Page, products: ProductMap): HTMLElement {
  if (page.kind !== "PRODUCT_DETAIL") {
    throw new Error("not a detail page");
  }
  const section = el("section", "page page-detail");
  const product = products.get(page.product_id);
  if (!product) {
    section.appendChild(el("h2", undefined, page.product_id));
    return section;
  }
  section.dataset.productId = product.id;
  section.appendChild(el("h2", undefined, product.title));
  section.appendChild(el("p", "price", formatMinor(product.price_minor)));
  section.appendChild(el("p", "category", product.category));
  section.appendChild(el("p", "description", product.description));
  section.appendChild(
    el("p", "stock", product.in_stock ? "In stock" : "Out of stock"),
  );
  section.appendChild(el("p", "hint", 'Say "add to cart" or "go back".'));
  return section;
}

function renderCartLines(cart: Cart, products: ProductMap): HTMLElement {
  const table = el("table", "cart-lines");
  for (const line of cart.lines) {
    const row = el("tr", "cart-line");
    row.dataset.productId = line.product_id;
    const title = products.get(line.product_id)?.title ?? line.product_id;
    row.appendChild(el("td", "qty", `${line.quantity} ×`));
    row.appendChild(el("td", "title", title));
    row.appendChild(el("td", "price", formatMinor(line.line_total_minor)));
    table.appendChild(row);
  }
  return table;
}

function renderCart(snapshot: SessionSnapshot, products: ProductMap): HTMLElement {
  const section = el("section", "page page-cart");
  section.appendChild(el("h2", undefined, "Your cart"));
  if (snapshot.cart.lines.length === 0) {
    section.appendChild(el("p", "hint", "Your cart is empty."));
    return section;
  }
  section.appendChild(renderCartLines(snapshot.cart, products));
  section.appendChild(
    el("p", "total", `Total ${formatMinor(snapshot.cart.total_minor)}`),
  );
  section.appendChild(el("p", "hint", 'Say "checkout" when you are ready.'));
  return section;
}

function renderCheckout(
  snapshot: SessionSnapshot,
  products: ProductMap,
): HTMLElement {
  const section = el("section", "page page-checkout");
  section.appendChild(el("h2", undefined, "Confirm your order"));
  section.appendChild(renderCartLines(snapshot.cart, products));
  section.appendChild(
    el("p", "total", `Total ${formatMinor(snapshot.cart.total_minor)}`),
  );
  section.appendChild(
    el("p", "hint", 'Say "confirm" to place the order, or "cancel".'),
  );
  return section;
}

function renderOrderPlaced(page: Page): HTMLElement {
  if (page.kind !== "ORDER_PLACED") {
    throw new Error("not an order page");
  }
  const section = el("section", "page page-order");
  section.appendChild(el("h2", undefined, "Order placed"));
  const id = el("p", "order-id", page.order_id);
  id.dataset.orderId = page.order_id;
  section.appendChild(id);
  section.appendChild(el("p", "hint", "Thank you! Say \"go home\" to keep shopping."));
  return section;
}

/** Draw the page for a snapshot into `root`, replacing previous content. */
export function renderPage(
  root: HTMLElement,
  snapshot: SessionSnapshot,
  products: ProductMap,
): void {
  let section: HTMLElement;
  switch (snapshot.page.kind) {
    case "HOME":
      section = renderHome();
      break;
    case "SEARCH_RESULTS":
      section = renderResults(snapshot.page, products);
      break;
    case "PRODUCT_DETAIL":
      section = renderDetail(snapshot.page, products);
      break;
    case "CART_VIEW":
      section = renderCart(snapshot, products);
      break;
    case "CHECKOUT_CONFIRM":
      section = renderCheckout(snapshot, products);
      break;
    case "ORDER_PLACED":
      section = renderOrderPlaced(snapshot.page);
      break;
  }
  root.replaceChildren(section);
  root.dataset.page = snapshot.page.kind;
}

/** Small always-visible cart indicator. */
export function renderCartBadge(badge: HTMLElement, cart: Cart): void {
  badge.textContent =
    cart.item_count === 0
      ? "Cart: empty"
      : `Cart: ${cart.item_count} item${cart.item_count === 1 ? "" : "s"} · ${formatMinor(cart.total_minor)}`;
}

/** Redraw the heard-so-far ticker. */
export function renderTicker(list: HTMLElement, lines: TickerLine[]): void {
  list.replaceChildren(
    ...lines.map((line) => {
      const item = document.createElement("li");
      item.className = line.final ? "heard-final" : "heard-partial";
      item.textContent = line.text;
      return item;
    }),
  );
}
