"""Shop domain: catalog, search, cart, and the page state machine.

Money is held in integer minor units (cents) end to end; display strings are
derived at the edges. Pages form a small state machine driven by command
decisions; `apply` is a pure fold step over an immutable SessionState.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .command import CommandDecision, KeywordSpot
from .errors import ConflictError, SchemaError
from .textnorm import normalize

DEFAULT_PAGE_SIZE = 5

HOME = "HOME"
SEARCH_RESULTS = "SEARCH_RESULTS"
PRODUCT_DETAIL = "PRODUCT_DETAIL"
CART_VIEW = "CART_VIEW"
CHECKOUT_CONFIRM = "CHECKOUT_CONFIRM"
ORDER_PLACED = "ORDER_PLACED"

PAGE_KINDS = (HOME, SEARCH_RESULTS, PRODUCT_DETAIL, CART_VIEW, CHECKOUT_CONFIRM, ORDER_PLACED)


def format_minor(amount_minor: int) -> str:
    sign = "-" if amount_minor < 0 else ""
    amount = abs(amount_minor)
    return f"{sign}${amount // 100}.{amount % 100:02d}"


@dataclass(frozen=True)
class Product:
    id: str
    title: str
    category: str
    price_minor: int
    description: str
    image_ref: str
    in_stock: bool

    def __post_init__(self):
        if self.price_minor < 0:
            raise SchemaError(f"product {self.id!r}: negative price")


class Catalog:
    """Product lookup plus token-scored search."""

    def __init__(self, products: list[Product]):
        self._by_id: dict[str, Product] = {}
        for product in products:
            if product.id in self._by_id:
                raise ConflictError(f"duplicate product id {product.id!r}")
            self._by_id[product.id] = product
        # token sets are precomputed; catalogs are read-only after load
        self._tokens: dict[str, tuple[set, set, set]] = {
            p.id: (set(normalize(p.title)), set(normalize(p.category)), set(normalize(p.description)))
            for p in products
        }

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, product_id: str) -> bool:
        return product_id in self._by_id

    def get(self, product_id: str) -> Product | None:
        return self._by_id.get(product_id)

    def products(self) -> list[Product]:
        return list(self._by_id.values())

    def score(self, product_id: str, query_tokens: list[str]) -> int:
        """Relevance score: 2 per query token in the title, 1 in category, 1 in description."""
        title, category, description = self._tokens[product_id]
        score = 0
        for token in query_tokens:
            if token in title:
                score += 2
            if token in category:
                score += 1
            if token in description:
                score += 1
        return score

    def search(self, query_tokens: list[str]) -> list[Product]:
        """Rank by score descending, id ascending; zero-score products are excluded."""
        scored = []
        for product in self._by_id.values():
            s = self.score(product.id, query_tokens)
            if s > 0:
                scored.append((-s, product.id, product))
        scored.sort(key=lambda item: (item[0], item[1]))
        return [product for _, _, product in scored]


def _require(raw: dict, key: str, kind, where: str):
    if key not in raw:
        raise SchemaError(f"{where}: missing {key!r}")
    value = raw[key]
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"{where}: {key!r} must be an integer")
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: {key!r} has wrong type")
    return value


def parse_catalog(doc: object) -> Catalog:
    if not isinstance(doc, list) or not doc:
        raise SchemaError("catalog document must be a nonempty array of products")
    products = []
    for idx, raw in enumerate(doc):
        where = f"catalog[{idx}]"
        if not isinstance(raw, dict):
            raise SchemaError(f"{where}: product must be an object")
        products.append(Product(
            id=_require(raw, "id", str, where),
            title=_require(raw, "title", str, where),
            category=_require(raw, "category", str, where),
            price_minor=_require(raw, "price_minor", int, where),
            description=_require(raw, "description", str, where),
            image_ref=_require(raw, "image_ref", str, where),
            in_stock=_require(raw, "in_stock", bool, where),
        ))
    return Catalog(products)


def load_catalog(path: str | Path) -> Catalog:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return parse_catalog(doc)


# ---------------------------------------------------------------------------
# Pages, cart, session state

@dataclass(frozen=True)
class Page:
    kind: str
    query: str = ""
    page_index: int = 0
    result_ids: tuple[str, ...] = ()
    product_id: str = ""
    order_id: str = ""

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == SEARCH_RESULTS:
            out["query"] = self.query
            out["page_index"] = self.page_index
            out["result_ids"] = list(self.result_ids)
        elif self.kind == PRODUCT_DETAIL:
            out["product_id"] = self.product_id
        elif self.kind == ORDER_PLACED:
            out["order_id"] = self.order_id
        return out


HOME_PAGE = Page(kind=HOME)


@dataclass(frozen=True)
class CartLine:
    product_id: str
    quantity: int
    unit_price_minor: int

    @property
    def line_total_minor(self) -> int:
        return self.quantity * self.unit_price_minor

    def to_dict(self) -> dict:
        return {
            "product_id": self.product_id,
            "quantity": self.quantity,
            "unit_price_minor": self.unit_price_minor,
            "line_total_minor": self.line_total_minor,
        }


@dataclass(frozen=True)
class Cart:
    lines: tuple[CartLine, ...] = ()

    @property
    def total_minor(self) -> int:
        return sum(line.line_total_minor for line in self.lines)

    @property
    def item_count(self) -> int:
        return sum(line.quantity for line in self.lines)

    def line_for(self, product_id: str) -> CartLine | None:
        for line in self.lines:
            if line.product_id == product_id:
                return line
        return None

    def with_quantity(self, product: Product, quantity: int) -> "Cart":
        """Set a product's line quantity; zero removes the line."""
        if quantity < 0:
            raise ValueError("cart quantities cannot be negative")
        rest = tuple(l for l in self.lines if l.product_id != product.id)
        if quantity == 0:
            return Cart(lines=rest)
        new_line = CartLine(
            product_id=product.id, quantity=quantity, unit_price_minor=product.price_minor
        )
        existing = self.line_for(product.id)
        if existing is None:
            return Cart(lines=self.lines + (new_line,))
        return Cart(lines=tuple(
            new_line if l.product_id == product.id else l for l in self.lines
        ))

    def add(self, product: Product, quantity: int) -> "Cart":
        existing = self.line_for(product.id)
        base = existing.quantity if existing else 0
        return self.with_quantity(product, base + quantity)

    def to_dict(self) -> dict:
        return {
            "lines": [line.to_dict() for line in self.lines],
            "total_minor": self.total_minor,
            "item_count": self.item_count,
        }


@dataclass(frozen=True)
class SessionState:
    page: Page = HOME_PAGE
    cart: Cart = Cart()
    history: tuple[Page, ...] = ()
    orders_placed: int = 0

    def to_dict(self) -> dict:
        return {
            "page": self.page.to_dict(),
            "cart": self.cart.to_dict(),
            "history_depth": len(self.history),
            "orders_placed": self.orders_placed,
        }


@dataclass(frozen=True)
class ActionResult:
    state: SessionState
    speech: str
    action: str  # machine-readable name of what happened
    display: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# The fold step

# What help offers depends on where the shopper is standing.
PAGE_HELP = {
    HOME: ("search for something", "show my cart", "go back"),
    SEARCH_RESULTS: (
        "select the first one", "search for something else", "next page",
        "previous page", "add something to my cart", "show my cart", "go back",
    ),
    PRODUCT_DETAIL: (
        "describe", "add to cart", "set quantity to a number",
        "remove from cart", "show my cart", "search for something else", "go back",
    ),
    CART_VIEW: (
        "checkout", "remove something from my cart", "search for something else",
        "go back",
    ),
    CHECKOUT_CONFIRM: ("confirm", "cancel"),
    ORDER_PLACED: ("search for something", "show my cart", "go home"),
}


def _goto(state: SessionState, page: Page) -> SessionState:
    """Navigate to a page, pushing the old page when it actually changes."""
    if page == state.page:
        return state
    return replace(state, page=page, history=state.history + (state.page,))


def _page_slice(results: list[Product], page_index: int, page_size: int) -> list[Product]:
    start = page_index * page_size
    return results[start:start + page_size]


def _speak_results(query: str, page_index: int, shown: list[Product], total: int) -> str:
    if total == 0:
        return f"I found nothing for {query}. Try different words."
    names = ", ".join(f"{i + 1}: {p.title}" for i, p in enumerate(shown))
    page_note = f" Page {page_index + 1}." if total > len(shown) or page_index > 0 else ""
    return f"I found {total} result{'s' if total != 1 else ''} for {query}.{page_note} {names}."


def _speak_cart(cart: Cart, catalog: Catalog) -> str:
    if not cart.lines:
        return "Your cart is empty."
    parts = []
    for line in cart.lines:
        product = catalog.get(line.product_id)
        title = product.title if product else line.product_id
        parts.append(f"{line.quantity} x {title}")
    return (
        f"Your cart has {cart.item_count} item{'s' if cart.item_count != 1 else ''}: "
        f"{', '.join(parts)}. Total {format_minor(cart.total_minor)}."
    )


def _rank_within(
    catalog: Catalog, candidate_ids: tuple[str, ...] | None, tokens: list[str]
) -> list[Product]:
    """Rank a restricted id set (or the whole catalog when None) by query score."""
    if candidate_ids is None:
        return catalog.search(tokens)
    scored = [
        (-catalog.score(pid, tokens), pid)
        for pid in candidate_ids
        if catalog.score(pid, tokens) > 0
    ]
    scored.sort()
    return [catalog.get(pid) for _, pid in scored]


def _resolve_product(
    state: SessionState,
    catalog: Catalog,
    slot_values: dict,
) -> tuple[Product | None, str | None]:
    """Find the product a command refers to.

    Resolution order: ordinal position on the current results page, then a
    free-text name scored against the current results page, then the whole
    catalog. A tie between the top two scores is ambiguous and surfaced, not
    guessed. With no slots at all the current detail-page product is used.
    Returns (product, None) or (None, error speech).
    """
    ordinal = slot_values.get("position")
    if ordinal is not None and state.page.kind == SEARCH_RESULTS:
        ids = state.page.result_ids
        if 1 <= ordinal <= len(ids):
            return catalog.get(ids[ordinal - 1]), None
        return None, f"There is no item {ordinal} on this page."

    query = slot_values.get("product")
    if query:
        tokens = list(query) if isinstance(query, (list, tuple)) else normalize(str(query))
        scopes: list[tuple[str, ...] | None] = []
        if state.page.kind == SEARCH_RESULTS:
            scopes.append(state.page.result_ids)
        scopes.append(None)
        for scope in scopes:
            ranked = _rank_within(catalog, scope, tokens)
            if not ranked:
                continue
            if len(ranked) > 1 and catalog.score(ranked[0].id, tokens) == catalog.score(
                ranked[1].id, tokens
            ):
                return None, (
                    f"I found several matches for {' '.join(tokens)}: "
                    f"{ranked[0].title} or {ranked[1].title}. Please be more specific."
                )
            return ranked[0], None
        return None, f"I could not find {' '.join(tokens)} in the catalog."

    if state.page.kind == PRODUCT_DETAIL:
        return catalog.get(state.page.product_id), None
    if state.page.kind == SEARCH_RESULTS and len(state.page.result_ids) == 1:
        return catalog.get(state.page.result_ids[0]), None
    return None, "Which product do you mean? Search for it or select one from results."


def apply(
    state: SessionState,
    decision: CommandDecision,
    catalog: Catalog,
    *,
    page_size: int = DEFAULT_PAGE_SIZE,
    next_order_number: int = 1,
) -> ActionResult:
    """Fold one command decision into the session state.

    Always returns nonempty speech. Unrecognized or low-confidence input
    leaves the state unchanged and echoes the decision's fallback speech.
    """
    if decision.outcome != "MATCHED":
        speech = decision.speech_fallback or "Say help to hear what you can say."
        return ActionResult(state=state, speech=speech, action="none")
    assert decision.spot is not None
    return _apply_spot(state, decision.spot, catalog, page_size, next_order_number)


def _apply_spot(
    state: SessionState,
    spot: KeywordSpot,
    catalog: Catalog,
    page_size: int,
    next_order_number: int,
) -> ActionResult:
    intent = spot.intent
    slots = spot.slot_values

    if intent == "search":
        query_tokens = slots.get("query")
        if not query_tokens:
            return ActionResult(
                state=state, speech="What should I search for?", action="none"
            )
        query_tokens = list(query_tokens)
        query = " ".join(query_tokens)
        results = catalog.search(query_tokens)
        page = Page(
            kind=SEARCH_RESULTS,
            query=query,
            page_index=0,
            result_ids=tuple(p.id for p in _page_slice(results, 0, page_size)),
        )
        shown = [catalog.get(pid) for pid in page.result_ids]
        return ActionResult(
            state=_goto(state, page),
            speech=_speak_results(query, 0, shown, len(results)),
            action="search",
            display={"query": query, "total": len(results)},
        )

    if intent in ("next_page", "previous_page"):
        if state.page.kind != SEARCH_RESULTS:
            return ActionResult(
                state=state, speech="There are no result pages here.", action="none"
            )
        results = catalog.search(normalize(state.page.query))
        delta = 1 if intent == "next_page" else -1
        new_index = state.page.page_index + delta
        max_index = max(0, (len(results) - 1) // page_size)
        if new_index < 0 or new_index > max_index:
            edge = "last" if delta > 0 else "first"
            return ActionResult(
                state=state,
                speech=f"You are already on the {edge} page.",
                action="none",
            )
        shown = _page_slice(results, new_index, page_size)
        page = Page(
            kind=SEARCH_RESULTS,
            query=state.page.query,
            page_index=new_index,
            result_ids=tuple(p.id for p in shown),
        )
        return ActionResult(
            state=_goto(state, page),
            speech=_speak_results(state.page.query, new_index, shown, len(results)),
            action=intent,
        )

    if intent == "select":
        product, problem = _resolve_product(state, catalog, slots)
        if product is None:
            return ActionResult(state=state, speech=problem, action="none")
        page = Page(kind=PRODUCT_DETAIL, product_id=product.id)
        stock = "In stock." if product.in_stock else "Currently out of stock."
        return ActionResult(
            state=_goto(state, page),
            speech=f"{product.title}. {format_minor(product.price_minor)}. {stock}",
            action="select",
            display={"product_id": product.id},
        )

    if intent == "describe":
        if state.page.kind != PRODUCT_DETAIL:
            return ActionResult(
                state=state,
                speech="Select a product first, then ask me to describe it.",
                action="none",
            )
        product = catalog.get(state.page.product_id)
        return ActionResult(
            state=state,
            speech=f"{product.title}. {product.description}",
            action="describe",
        )

    if intent == "add_to_cart":
        product, problem = _resolve_product(state, catalog, slots)
        if product is None:
            return ActionResult(state=state, speech=problem, action="none")
        if not product.in_stock:
            return ActionResult(
                state=state,
                speech=f"Sorry, {product.title} is out of stock.",
                action="none",
            )
        quantity = slots.get("quantity", 1)
        if quantity < 1:
            return ActionResult(
                state=state,
                speech="How many should I add? Say a number of one or more.",
                action="none",
            )
        cart = state.cart.add(product, quantity)
        line = cart.line_for(product.id)
        return ActionResult(
            state=replace(state, cart=cart),
            speech=(
                f"Added {quantity} x {product.title} to your cart. "
                f"You now have {line.quantity} of it. "
                f"Cart total {format_minor(cart.total_minor)}."
            ),
            action="add_to_cart",
            display={"product_id": product.id, "quantity": quantity},
        )

    if intent == "remove_from_cart":
        product, problem = _resolve_product(state, catalog, slots)
        if product is None:
            return ActionResult(state=state, speech=problem, action="none")
        line = state.cart.line_for(product.id)
        if line is None:
            return ActionResult(
                state=state,
                speech=f"{product.title} is not in your cart.",
                action="none",
            )
        cart = state.cart.with_quantity(product, 0)
        return ActionResult(
            state=replace(state, cart=cart),
            speech=(
                f"Removed {product.title} from your cart. "
                f"Cart total {format_minor(cart.total_minor)}."
            ),
            action="remove_from_cart",
            display={"product_id": product.id},
        )

    if intent == "quantity":
        count = slots.get("count")
        if count is None:
            return ActionResult(
                state=state, speech="How many? Say a number.", action="none"
            )
        product, problem = _resolve_product(state, catalog, slots)
        if product is None:
            return ActionResult(state=state, speech=problem, action="none")
        if count > 0 and state.cart.line_for(product.id) is None and not product.in_stock:
            return ActionResult(
                state=state,
                speech=f"Sorry, {product.title} is out of stock.",
                action="none",
            )
        cart = state.cart.with_quantity(product, count)
        if count == 0:
            speech = (
                f"Removed {product.title} from your cart. "
                f"Cart total {format_minor(cart.total_minor)}."
            )
        else:
            speech = (
                f"Set {product.title} to {count}. "
                f"Cart total {format_minor(cart.total_minor)}."
            )
        return ActionResult(
            state=replace(state, cart=cart),
            speech=speech,
            action="quantity",
            display={"product_id": product.id, "quantity": count},
        )

    if intent == "show_cart":
        return ActionResult(
            state=_goto(state, Page(kind=CART_VIEW)),
            speech=_speak_cart(state.cart, catalog),
            action="show_cart",
        )

    if intent == "checkout":
        if not state.cart.lines:
            return ActionResult(
                state=state,
                speech="Your cart is empty. Add something before checking out.",
                action="none",
            )
        return ActionResult(
            state=_goto(state, Page(kind=CHECKOUT_CONFIRM)),
            speech=(
                f"You are buying {state.cart.item_count} "
                f"item{'s' if state.cart.item_count != 1 else ''} "
                f"for {format_minor(state.cart.total_minor)}. "
                "Say confirm to place the order or cancel to keep shopping."
            ),
            action="checkout",
        )

    if intent == "confirm":
        if state.page.kind != CHECKOUT_CONFIRM:
            return ActionResult(
                state=state, speech="There is nothing to confirm right now.", action="none"
            )
        if not state.cart.lines:
            return ActionResult(
                state=state,
                speech="Your cart is empty, so there is nothing to order.",
                action="none",
            )
        order_id = f"order-{next_order_number}"
        total = state.cart.total_minor
        new_state = replace(
            state,
            page=Page(kind=ORDER_PLACED, order_id=order_id),
            history=state.history + (state.page,),
            cart=Cart(),
            orders_placed=state.orders_placed + 1,
        )
        return ActionResult(
            state=new_state,
            speech=(
                f"Order placed. Your order id is {order_id} and the total was "
                f"{format_minor(total)}. Thank you."
            ),
            action="confirm",
            display={"order_id": order_id, "total_minor": total},
        )

    if intent == "cancel":
        if state.page.kind == CHECKOUT_CONFIRM and state.history:
            previous = state.history[-1]
            return ActionResult(
                state=replace(state, page=previous, history=state.history[:-1]),
                speech="Checkout cancelled. Your cart is unchanged.",
                action="cancel",
            )
        return ActionResult(
            state=state, speech="Nothing to cancel right now.", action="none"
        )

    if intent == "go_back":
        if not state.history:
            return ActionResult(
                state=state, speech="You are at the start. There is nowhere to go back to.",
                action="none",
            )
        previous = state.history[-1]
        new_state = replace(state, page=previous, history=state.history[:-1])
        return ActionResult(
            state=new_state,
            speech=f"Back to {previous.kind.replace('_', ' ').lower()}.",
            action="go_back",
        )

    if intent == "go_home":
        return ActionResult(
            state=_goto(state, HOME_PAGE),
            speech="Back to the home page.",
            action="go_home",
        )

    if intent == "help":
        options = PAGE_HELP[state.page.kind]
        return ActionResult(
            state=state,
            speech=f"From here you can say: {', '.join(options)}. Say help anytime.",
            action="help",
        )

    return ActionResult(
        state=state,
        speech=f"I understood {intent.replace('_', ' ')}, but I cannot do that yet.",
        action="none",
    )
