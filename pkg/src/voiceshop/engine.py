"""Session engine: transcript events fold into shop state.

The engine owns all business logic so the HTTP service and the offline
replay path produce identical results from identical event streams. Folding
is per-session serialized; sessions expire after 30 idle minutes against an
injectable clock.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from . import shop
from .command import CommandDecision, CommandGrammar, interpret
from .errors import NotFoundError, OrderingError
from .provider import ProviderScript, validate_event_payload
from .shop import ActionResult, Catalog, SessionState
from .textnorm import tokens_with_confidences

IDLE_TTL_SECONDS = 30 * 60

DEFERRED_SPEECH = "Listening."

PARTIAL_POLICIES = ("final_only", "eager")


def fold_event(
    state: SessionState,
    text: str,
    word_confidences: list[float] | None,
    grammar: CommandGrammar,
    catalog: Catalog,
    *,
    page_size: int = shop.DEFAULT_PAGE_SIZE,
    next_order_number: int = 1,
) -> tuple[ActionResult, CommandDecision]:
    """Interpret one utterance against a state and fold the decision in."""
    tokens, confidences = tokens_with_confidences(text, word_confidences)
    decision = interpret(tokens, confidences, grammar)
    result = shop.apply(
        state, decision, catalog,
        page_size=page_size, next_order_number=next_order_number,
    )
    return result, decision


def _decision_record(decision: CommandDecision) -> dict:
    spot = decision.spot
    return {
        "outcome": decision.outcome,
        "intent": spot.intent if spot else None,
        "slots": dict(spot.slot_values) if spot else None,
        "confidence": float(spot.confidence) if spot else None,
    }


@dataclass
class _Session:
    id: str
    state: SessionState = field(default_factory=SessionState)
    last_seq: int = -1
    next_order_number: int = 1
    last_active: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionEngine:
    """Holds live sessions and folds validated transcript events into them."""

    def __init__(
        self,
        grammar: CommandGrammar,
        catalog: Catalog,
        *,
        page_size: int = shop.DEFAULT_PAGE_SIZE,
        partial_policy: str = "final_only",
        clock=time.monotonic,
        idle_ttl_seconds: float = IDLE_TTL_SECONDS,
    ):
        if partial_policy not in PARTIAL_POLICIES:
            raise ValueError(f"partial_policy must be one of {PARTIAL_POLICIES}")
        self.grammar = grammar
        self.catalog = catalog
        self.page_size = page_size
        self.partial_policy = partial_policy
        self._clock = clock
        self._idle_ttl = idle_ttl_seconds
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()
        self._next_session = 1

    def create_session(self) -> str:
        with self._lock:
            session_id = f"s-{self._next_session}"
            self._next_session += 1
            self._sessions[session_id] = _Session(id=session_id, last_active=self._clock())
            return session_id

    def _checkout_session(self, session_id: str) -> _Session:
        """Look up a live session, expiring it first if it sat idle too long."""
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise NotFoundError(f"no session {session_id!r}")
            if self._clock() - session.last_active > self._idle_ttl:
                del self._sessions[session_id]
                raise NotFoundError(f"session {session_id!r} expired after idling")
            return session

    def session_count(self) -> int:
        with self._lock:
            return len(self._sessions)

    def ingest_event(self, session_id: str, payload: object) -> dict:
        """Validate and fold one transcript event; returns the event record.

        Partials never commit state. Under the default final_only policy they
        are deferred outright; under eager they are interpreted against the
        current state as a preview.
        """
        session = self._checkout_session(session_id)
        fields = validate_event_payload(payload)
        with session.lock:
            if fields["seq"] <= session.last_seq:
                raise OrderingError(
                    f"seq {fields['seq']} does not increase past {session.last_seq}"
                )
            session.last_seq = fields["seq"]
            session.last_active = self._clock()

            if not fields["is_final"] and self.partial_policy == "final_only":
                record = {
                    "outcome": "DEFERRED",
                    "intent": None,
                    "slots": None,
                    "confidence": None,
                    "action": "none",
                    "speech": DEFERRED_SPEECH,
                }
            else:
                confidences = fields["word_confidences"]
                result, decision = fold_event(
                    session.state,
                    fields["text"],
                    list(confidences) if confidences is not None else None,
                    self.grammar,
                    self.catalog,
                    page_size=self.page_size,
                    next_order_number=session.next_order_number,
                )
                record = _decision_record(decision)
                record["action"] = result.action
                record["speech"] = result.speech
                if fields["is_final"]:
                    if result.action == "confirm":
                        session.next_order_number += 1
                    session.state = result.state

            record["session_id"] = session.id
            record["seq"] = fields["seq"]
            record["is_final"] = fields["is_final"]
            record["committed"] = fields["is_final"]
            record["state"] = session.state.to_dict()
            return record

    def get_state(self, session_id: str) -> dict:
        session = self._checkout_session(session_id)
        with session.lock:
            session.last_active = self._clock()
            return {
                "session_id": session.id,
                "last_seq": session.last_seq,
                "state": session.state.to_dict(),
            }


def replay(
    script: ProviderScript,
    grammar: CommandGrammar,
    catalog: Catalog,
    *,
    page_size: int = shop.DEFAULT_PAGE_SIZE,
    partial_policy: str = "final_only",
) -> list[dict]:
    """Run a whole script through a fresh engine; delays are ignored.

    One record per scripted event, each echoing the event beside its outcome.
    A stale seq becomes an ordering-error outcome and the replay continues
    with the state untouched.
    """
    engine = SessionEngine(
        grammar, catalog, page_size=page_size, partial_policy=partial_policy
    )
    session_id = engine.create_session()
    records = []
    for line in script.lines:
        payload: dict = {"seq": line.seq, "text": line.text, "is_final": line.is_final}
        if line.word_confidences is not None:
            payload["word_confidences"] = list(line.word_confidences)
        try:
            outcome = engine.ingest_event(session_id, payload)
        except OrderingError as exc:
            outcome = {
                "error": {"code": exc.code, "message": str(exc)},
                "state": engine.get_state(session_id)["state"],
            }
        records.append({"event": payload, "outcome": outcome})
    return records
