"""Command grammar compilation and keyword spotting.

A grammar is a set of intents, each with trigger phrases and optional slots.
Spotting runs in one of four modes:

  ISOLATED    whole input is a single word matching a one-word trigger
  CONNECTED   whole input exactly equals a trigger phrase
  CONTINUOUS  triggers are spotted anywhere inside running speech
  SPONTANEOUS continuous spotting plus slot extraction for free-form queries

A trigger phrase may contain one interior gap marker ("add ... to my cart"
written with the ellipsis character); the tokens between the two anchors bind
to the intent's free-text slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ConflictError, SchemaError
from .textnorm import normalize, parse_ordinal, parse_quantity

MODES = ("ISOLATED", "CONNECTED", "CONTINUOUS", "SPONTANEOUS")
SLOT_KINDS = ("FREE_TEXT", "QUANTITY", "ORDINAL")
VOCAB_CLASSES = ("SMALL", "MEDIUM", "LARGE", "VERY_LARGE")

GAP_MARKERS = ("…", "...")

DEFAULT_CONFIDENCE_THRESHOLD = 0.5

NO_MATCH_TEMPLATE = (
    'Sorry, I did not recognize a command in "{utterance}". '
    "Say help to hear what you can say."
)
LOW_CONFIDENCE_TEMPLATE = (
    'I heard "{utterance}" and think you meant {intent}, '
    "but I am not confident. Please say it again."
)


def classify_vocabulary(distinct_phrase_count: int) -> str:
    """Map a distinct trigger-phrase count onto a vocabulary size class."""
    if distinct_phrase_count < 1:
        raise SchemaError("grammar has no trigger phrases")
    if distinct_phrase_count <= 100:
        return "SMALL"
    if distinct_phrase_count <= 1000:
        return "MEDIUM"
    if distinct_phrase_count <= 10000:
        return "LARGE"
    return "VERY_LARGE"


@dataclass(frozen=True)
class Trigger:
    """One trigger phrase; gapped triggers carry a second anchor after the gap."""

    anchor: tuple[str, ...]
    tail: tuple[str, ...] | None = None  # second anchor, None for plain phrases

    @property
    def gapped(self) -> bool:
        return self.tail is not None

    @property
    def anchor_token_count(self) -> int:
        return len(self.anchor) + (len(self.tail) if self.tail else 0)

    def phrase(self) -> str:
        if self.tail is None:
            return " ".join(self.anchor)
        return " ".join(self.anchor) + " … " + " ".join(self.tail)


@dataclass(frozen=True)
class Slot:
    name: str
    kind: str  # FREE_TEXT | QUANTITY | ORDINAL


@dataclass(frozen=True)
class Intent:
    name: str
    triggers: tuple[Trigger, ...]
    slots: tuple[Slot, ...] = ()
    description: str = ""

    def free_text_slot(self) -> Slot | None:
        for slot in self.slots:
            if slot.kind == "FREE_TEXT":
                return slot
        return None


@dataclass(frozen=True)
class CommandGrammar:
    intents: tuple[Intent, ...]
    mode: str
    confidence_threshold: float
    vocab_class: str

    def intent(self, name: str) -> Intent:
        for it in self.intents:
            if it.name == name:
                return it
        raise KeyError(name)


@dataclass(frozen=True)
class KeywordSpot:
    intent: str
    span: tuple[int, int]  # [start, end) token indices
    confidence: Fraction
    slot_values: dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class CommandDecision:
    outcome: str  # MATCHED | NO_MATCH | LOW_CONFIDENCE
    spot: KeywordSpot | None = None
    speech_fallback: str | None = None


def _parse_trigger(phrase: str, intent_name: str) -> Trigger:
    parts = phrase.split()
    gap_positions = [i for i, p in enumerate(parts) if p in GAP_MARKERS]
    if len(gap_positions) > 1:
        raise SchemaError(
            f"intent {intent_name!r}: trigger {phrase!r} has more than one gap marker"
        )
    if gap_positions:
        gap = gap_positions[0]
        anchor = normalize(" ".join(parts[:gap]))
        tail = normalize(" ".join(parts[gap + 1:]))
        if not anchor or not tail:
            raise SchemaError(
                f"intent {intent_name!r}: gap marker in {phrase!r} must be interior"
            )
        return Trigger(anchor=tuple(anchor), tail=tuple(tail))
    tokens = normalize(phrase)
    if not tokens:
        raise SchemaError(f"intent {intent_name!r}: trigger {phrase!r} normalizes to nothing")
    return Trigger(anchor=tuple(tokens))


def compile_grammar(document: dict) -> CommandGrammar:
    """Compile a grammar description (parsed JSON document) into a CommandGrammar.

    Trigger phrases are normalized and must be unique across intents; the
    vocabulary class is derived from the distinct phrase count.
    """
    if not isinstance(document, dict):
        raise SchemaError("grammar document must be an object")
    mode = document.get("mode", "SPONTANEOUS")
    if mode not in MODES:
        raise SchemaError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    threshold = document.get("confidence_threshold", DEFAULT_CONFIDENCE_THRESHOLD)
    if not isinstance(threshold, (int, float)) or not 0 <= threshold <= 1:
        raise SchemaError("confidence_threshold must be a number in [0, 1]")

    raw_intents = document.get("intents")
    if not isinstance(raw_intents, list) or not raw_intents:
        raise SchemaError("grammar needs a nonempty intents list")

    intents: list[Intent] = []
    seen_phrases: dict[str, str] = {}  # phrase -> intent name
    for idx, raw in enumerate(raw_intents):
        where = f"intents[{idx}]"
        if not isinstance(raw, dict) or not raw.get("name"):
            raise SchemaError(f"{where}: intent needs a name")
        name = raw["name"]
        if any(it.name == name for it in intents):
            raise ConflictError(f"duplicate intent name {name!r}")
        raw_triggers = raw.get("triggers")
        if not isinstance(raw_triggers, list) or not raw_triggers:
            raise SchemaError(f"{where}: intent {name!r} needs a nonempty triggers list")
        triggers = []
        for phrase in raw_triggers:
            trigger = _parse_trigger(phrase, name)
            key = trigger.phrase()
            if key in seen_phrases and seen_phrases[key] != name:
                raise ConflictError(
                    f"trigger phrase {key!r} is claimed by both "
                    f"{seen_phrases[key]!r} and {name!r}"
                )
            seen_phrases.setdefault(key, name)
            triggers.append(trigger)
        slots = []
        slot_names = set()
        for raw_slot in raw.get("slots", []):
            if not isinstance(raw_slot, dict) or "name" not in raw_slot or "kind" not in raw_slot:
                raise SchemaError(f"{where}: slots need name and kind")
            if raw_slot["kind"] not in SLOT_KINDS:
                raise SchemaError(
                    f"{where}: unknown slot kind {raw_slot['kind']!r}"
                )
            if raw_slot["name"] in slot_names:
                raise SchemaError(f"{where}: duplicate slot name {raw_slot['name']!r}")
            slot_names.add(raw_slot["name"])
            slots.append(Slot(name=raw_slot["name"], kind=raw_slot["kind"]))
        if sum(1 for s in slots if s.kind == "FREE_TEXT") > 1:
            raise SchemaError(f"{where}: at most one FREE_TEXT slot per intent")
        intent = Intent(
            name=name,
            triggers=tuple(triggers),
            slots=tuple(slots),
            description=raw.get("description", ""),
        )
        if any(t.gapped for t in triggers) and intent.free_text_slot() is None:
            raise SchemaError(
                f"{where}: gapped triggers need a FREE_TEXT slot to bind the gap"
            )
        intents.append(intent)

    return CommandGrammar(
        intents=tuple(intents),
        mode=mode,
        confidence_threshold=float(threshold),
        vocab_class=classify_vocabulary(len(seen_phrases)),
    )


def load_grammar(path: str | Path) -> CommandGrammar:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return compile_grammar(doc)


# ---------------------------------------------------------------------------
# Spotting

@dataclass(frozen=True)
class _Candidate:
    start: int
    end: int
    gap: tuple[int, int] | None
    intent: Intent
    trigger: Trigger
    order: tuple  # deterministic ranking key within equal spans

    @property
    def length(self) -> int:
        return self.end - self.start


def _find_subsequence(tokens: list[str], phrase: tuple[str, ...], start: int = 0) -> int:
    k = len(phrase)
    for s in range(start, len(tokens) - k + 1):
        if tuple(tokens[s:s + k]) == phrase:
            return s
    return -1


def _candidates(tokens: list[str], grammar: CommandGrammar) -> list[_Candidate]:
    found = []
    for intent_idx, intent in enumerate(grammar.intents):
        for trigger_idx, trigger in enumerate(intent.triggers):
            s = 0
            while True:
                s = _find_subsequence(tokens, trigger.anchor, s)
                if s < 0:
                    break
                anchor_end = s + len(trigger.anchor)
                if trigger.tail is None:
                    found.append(_Candidate(
                        start=s, end=anchor_end, gap=None,
                        intent=intent, trigger=trigger,
                        order=(intent_idx, trigger_idx),
                    ))
                else:
                    # nearest following second anchor; the gap may be empty
                    t = _find_subsequence(tokens, trigger.tail, anchor_end)
                    if t >= 0:
                        found.append(_Candidate(
                            start=s, end=t + len(trigger.tail),
                            gap=(anchor_end, t),
                            intent=intent, trigger=trigger,
                            order=(intent_idx, trigger_idx),
                        ))
                s += 1
    return found


def _select_non_overlapping(candidates: list[_Candidate]) -> list[_Candidate]:
    """Longest-match-first, leftmost-first; overlapping candidates lose."""
    ranked = sorted(
        candidates,
        key=lambda c: (-c.length, c.start, -c.trigger.anchor_token_count, c.order),
    )
    taken: list[_Candidate] = []
    for cand in ranked:
        if all(cand.end <= t.start or cand.start >= t.end for t in taken):
            taken.append(cand)
    taken.sort(key=lambda c: c.start)
    return taken


def _mean_confidence(confidences: list[float], start: int, end: int) -> Fraction:
    total = sum(Fraction(c) for c in confidences[start:end])
    return total / (end - start)


def _extract_slots(
    cand: _Candidate, tokens: list[str], window_end: int
) -> dict[str, object]:
    """Fill the candidate's slots from its gap and trailing window."""
    values: dict[str, object] = {}
    gap_tokens: list[str] = []
    gap_bound: str | None = None
    if cand.gap is not None:
        slot = cand.intent.free_text_slot()
        if slot is not None:
            gap_tokens = tokens[cand.gap[0]:cand.gap[1]]
            if gap_tokens:
                values[slot.name] = list(gap_tokens)
            gap_bound = slot.name
    window = tokens[cand.end:window_end]
    # numeric slots may be spoken inside the gap ("add two ... to my cart")
    numeric_scan = gap_tokens + window
    for slot in cand.intent.slots:
        if slot.name == gap_bound:
            continue
        if slot.kind == "FREE_TEXT":
            if window:
                values[slot.name] = list(window)
        elif slot.kind == "QUANTITY":
            for token in numeric_scan:
                qty = parse_quantity(token)
                if qty is not None:
                    values[slot.name] = qty
                    break
        elif slot.kind == "ORDINAL":
            for token in numeric_scan:
                pos = parse_ordinal(token)
                if pos is not None:
                    values[slot.name] = pos
                    break
    return values


def spot(
    tokens: list[str],
    word_confidences: list[float] | None,
    grammar: CommandGrammar,
) -> list[KeywordSpot]:
    """Spot trigger-phrase occurrences in a normalized token list.

    Returns non-overlapping spots in ascending span order; the empty list
    means nothing was spotted. Confidence of a spot is the exact mean of the
    word confidences over its span.
    """
    if word_confidences is None:
        word_confidences = [1.0] * len(tokens)
    if len(word_confidences) != len(tokens):
        raise ValueError(
            f"word_confidences length {len(word_confidences)} does not match "
            f"token count {len(tokens)}"
        )
    if not tokens:
        return []

    if grammar.mode in ("ISOLATED", "CONNECTED"):
        whole = tuple(tokens)
        for intent in grammar.intents:
            for trigger in intent.triggers:
                if trigger.gapped:
                    continue
                if trigger.anchor != whole:
                    continue
                if grammar.mode == "ISOLATED" and len(trigger.anchor) != 1:
                    continue
                return [KeywordSpot(
                    intent=intent.name,
                    span=(0, len(tokens)),
                    confidence=_mean_confidence(word_confidences, 0, len(tokens)),
                )]
        return []

    selected = _select_non_overlapping(_candidates(tokens, grammar))
    spots = []
    for idx, cand in enumerate(selected):
        if grammar.mode == "SPONTANEOUS":
            window_end = selected[idx + 1].start if idx + 1 < len(selected) else len(tokens)
            slot_values = _extract_slots(cand, tokens, window_end)
        else:
            slot_values = {}
        spots.append(KeywordSpot(
            intent=cand.intent.name,
            span=(cand.start, cand.end),
            confidence=_mean_confidence(word_confidences, cand.start, cand.end),
            slot_values=slot_values,
        ))
    return spots


def interpret(
    tokens: list[str],
    word_confidences: list[float] | None,
    grammar: CommandGrammar,
) -> CommandDecision:
    """Turn one utterance into a single command decision.

    The highest-confidence spot wins (ties: leftmost span, then longest span,
    then intent name). No spot, or a best spot below the grammar's confidence
    threshold, yields a decision that carries fallback speech.
    """
    utterance = " ".join(tokens)
    spots = spot(tokens, word_confidences, grammar)
    if not spots:
        return CommandDecision(
            outcome="NO_MATCH",
            speech_fallback=NO_MATCH_TEMPLATE.format(utterance=utterance),
        )
    best = min(
        spots,
        key=lambda s: (-s.confidence, s.span[0], s.span[0] - s.span[1], s.intent),
    )
    if best.confidence < Fraction(grammar.confidence_threshold):
        return CommandDecision(
            outcome="LOW_CONFIDENCE",
            spot=best,
            speech_fallback=LOW_CONFIDENCE_TEMPLATE.format(
                utterance=utterance, intent=best.intent
            ),
        )
    return CommandDecision(outcome="MATCHED", spot=best)
