"""Speech-provider boundary: transcript events in, speech text out.

Real deployments plug a streaming recognizer here; the package ships a
scripted provider that replays transcript events from a JSONL file so every
downstream behavior is reproducible. Scripts are validated in full at load
time so a malformed line fails fast instead of mid-replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError

MAX_TEXT_CHARS = 10_000


@dataclass(frozen=True)
class TranscriptEvent:
    """One recognizer emission; word_confidences align with whitespace words."""

    session_id: str
    seq: int
    text: str
    is_final: bool
    word_confidences: tuple[float, ...] | None = None
    keyword_hints: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out: dict = {
            "session_id": self.session_id,
            "seq": self.seq,
            "text": self.text,
            "is_final": self.is_final,
        }
        if self.word_confidences is not None:
            out["word_confidences"] = list(self.word_confidences)
        if self.keyword_hints:
            out["keyword_hints"] = list(self.keyword_hints)
        return out


def validate_event_payload(payload: object, where: str = "event") -> dict:
    """Check one event body (parsed JSON) and return it normalized.

    Returns a dict with keys seq, text, is_final, word_confidences (tuple or
    None). Raises SchemaError on any shape problem.
    """
    if not isinstance(payload, dict):
        raise SchemaError(f"{where}: must be an object")
    unknown = set(payload) - {"seq", "text", "is_final", "word_confidences", "delay_ms"}
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")

    seq = payload.get("seq")
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
        raise SchemaError(f"{where}: seq must be a nonnegative integer")

    text = payload.get("text")
    if not isinstance(text, str):
        raise SchemaError(f"{where}: text must be a string")
    if len(text) > MAX_TEXT_CHARS:
        raise SchemaError(
            f"{where}: text has {len(text)} characters; the limit is {MAX_TEXT_CHARS}"
        )

    is_final = payload.get("is_final")
    if not isinstance(is_final, bool):
        raise SchemaError(f"{where}: is_final must be a boolean")

    confidences = payload.get("word_confidences")
    if confidences is not None:
        if not isinstance(confidences, list) or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in confidences
        ):
            raise SchemaError(f"{where}: word_confidences must be a list of numbers")
        if any(not 0 <= c <= 1 for c in confidences):
            raise SchemaError(f"{where}: word confidences must lie in [0, 1]")
        if len(confidences) != len(text.split()):
            raise SchemaError(
                f"{where}: {len(confidences)} confidences for "
                f"{len(text.split())} words"
            )
        confidences = tuple(float(c) for c in confidences)

    delay_ms = payload.get("delay_ms", 0)
    if not isinstance(delay_ms, int) or isinstance(delay_ms, bool) or delay_ms < 0:
        raise SchemaError(f"{where}: delay_ms must be a nonnegative integer")

    return {
        "seq": seq,
        "text": text,
        "is_final": is_final,
        "word_confidences": confidences,
        "delay_ms": delay_ms,
    }


@dataclass(frozen=True)
class ScriptLine:
    seq: int
    text: str
    is_final: bool
    word_confidences: tuple[float, ...] | None
    delay_ms: int


@dataclass(frozen=True)
class ProviderScript:
    lines: tuple[ScriptLine, ...]

    def __len__(self) -> int:
        return len(self.lines)


def parse_script(source: str, name: str = "script") -> ProviderScript:
    """Parse a JSONL transcript script, validating every line's shape up front.

    An empty script is legal (replays to nothing). Seq ordering is not checked
    here: a stale seq is an ingest-time ordering error, not a load failure.
    A script must not end on a partial; every partial run needs its final.
    """
    lines: list[ScriptLine] = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        if not raw.strip():
            continue
        where = f"{name}:{lineno}"
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{where}: invalid JSON ({exc})") from exc
        lines.append(ScriptLine(**validate_event_payload(payload, where)))
    if lines and not lines[-1].is_final:
        raise SchemaError(f"{name}: script ends on a partial event")
    return ProviderScript(lines=tuple(lines))


def load_script(path: str | Path) -> ProviderScript:
    path = Path(path)
    return parse_script(path.read_text(encoding="utf-8"), name=path.name)


class ScriptedProvider:
    """Replays a validated script as TranscriptEvents for one session."""

    def __init__(self, script: ProviderScript):
        self._script = script

    def events(self, session_id: str):
        for line in self._script.lines:
            yield TranscriptEvent(
                session_id=session_id,
                seq=line.seq,
                text=line.text,
                is_final=line.is_final,
                word_confidences=line.word_confidences,
            )

    def delays_ms(self) -> list[int]:
        return [line.delay_ms for line in self._script.lines]


@dataclass
class TextPassthroughTts:
    """Text-to-speech stand-in: records utterances instead of synthesizing."""

    spoken: list[str] = field(default_factory=list)

    def speak(self, text: str) -> str:
        if not text:
            raise ValueError("refusing to speak empty text")
        self.spoken.append(text)
        return text
