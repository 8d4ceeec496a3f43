"""Voice-commanded shopping engine with a speech-recognition evaluation toolkit.

Two halves share one text-normalization core:

  srseval    word-level scoring of recognizer output (WER, accuracies,
             phrase rates, sentence-level error composition)
  command + shop + provider + engine + service
             the voice-commerce pipeline: transcript events are normalized,
             keyword-spotted against an intent grammar, and folded into a
             session's page/cart state machine

Most callers want one of: `srseval.corpus_report`, `command.load_grammar`,
`shop.load_catalog`, `engine.SessionEngine`, or `service.create_app`.
"""

from .errors import (
    ConflictError,
    NotFoundError,
    OrderingError,
    SchemaError,
    UndefinedMetricError,
    VoiceShopError,
)

__version__ = "0.1.0"

__all__ = [
    "ConflictError",
    "NotFoundError",
    "OrderingError",
    "SchemaError",
    "UndefinedMetricError",
    "VoiceShopError",
    "__version__",
]
