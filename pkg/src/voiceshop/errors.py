"""Shared error types. Each carries a machine-readable code that the service
and CLI map onto HTTP statuses / exit codes."""


class VoiceShopError(Exception):
    code = "ERROR"


class SchemaError(VoiceShopError):
    """Malformed input document (catalog, grammar, script, event body)."""

    code = "SCHEMA"


class ConflictError(VoiceShopError):
    """Duplicate identifier or trigger phrase."""

    code = "CONFLICT"


class NotFoundError(VoiceShopError):
    """Unknown session or product id."""

    code = "NOT_FOUND"


class OrderingError(VoiceShopError):
    """Stale or duplicate event sequence number; the event was ignored."""

    code = "ORDERING"


class UndefinedMetricError(VoiceShopError):
    """Metric has no defined value (empty reference or empty corpus)."""

    code = "UNDEFINED_METRIC"
