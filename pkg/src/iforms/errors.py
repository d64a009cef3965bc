"""Shared exception types with a stable kind tag for the service/CLI layer."""
from __future__ import annotations


class IFormsError(Exception):
    """Base class for all engine errors."""

    kind = "domain"


class InputError(IFormsError):
    """Invalid input to an engine operation (arity/patch mismatch, bad degree, ...)."""

    kind = "domain"


class UnsupportedOperationError(InputError):
    """Operation deliberately not provided (e.g. slot permutations moving the last slot)."""

    kind = "domain"


class TruncationError(IFormsError):
    """A computation needs a jet coordinate beyond the patch order cap.

    Carries the order that would make the computation possible so callers
    can suggest a new cap.
    """

    kind = "truncation"

    def __init__(self, required_order: int, detail: str = ""):
        self.required_order = required_order
        msg = f"jet order cap exceeded: raise the order cap to at least {required_order}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ExprError(IFormsError):
    """Syntax or name-resolution error in the expression language."""

    kind = "syntax"

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at column {position + 1})"
        super().__init__(message)
