"""Exception types shared across the package."""

from __future__ import annotations


class TwotermError(Exception):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(TwotermError):
    """Source text could not be parsed.

    Carries the byte offset of the failure and the set of token kinds that
    would have been accepted at that position.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected: " + ", ".join(sorted(expected)) + ")"
        super().__init__(detail)
        self.offset = offset
        self.expected = tuple(sorted(expected))


class UnknownNameError(ExprSyntaxError):
    """An identifier is neither the variable 'x', a constant, nor a known function."""

    def __init__(self, name: str, offset: int, is_call: bool):
        kind = "function" if is_call else "variable"
        TwotermError.__init__(self, f"unknown {kind} name {name!r} at offset {offset}")
        self.offset = offset
        self.expected = ()
        self.name = name
        self.is_call = is_call


class EvalDomainError(TwotermError):
    """Evaluation left the mathematical domain of some subexpression."""

    def __init__(self, subexpression: str, x: float, reason: str):
        super().__init__(f"domain violation in {subexpression!r} at x={x!r}: {reason}")
        self.subexpression = subexpression
        self.x = x
        self.reason = reason


class NonFiniteError(TwotermError):
    """An intermediate or final value overflowed or became non-finite."""

    def __init__(self, subexpression: str, x: float):
        super().__init__(f"non-finite value in {subexpression!r} at x={x!r}")
        self.subexpression = subexpression
        self.x = x


class PrecisionLossError(TwotermError):
    """Predicted rounding noise exceeds what the requested tolerance can absorb.

    Raised by samplers that subtract nearly equal quantities; the limit
    machinery treats it as a terminal mesh truncation, like overflow.
    """


class EvaluationError(TwotermError):
    """Too few mesh points could be evaluated to support any verdict."""


class QuadratureError(TwotermError):
    """A quadrature panel produced a non-finite result."""

    def __init__(self, panel: tuple[float, float], detail: str = ""):
        msg = f"quadrature failed on panel [{panel[0]!r}, {panel[1]!r}]"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.panel = panel


class ScaleInvalid(TwotermError):
    """A candidate comparison pair failed validation.

    ``clause`` names the first violated requirement; ``witness`` is a point
    (or description) exhibiting the failure.
    """

    def __init__(self, clause: str, witness: object, detail: str = ""):
        msg = f"scale validation failed [{clause}] at {witness!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.clause = clause
        self.witness = witness
        self.detail = detail
