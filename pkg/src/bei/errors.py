"""Exception hierarchy shared by every module."""

from __future__ import annotations


class BeiError(Exception):
    """Base class; ``kind`` is a short machine-readable tag."""

    kind = "error"

    def __init__(self, message: str, kind: str | None = None, **details):
        super().__init__(message)
        if kind:
            self.kind = kind
        self.details = details


class UnknownVertex(BeiError):
    kind = "unknown-vertex"


class InvalidSpec(BeiError):
    kind = "invalid-spec"


class CompositionError(BeiError):
    kind = "composition-error"


class GraphTooLarge(BeiError):
    kind = "graph-too-large"


class ResourceCapExceeded(BeiError):
    kind = "resource-cap-exceeded"


class NonHomogeneousInput(BeiError):
    kind = "nonhomogeneous-input"


class ShapeNotCovered(BeiError):
    kind = "shape-not-covered"


class Contradiction(BeiError):
    kind = "contradiction"


class DslError(BeiError):
    """Parse or semantic error with a 1-based line/column position."""

    kind = "syntax-error"

    def __init__(self, message, line, col, expected=(), kind=None):
        where = f"{line}:{col}: {message}"
        if expected:
            where += " (expected one of: " + ", ".join(sorted(expected)) + ")"
        super().__init__(where, line=line, col=col, expected=sorted(expected))
        self.line = line
        self.col = col
        self.expected = tuple(sorted(expected))
        if kind:
            self.kind = kind
