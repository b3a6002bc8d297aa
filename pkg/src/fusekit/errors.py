"""Exception hierarchy shared by all fusekit modules."""
from __future__ import annotations


class FuseError(Exception):
    """Base class for every error raised by fusekit."""


class ParseError(FuseError, ValueError):
    """Malformed input line. Carries the file path and 1-based line number."""

    def __init__(self, message: str, lineno: int | None = None,
                 path: str | None = None) -> None:
        self.message = message
        self.lineno = lineno
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.path is not None:
            where.append(str(self.path))
        if self.lineno is not None:
            where.append(str(self.lineno))
        if where:
            return '%s: %s' % (':'.join(where), self.message)
        return self.message


class DanglingReferenceError(ParseError):
    """A reference to a sentence, node or structure that does not exist."""


class InvariantError(FuseError, ValueError):
    """A parsed or constructed object violates a structural invariant."""

    def __init__(self, message: str, sid: int | None = None) -> None:
        self.sid = sid
        if sid is not None:
            message = 'sentence %d: %s' % (sid, message)
        super().__init__(message)


class UnknownNodeError(FuseError, LookupError):
    """A node reference that is not part of the tree."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else 'unknown node'


class EmptySpanError(FuseError, ValueError):
    """Exclusions removed every token from a binding."""


class LoadError(FuseError):
    """A manifest or one of its files could not be loaded."""


class ValidationFailed(FuseError):
    """Strict loading found error-severity diagnostics."""

    def __init__(self, diagnostics) -> None:
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == 'error']
        super().__init__('%d error diagnostic(s); first: %s' % (
            len(errors), errors[0].format() if errors else '-'))


class IngestError(FuseError, ValueError):
    """Sentence-aligned input files are unusable."""
