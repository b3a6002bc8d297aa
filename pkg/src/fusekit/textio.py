"""Reading line-oriented UTF-8/LF input from bytes, text or file objects."""
from __future__ import annotations

from typing import IO, Union

from .errors import ParseError

Source = Union[bytes, bytearray, str, IO[bytes], IO[str]]


def read_lines(data: Source, path: str | None = None) -> list[str]:
    """Return the lines of ``data`` without their LF terminators.

    Rejects invalid UTF-8 and CR characters; a missing final LF is tolerated.
    """
    if hasattr(data, 'read'):
        data = data.read()
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode('utf-8')
        except UnicodeDecodeError as err:
            raise ParseError('invalid UTF-8 at byte %d' % err.start,
                             path=path) from None
    else:
        text = data
    if not text:
        return []
    lines = text.split('\n')
    if lines[-1] == '':
        lines.pop()
    for n, line in enumerate(lines, 1):
        if '\r' in line:
            raise ParseError('CR character; files must use LF line endings',
                             n, path)
    return lines


def split_list(value: str) -> tuple[str, ...]:
    """Parse a comma-separated field where ``-`` denotes the empty set."""
    if value == '-':
        return ()
    items = tuple(value.split(','))
    if any(not item for item in items):
        raise ValueError('empty item in list %r' % value)
    return items


def join_list(items) -> str:
    items = [str(item) for item in items]
    return ','.join(items) if items else '-'
