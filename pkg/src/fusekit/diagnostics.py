"""Validation findings shared by the annotation and alignment validators."""
from __future__ import annotations

from dataclasses import dataclass

ERROR = 'error'
WARNING = 'warning'

# rule id -> default severity
RULES = {
    'UNBOUND': ERROR,
    'EMPTY_SPAN': ERROR,
    'EXCL_NOT_DOMINATED': ERROR,
    'RECURSION': ERROR,
    'ROLE_NOT_IN_GROUP': WARNING,
    'DUP_ROLE': ERROR,
    'UNKNOWN_TAG': ERROR,
    'DANGLING_REF': ERROR,
    'ARG_WITHOUT_PRED_ALIGN': ERROR,
    'DUP_ALIGN': ERROR,
    'PAIR_NOT_REGISTERED': ERROR,
}


@dataclass(frozen=True, order=True)
class Diagnostic:
    lang: str
    sid: int
    pid: str
    aid: str
    rule: str
    severity: str
    message: str

    @property
    def location(self) -> str:
        loc = '%s:%d' % (self.lang, self.sid)
        if self.pid:
            loc += ':' + self.pid
            if self.aid:
                loc += '.' + self.aid
        return loc

    def format(self) -> str:
        return '%s\t%s\t%s\t%s' % (self.severity, self.rule, self.location,
                                   self.message)


def diag(rule: str, lang: str, sid: int, message: str, pid: str = '',
         aid: str = '', severity: str | None = None) -> Diagnostic:
    return Diagnostic(lang, sid, pid, aid, rule, severity or RULES[rule],
                      message)


def has_errors(diagnostics) -> bool:
    return any(d.severity == ERROR for d in diagnostics)
