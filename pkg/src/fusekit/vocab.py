"""Closed-but-extensible tag vocabularies (predicate classes, binding tags,
alignment tags).  Manifests may add entries with ``VOCAB <kind> += <tag>``."""
from __future__ import annotations

import re
from dataclasses import dataclass

KINDS = ('class', 'bindtag', 'aligntag')
DEFAULTS = {
    'class': ('V', 'N', 'A'),
    'bindtag': ('pv', 'oc', 'oc-case'),
    'aligntag': ('incomp', 'abs-opp'),
}
_TAG_RE = re.compile(r'[^\s,=]+$')


@dataclass(frozen=True)
class Vocab:
    classes: tuple[str, ...] = DEFAULTS['class']
    binding_tags: tuple[str, ...] = DEFAULTS['bindtag']
    align_tags: tuple[str, ...] = DEFAULTS['aligntag']

    def get(self, kind: str) -> tuple[str, ...]:
        return {'class': self.classes, 'bindtag': self.binding_tags,
                'aligntag': self.align_tags}[kind]

    def extend(self, kind: str, tag: str) -> 'Vocab':
        if kind not in KINDS:
            raise ValueError('unknown vocabulary %r; expected one of %s'
                             % (kind, ', '.join(KINDS)))
        if tag == '-' or not _TAG_RE.match(tag):
            raise ValueError('malformed tag %r' % tag)
        current = self.get(kind)
        if tag in current:
            return self
        attr = {'class': 'classes', 'bindtag': 'binding_tags',
                'aligntag': 'align_tags'}[kind]
        return Vocab(**{**self.__dict__, attr: current + (tag, )})

    def extensions(self) -> list[tuple[str, str]]:
        """(kind, tag) pairs beyond the defaults, in declaration order."""
        return [(kind, tag) for kind in KINDS for tag in self.get(kind)
                if tag not in DEFAULTS[kind]]


DEFAULT_VOCAB = Vocab()


def valid_tag(tag: str) -> bool:
    return tag != '-' and bool(_TAG_RE.match(tag))
