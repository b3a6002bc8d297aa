"""The alignment layer: tagged links between predicate-argument structures of
a sentence pair, with argument links nested inside predicate links.

ALN format::

    #PAIR <document>:<sentence_number> <lang_a> <lang_b>
    PALIGN <pid_a> <pid_b> tags=<tag,...|->
    AALIGN <pid_a>.<aid_a> <pid_b>.<aid_b> tags=<tag,...|->
    #END

An AALIGN belongs to the nearest preceding PALIGN and must use its pids.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterator, NamedTuple, Optional

from .annot import AID_RE, PID_RE, PredArgStructure
from .diagnostics import Diagnostic, diag
from .errors import DanglingReferenceError, ParseError
from .textio import Source, join_list, read_lines, split_list
from .tree import SentenceTree
from .vocab import valid_tag

if TYPE_CHECKING:
    from .store import ParallelSet

_ARGREF_RE = re.compile(r'(P[1-9][0-9]*)\.(A[1-9][0-9]*)$')


@dataclass(frozen=True, order=True)
class SentencePair:
    document: str
    sentence_number: int
    lang_a: str
    lang_b: str

    def __post_init__(self):
        if self.lang_a == self.lang_b:
            raise ValueError('a sentence pair needs two different languages')
        if self.sentence_number < 1:
            raise ValueError('sentence_number must be >= 1')

    @property
    def key(self) -> tuple[str, int]:
        return self.document, self.sentence_number

    def mirrored(self) -> 'SentencePair':
        return SentencePair(self.document, self.sentence_number, self.lang_b,
                            self.lang_a)

    def __str__(self) -> str:
        return '%s:%d' % (self.document, self.sentence_number)


@dataclass(frozen=True)
class ArgAlignment:
    pid_a: str
    aid_a: str
    pid_b: str
    aid_b: str
    tags: tuple[str, ...] = ()

    def mirrored(self) -> 'ArgAlignment':
        return ArgAlignment(self.pid_b, self.aid_b, self.pid_a, self.aid_a,
                            self.tags)


@dataclass(frozen=True)
class PredicateAlignment:
    pair: SentencePair
    pid_a: str
    pid_b: str
    tags: tuple[str, ...] = ()
    arg_links: tuple[ArgAlignment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'tags', tuple(self.tags))
        object.__setattr__(self, 'arg_links', tuple(self.arg_links))

    def mirrored(self) -> 'PredicateAlignment':
        return PredicateAlignment(self.pair.mirrored(), self.pid_b, self.pid_a,
                                  self.tags,
                                  tuple(a.mirrored() for a in self.arg_links))


@dataclass
class AlignmentBlock:
    """All predicate alignments of one sentence pair, in file order."""
    pair: SentencePair
    links: list[PredicateAlignment] = field(default_factory=list)


class ResolvedAlignment(NamedTuple):
    alignment: PredicateAlignment
    tree_a: SentenceTree
    struct_a: PredArgStructure
    tree_b: SentenceTree
    struct_b: PredArgStructure


def resolve(pset: 'ParallelSet', pa: PredicateAlignment
            ) -> Optional[ResolvedAlignment]:
    """Look up both structures of ``pa``; None if either is missing."""
    if pa.pair not in pset.pair_registry:
        return None
    a = pset.store_a.structure(pa.pair.key, pa.pid_a)
    b = pset.store_b.structure(pa.pair.key, pa.pid_b)
    if a is None or b is None:
        return None
    return ResolvedAlignment(pa, a[0], a[1], b[0], b[1])


def resolved_alignments(pset: 'ParallelSet') -> Iterator[ResolvedAlignment]:
    for pa in pset.predicate_alignments():
        res = resolve(pset, pa)
        if res is not None:
            yield res


def arg_roles(res: ResolvedAlignment, link: ArgAlignment
              ) -> Optional[tuple[str, str]]:
    """Role names of an argument link, or None if it does not resolve."""
    if (link.pid_a, link.pid_b) != (res.alignment.pid_a, res.alignment.pid_b):
        return None
    arg_a = res.struct_a.argument(link.aid_a)
    arg_b = res.struct_b.argument(link.aid_b)
    if arg_a is None or arg_b is None:
        return None
    return arg_a.role, arg_b.role


# -- ALN reading ------------------------------------------------------------

def _tags(part: str, n: int, path: str | None) -> tuple[str, ...]:
    key, sep, value = part.partition('=')
    if key != 'tags' or not sep or not value:
        raise ParseError('expected tags=<tag,...|->', n, path)
    try:
        tags = split_list(value)
    except ValueError as err:
        raise ParseError(str(err), n, path) from None
    if not all(valid_tag(t) for t in tags) or len(set(tags)) != len(tags):
        raise ParseError('malformed tag list %r' % value, n, path)
    return tags


def parse_aln(data: Source, pset: 'ParallelSet', strict: bool = True,
              path: str | None = None) -> list[AlignmentBlock]:
    """Read ALN blocks and attach them to ``pset``.

    Syntax errors always raise.  With ``strict``, the first referential
    problem (dangling pid/aid, duplicate link, unknown tag, unregistered
    pair) raises too; otherwise those are reported by
    :func:`validate_alignment`.
    """
    lines = read_lines(data, path)
    blocks: list[AlignmentBlock] = []
    line_of: dict[int, int] = {}
    seen_pairs: set[tuple[str, int]] = set()
    n = 0
    while n < len(lines):
        line = lines[n]
        n += 1
        if not line:
            continue
        parts = line.split(' ')
        if parts[0] != '#PAIR' or len(parts) != 4:
            raise ParseError('expected #PAIR <document>:<number> <lang_a> '
                             '<lang_b>', n, path)
        doc, _, num = parts[1].rpartition(':')
        if not doc or not num.isdigit():
            raise ParseError('malformed sentence reference %r' % parts[1],
                             n, path)
        try:
            pair = SentencePair(doc, int(num), parts[2], parts[3])
        except ValueError as err:
            raise ParseError(str(err), n, path) from None
        if pair.key in seen_pairs:
            raise ParseError('second block for pair %s' % pair, n, path)
        seen_pairs.add(pair.key)
        block = AlignmentBlock(pair)
        line_of[id(block)] = n
        current = None  # [pid_a, pid_b, tags, args, lineno]
        while True:
            if n >= len(lines):
                raise ParseError('missing #END', n, path)
            parts = lines[n].split(' ')
            n += 1
            if parts[0] in ('PALIGN', '#END') and current is not None:
                pa = PredicateAlignment(pair, current[0], current[1],
                                        current[2], tuple(current[3]))
                block.links.append(pa)
                line_of[id(pa)] = current[4]
                for link, lineno in zip(pa.arg_links, current[5]):
                    line_of[id(link)] = lineno
                current = None
            if parts[0] == '#END':
                if len(parts) != 1:
                    raise ParseError('trailing text after #END', n, path)
                break
            elif parts[0] == 'PALIGN':
                if (len(parts) != 4 or not PID_RE.match(parts[1])
                        or not PID_RE.match(parts[2])):
                    raise ParseError('expected PALIGN <pid_a> <pid_b> '
                                     'tags=...', n, path)
                current = [parts[1], parts[2], _tags(parts[3], n, path), [],
                           n, []]
            elif parts[0] == 'AALIGN':
                if len(parts) != 4:
                    raise ParseError('expected AALIGN <pid>.<aid> <pid>.<aid> '
                                     'tags=...', n, path)
                ma = _ARGREF_RE.match(parts[1])
                mb = _ARGREF_RE.match(parts[2])
                if ma is None or mb is None:
                    raise ParseError('malformed argument reference', n, path)
                if current is None:
                    raise ParseError('AALIGN before any PALIGN', n, path)
                if (ma.group(1), mb.group(1)) != (current[0], current[1]):
                    raise ParseError('AALIGN %s %s does not belong to PALIGN '
                                     '%s %s' % (parts[1], parts[2], current[0],
                                                current[1]), n, path)
                current[3].append(ArgAlignment(
                    ma.group(1), ma.group(2), mb.group(1), mb.group(2),
                    _tags(parts[3], n, path)))
                current[5].append(n)
            else:
                raise ParseError('unexpected %r in pair block' % parts[0],
                                 n, path)
        blocks.append(block)
    if strict:
        for rule, message, obj, _ in _problems(pset, blocks):
            if rule == 'DANGLING_REF':
                raise DanglingReferenceError(message, line_of.get(id(obj)),
                                             path)
            raise ParseError('%s: %s' % (rule, message), line_of.get(id(obj)),
                             path)
    pset.alignment = blocks
    return blocks


def serialize_aln(blocks) -> str:
    out = []
    for block in blocks:
        pair = block.pair
        out.append('#PAIR %s %s %s\n' % (pair, pair.lang_a, pair.lang_b))
        for pa in block.links:
            out.append('PALIGN %s %s tags=%s\n' % (pa.pid_a, pa.pid_b,
                                                    join_list(pa.tags)))
            for link in pa.arg_links:
                out.append('AALIGN %s.%s %s.%s tags=%s\n' % (
                    link.pid_a, link.aid_a, link.pid_b, link.aid_b,
                    join_list(link.tags)))
        out.append('#END\n')
    return ''.join(out)


# -- validation and reports -------------------------------------------------

def _problems(pset: 'ParallelSet', blocks):
    """Yield (rule, message, offending object, (pair, pids, aids))."""
    tags = pset.vocab.align_tags
    seen_links: set = set()
    for block in blocks:
        pair = block.pair
        registered = pair in pset.pair_registry
        if not registered:
            yield ('PAIR_NOT_REGISTERED', 'pair %s %s-%s has no sentence in '
                   'one of the stores' % (pair, pair.lang_a, pair.lang_b),
                   block, (pair, '', ''))
        for pa in block.links:
            where = (pair, '%s/%s' % (pa.pid_a, pa.pid_b), '')
            for tag in pa.tags:
                if tag not in tags:
                    yield ('UNKNOWN_TAG', 'alignment tag %r is not declared'
                           % tag, pa, where)
            key = (pair.key, frozenset(((pair.lang_a, pa.pid_a),
                                        (pair.lang_b, pa.pid_b))))
            if key in seen_links:
                yield ('DUP_ALIGN', 'structures %s and %s of %s are aligned '
                       'twice' % (pa.pid_a, pa.pid_b, pair), pa, where)
            seen_links.add(key)
            res = resolve(pset, pa) if registered else None
            if registered and res is None:
                missing = [
                    '%s:%s' % (lang, pid) for lang, pid, store in (
                        (pair.lang_a, pa.pid_a, pset.store_a),
                        (pair.lang_b, pa.pid_b, pset.store_b))
                    if store.structure(pair.key, pid) is None]
                yield ('DANGLING_REF', 'no structure %s in sentence %s'
                       % (', '.join(missing), pair), pa, where)
            seen_roles: set = set()
            for link in pa.arg_links:
                where = (pair, '%s/%s' % (pa.pid_a, pa.pid_b),
                         '%s/%s' % (link.aid_a, link.aid_b))
                for tag in link.tags:
                    if tag not in tags:
                        yield ('UNKNOWN_TAG', 'alignment tag %r is not '
                               'declared' % tag, link, where)
                if (link.pid_a, link.pid_b) != (pa.pid_a, pa.pid_b):
                    yield ('ARG_WITHOUT_PRED_ALIGN', 'argument link %s.%s-%s.%s'
                           ' lies outside predicate alignment %s-%s' % (
                               link.pid_a, link.aid_a, link.pid_b, link.aid_b,
                               pa.pid_a, pa.pid_b), link, where)
                    continue
                if res is None:
                    continue
                roles = arg_roles(res, link)
                if roles is None:
                    yield ('DANGLING_REF', 'no argument %s.%s or %s.%s in %s'
                           % (link.pid_a, link.aid_a, link.pid_b, link.aid_b,
                              pair), link, where)
                    continue
                if roles in seen_roles:
                    yield ('DUP_ALIGN', 'roles %s and %s are linked twice'
                           % roles, link, where)
                seen_roles.add(roles)


def validate_alignment(pset: 'ParallelSet') -> list[Diagnostic]:
    out = []
    lang = '%s-%s' % (pset.lang_a, pset.lang_b)
    for rule, message, _, (pair, pids, aids) in _problems(pset,
                                                          pset.alignment):
        out.append(diag(rule, lang, pair.sentence_number,
                        '%s (%s)' % (message, pair.document), pid=pids,
                        aid=aids))
    return out


@dataclass(frozen=True, order=True)
class DanglingPredicate:
    lang: str
    sid: int
    pid: str
    name: str


@dataclass(frozen=True, order=True)
class DanglingArgument:
    lang: str
    sid: int
    pid: str
    aid: str
    role: str
    counterpart: str


@dataclass
class DanglingReport:
    predicates: list[DanglingPredicate]
    arguments: list[DanglingArgument]

    def __len__(self) -> int:
        return len(self.predicates) + len(self.arguments)


def dangling_report(pset: 'ParallelSet') -> DanglingReport:
    """Structures without any predicate alignment, and, per aligned pair of
    structures, arguments on either side that have no argument link."""
    aligned: set[tuple[str, int, str]] = set()
    args: set[DanglingArgument] = set()
    la, lb = pset.lang_a, pset.lang_b
    for res in resolved_alignments(pset):
        aligned.add((la, res.tree_a.sid, res.struct_a.pid))
        aligned.add((lb, res.tree_b.sid, res.struct_b.pid))
        linked_a, linked_b = set(), set()
        for link in res.alignment.arg_links:
            if arg_roles(res, link) is not None:
                linked_a.add(link.aid_a)
                linked_b.add(link.aid_b)
        for lang, tree, struct, linked, other in (
                (la, res.tree_a, res.struct_a, linked_a, res.struct_b.pid),
                (lb, res.tree_b, res.struct_b, linked_b, res.struct_a.pid)):
            for arg in struct.arguments:
                if arg.aid not in linked:
                    args.add(DanglingArgument(lang, tree.sid, struct.pid,
                                              arg.aid, arg.role, other))
    preds = []
    for store in (pset.store_a, pset.store_b):
        for block in store.annotations:
            for struct in block.structures:
                if (store.lang, block.tree.sid, struct.pid) not in aligned:
                    preds.append(DanglingPredicate(
                        store.lang, block.tree.sid, struct.pid,
                        struct.predicate.name))
    preds.sort(key=lambda d: (d.lang, d.sid, _idnum(d.pid)))
    return DanglingReport(preds, sorted(args, key=lambda d: (
        d.lang, d.sid, _idnum(d.pid), _idnum(d.aid), _idnum(d.counterpart))))


def _idnum(ident: str) -> int:
    """Numeric part of a ``P<k>``/``A<k>`` identifier, for natural ordering."""
    return int(ident[1:])
