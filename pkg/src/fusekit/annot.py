"""Predicate-argument structures and the binding layer.

A structure is one predicate plus a flat list of role-named arguments.  Both
the predicate and each argument are *bound* to the constituent tree: a binding
includes one or more nodes and may exclude sub-nodes, so the bound token span
can be discontinuous.  Structures are exchanged in the PAA text format::

    #SENT <document>:<sentence_number>:<lang>
    PRED <pid> name=<NAME> dis=<n> class=<CLASS> group=<GROUP>
    PBIND <pid> nodes=<ref,...> excl=<ref,...|-> tags=<tag,...|->
    ARG <pid> <aid> role=<ROLE>
    ABIND <pid> <aid> nodes=<ref,...> excl=<ref,...|-> tags=<tag,...|->
    #END
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Iterator, Optional

from .diagnostics import Diagnostic, diag
from .errors import (DanglingReferenceError, EmptySpanError, ParseError,
                     UnknownNodeError)
from .textio import Source, join_list, read_lines, split_list
from .tree import NodeLike, OriginRef, Ref, SentenceTree, as_ref, dominates
from .vocab import valid_tag

if TYPE_CHECKING:
    from .store import TreebankStore

PID_RE = re.compile(r'P[1-9][0-9]*$')
AID_RE = re.compile(r'A[1-9][0-9]*$')
ROLE_RE = re.compile(r'[A-Z0-9_]+$')
_NAME_FORBIDDEN = re.compile(r'[\s=,]')


@dataclass(frozen=True, order=True)
class PredicateEntry:
    """A lexicon entry: citation form, disambiguator, class and group."""
    name: str
    dis: int
    pclass: str
    group: str

    @property
    def key(self) -> tuple[str, int]:
        return self.name, self.dis


@dataclass(frozen=True)
class Binding:
    included: tuple[Ref, ...]
    excluded: tuple[Ref, ...] = ()
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'included',
                           tuple(as_ref(r) for r in self.included))
        object.__setattr__(self, 'excluded',
                           tuple(as_ref(r) for r in self.excluded))
        object.__setattr__(self, 'tags', tuple(self.tags))
        if not self.included:
            raise ValueError('a binding must include at least one node')
        refs = self.included + self.excluded
        if len(set(refs)) != len(refs):
            raise ValueError('node listed twice in binding')
        if len(set(self.tags)) != len(self.tags):
            raise ValueError('tag listed twice in binding')

    def refs(self) -> tuple[Ref, ...]:
        return self.included + self.excluded


@dataclass(frozen=True)
class Argument:
    aid: str
    role: str
    binding: Optional[Binding]


@dataclass(frozen=True)
class PredArgStructure:
    pid: str
    predicate: PredicateEntry
    binding: Optional[Binding]
    arguments: tuple[Argument, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'arguments', tuple(self.arguments))

    def argument(self, aid: str) -> Optional[Argument]:
        for arg in self.arguments:
            if arg.aid == aid:
                return arg
        return None


@dataclass
class AnnotatedSentence:
    """The PAA block for one sentence."""
    tree: SentenceTree
    structures: list[PredArgStructure] = field(default_factory=list)

    def structure(self, pid: str) -> Optional[PredArgStructure]:
        for struct in self.structures:
            if struct.pid == pid:
                return struct
        return None


def resolve_binding(binding: Binding, tree: SentenceTree) -> tuple[int, ...]:
    """Tokens under any included node minus tokens under any excluded node."""
    span: set[int] = set()
    for ref in binding.included:
        span |= tree.yield_set(ref)
    for ref in binding.excluded:
        span -= tree.yield_set(ref)
    if not span:
        raise EmptySpanError('sentence %d: binding %s resolves to no tokens'
                             % (tree.sid, format_binding(binding)))
    return tuple(sorted(span))


def format_binding(binding: Binding) -> str:
    return 'nodes=%s excl=%s tags=%s' % (join_list(binding.included),
                                         join_list(binding.excluded),
                                         join_list(binding.tags))


def role_inventory(store: 'TreebankStore', group: str) -> frozenset[str]:
    """All role names used by structures whose predicate is in ``group``."""
    return store.role_inventory(group)


# -- PAA reading ------------------------------------------------------------

def _fields(parts: list[str], keys: tuple[str, ...], n: int,
            path: str | None) -> list[str]:
    if len(parts) != len(keys):
        raise ParseError('expected fields %s' % ' '.join(k + '=' for k in keys),
                         n, path)
    values = []
    for part, key in zip(parts, keys):
        k, sep, v = part.partition('=')
        if k != key or not sep or not v:
            raise ParseError('expected %s=<value>, got %r' % (key, part),
                             n, path)
        values.append(v)
    return values


def _parse_binding(parts: list[str], tree: SentenceTree, n: int,
                   path: str | None) -> Binding:
    nodes, excl, tags = _fields(parts, ('nodes', 'excl', 'tags'), n, path)
    try:
        included = [Ref.parse(r) for r in split_list(nodes)]
        excluded = [Ref.parse(r) for r in split_list(excl)]
        tag_list = split_list(tags)
    except ValueError as err:
        raise ParseError(str(err), n, path) from None
    if not included:
        raise ParseError('nodes= must name at least one node', n, path)
    refs = included + excluded
    if len(set(refs)) != len(refs):
        raise ParseError('node listed twice in binding', n, path)
    for ref in refs:
        if ref not in tree:
            raise DanglingReferenceError(
                'sentence %d (%s) has no node %s' % (tree.sid, tree.origin, ref),
                n, path)
    for tag in tag_list:
        if not valid_tag(tag):
            raise ParseError('malformed tag %r' % tag, n, path)
    if len(set(tag_list)) != len(tag_list):
        raise ParseError('tag listed twice in binding', n, path)
    return Binding(tuple(included), tuple(excluded), tag_list)


def _parse_predicate(parts: list[str], store: 'TreebankStore', n: int,
                     path: str | None) -> PredicateEntry:
    name, dis, pclass, group = _fields(
        parts, ('name', 'dis', 'class', 'group'), n, path)
    if name != name.upper() or _NAME_FORBIDDEN.search(name):
        raise ParseError('predicate name must be an upper-case citation form: '
                         '%r' % name, n, path)
    if not dis.isdigit() or int(dis) < 1:
        raise ParseError('disambiguator must be a positive integer: %r' % dis,
                         n, path)
    if pclass not in store.vocab.classes:
        raise ParseError('unknown predicate class %r (declare it with '
                         'VOCAB class += %s)' % (pclass, pclass), n, path)
    if _NAME_FORBIDDEN.search(group):
        raise ParseError('malformed group %r' % group, n, path)
    return PredicateEntry(name, int(dis), pclass, group)


def parse_paa(data: Source, store: 'TreebankStore',
              path: str | None = None) -> list[AnnotatedSentence]:
    """Read PAA blocks against the trees of ``store`` and attach them.

    Structural problems (dangling node references, duplicate ids, malformed
    names) raise; semantic problems are left to :func:`validate_annotation`.
    """
    lines = read_lines(data, path)
    blocks: list[AnnotatedSentence] = []
    seen_sentences: set[int] = set()
    lexicon: dict[tuple[str, int], PredicateEntry] = {}
    n = 0

    def expect(keyword: str) -> list[str]:
        nonlocal n
        if n >= len(lines):
            raise ParseError('unexpected end of file; expected %s' % keyword,
                             n, path)
        parts = lines[n].split(' ')
        n += 1
        if parts[0] != keyword:
            raise ParseError('expected %s, got %r' % (keyword, parts[0]),
                             n, path)
        return parts

    while n < len(lines):
        line = lines[n]
        n += 1
        if not line:
            continue
        parts = line.split(' ')
        if parts[0] != '#SENT' or len(parts) != 2:
            raise ParseError('expected #SENT <document>:<number>:<lang>',
                             n, path)
        try:
            origin = OriginRef.parse(parts[1])
        except ValueError as err:
            raise ParseError(str(err), n, path) from None
        if origin.lang != store.lang:
            raise ParseError('sentence language %r in a %r store'
                             % (origin.lang, store.lang), n, path)
        tree = store.tree_for(origin.key)
        if tree is None:
            raise DanglingReferenceError('no sentence %s in the treebank'
                                         % origin, n, path)
        if tree.sid in seen_sentences:
            raise ParseError('second block for sentence %s' % origin, n, path)
        seen_sentences.add(tree.sid)
        block = AnnotatedSentence(tree)
        pending = None  # (pid, entry, binding, [args])
        while True:
            if n >= len(lines):
                raise ParseError('missing #END', n, path)
            parts = lines[n].split(' ')
            n += 1
            keyword = parts[0]
            if keyword in ('#END', 'PRED') and pending is not None:
                block.structures.append(PredArgStructure(
                    pending[0], pending[1], pending[2], tuple(pending[3])))
                pending = None
            if keyword == '#END':
                if len(parts) != 1:
                    raise ParseError('trailing text after #END', n, path)
                break
            elif keyword == 'PRED':
                if len(parts) < 2 or not PID_RE.match(parts[1]):
                    raise ParseError('malformed predicate id', n, path)
                pid = parts[1]
                if block.structure(pid) is not None:
                    raise ParseError('duplicate predicate id %s in sentence %d'
                                     % (pid, tree.sid), n, path)
                entry = _parse_predicate(parts[2:], store, n, path)
                known = lexicon.setdefault(entry.key, entry)
                if known != entry:
                    raise ParseError(
                        '%s/%d already declared with class=%s group=%s'
                        % (entry.name, entry.dis, known.pclass, known.group),
                        n, path)
                parts = expect('PBIND')
                if len(parts) < 2 or parts[1] != pid:
                    raise ParseError('PBIND must follow PRED %s' % pid, n, path)
                binding = _parse_binding(parts[2:], tree, n, path)
                pending = (pid, entry, binding, [])
            elif keyword == 'ARG':
                if len(parts) != 4:
                    raise ParseError('expected ARG <pid> <aid> role=<ROLE>',
                                     n, path)
                if pending is None or parts[1] != pending[0]:
                    raise ParseError('ARG %s is not inside structure %s'
                                     % (parts[1], pending and pending[0]),
                                     n, path)
                aid = parts[2]
                if not AID_RE.match(aid):
                    raise ParseError('malformed argument id %r' % aid, n, path)
                if any(a.aid == aid for a in pending[3]):
                    raise ParseError('duplicate argument id %s.%s'
                                     % (pending[0], aid), n, path)
                (role, ) = _fields(parts[3:], ('role', ), n, path)
                if not ROLE_RE.match(role):
                    raise ParseError('role name %r must match [A-Z0-9_]+'
                                     % role, n, path)
                parts = expect('ABIND')
                if parts[1:3] != [pending[0], aid]:
                    raise ParseError('ABIND must follow ARG %s %s'
                                     % (pending[0], aid), n, path)
                binding = _parse_binding(parts[3:], tree, n, path)
                pending[3].append(Argument(aid, role, binding))
            else:
                raise ParseError('unexpected %r in sentence block' % keyword,
                                 n, path)
        blocks.append(block)
    store.attach(blocks)
    return blocks


# -- PAA writing ------------------------------------------------------------

def serialize_paa(blocks: Iterable[AnnotatedSentence]) -> str:
    out = []
    for block in blocks:
        out.append('#SENT %s\n' % block.tree.origin)
        for struct in block.structures:
            pred = struct.predicate
            out.append('PRED %s name=%s dis=%d class=%s group=%s\n' % (
                struct.pid, pred.name, pred.dis, pred.pclass, pred.group))
            out.append('PBIND %s %s\n' % (struct.pid,
                                           format_binding(struct.binding)))
            for arg in struct.arguments:
                out.append('ARG %s %s role=%s\n' % (struct.pid, arg.aid,
                                                     arg.role))
                out.append('ABIND %s %s %s\n' % (struct.pid, arg.aid,
                                                  format_binding(arg.binding)))
        out.append('#END\n')
    return ''.join(out)


# -- validation -------------------------------------------------------------

def _check_binding(binding: Binding, tree: SentenceTree, known_tags,
                   where: dict, out: list[Diagnostic]) -> Optional[set[int]]:
    """Append binding diagnostics; return the resolved span when usable."""
    missing = [r for r in binding.refs() if r not in tree]
    if missing:
        out.append(diag('DANGLING_REF', message='no node %s in sentence'
                        % ','.join(map(str, missing)), **where))
        return None
    for tag in binding.tags:
        if tag not in known_tags:
            out.append(diag('UNKNOWN_TAG', message='binding tag %r is not '
                            'declared' % tag, **where))
    for ref in binding.excluded:
        if not any(dominates_ref(tree, inc, ref) for inc in binding.included):
            out.append(diag('EXCL_NOT_DOMINATED', message='excluded %s is not '
                            'below any included node' % (ref,), **where))
    try:
        return set(resolve_binding(binding, tree))
    except EmptySpanError:
        out.append(diag('EMPTY_SPAN', message='exclusions remove every token',
                        **where))
        return None


def dominates_ref(tree: SentenceTree, a: NodeLike, b: NodeLike) -> bool:
    try:
        return dominates(tree, a, b)
    except UnknownNodeError:
        return False


def _role_key(role: str) -> str:
    return ''.join(role.split()).casefold()


def validate_annotation(store: 'TreebankStore',
                        recursion_severity: str | None = None
                        ) -> list[Diagnostic]:
    """Check every structure of ``store``; returns diagnostics in file order."""
    out: list[Diagnostic] = []
    lang = store.lang
    tags = store.vocab.binding_tags
    variants: dict[str, dict[str, str]] = defaultdict(dict)
    for block in store.annotations:
        tree = block.tree
        for struct in block.structures:
            where = dict(lang=lang, sid=tree.sid, pid=struct.pid)
            pspan = None
            if struct.binding is None:
                out.append(diag('UNBOUND', message='predicate %s has no '
                                'binding' % struct.predicate.name, **where))
            else:
                pspan = _check_binding(struct.binding, tree, tags, where, out)
            roles_seen: set[str] = set()
            for arg in struct.arguments:
                where = dict(lang=lang, sid=tree.sid, pid=struct.pid,
                             aid=arg.aid)
                if arg.role in roles_seen:
                    out.append(diag('DUP_ROLE', message='role %s used twice'
                                    % arg.role, **where))
                roles_seen.add(arg.role)
                known = variants[struct.predicate.group]
                first = known.setdefault(_role_key(arg.role), arg.role)
                if first != arg.role:
                    out.append(diag('ROLE_NOT_IN_GROUP', message='role %r '
                                    'differs from %r of group %s only by case '
                                    'or whitespace' % (arg.role, first,
                                                       struct.predicate.group),
                                    **where))
                if arg.binding is None:
                    out.append(diag('UNBOUND', message='argument %s has no '
                                    'binding' % arg.role, **where))
                    continue
                aspan = _check_binding(arg.binding, tree, tags, where, out)
                if pspan and aspan and pspan & aspan:
                    out.append(diag(
                        'RECURSION', severity=recursion_severity,
                        message='argument %s covers token(s) %s of its own '
                        'predicate %s' % (arg.role, join_list(sorted(
                            pspan & aspan)), struct.predicate.name), **where))
    return out


def iter_structures(store: 'TreebankStore'
                    ) -> Iterator[tuple[SentenceTree, PredArgStructure]]:
    for block in store.annotations:
        for struct in block.structures:
            yield block.tree, struct
