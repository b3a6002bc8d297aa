"""Monolingual constituent trees: tokens, non-terminals and labelled edges.

Trees are read from and written to the FTB text format::

    #BOS <sid> <document>:<sentence_number>:<lang>
    <form>\\t<pos>\\t<edge-label>\\t<parent>        one line per token
    #<nid>\\t<category>\\t<edge-label>\\t<parent>    nid >= 500, ascending
    #EOS <sid>

``<parent>`` is a non-terminal id or ``0`` for ROOT; a missing edge label is
written ``--``.  Crossing branches are allowed, so yields are token *sets*.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Union

from .errors import InvariantError, ParseError, UnknownNodeError
from .textio import Source, read_lines

ROOT = 0
NO_LABEL = '--'
MIN_NODE_ID = 500

_REF_RE = re.compile(r'([tn])(0|[1-9][0-9]*)$')
_NT_LINE_RE = re.compile(r'#([0-9]+)\t')
_BAD_FORM_RE = re.compile(r'#[0-9]+$|#BOS |#EOS ')


class Ref(NamedTuple):
    """Reference to a token (``t4``) or a non-terminal (``n508``)."""
    kind: str
    num: int

    def __str__(self) -> str:
        return '%s%d' % (self.kind, self.num)

    @property
    def is_token(self) -> bool:
        return self.kind == 't'

    @classmethod
    def parse(cls, text: str) -> 'Ref':
        match = _REF_RE.match(text)
        if match is None:
            raise ValueError('malformed node reference %r' % text)
        return cls(match.group(1), int(match.group(2)))


NodeLike = Union[Ref, str]


def tok(index: int) -> Ref:
    return Ref('t', index)


def nt(nid: int) -> Ref:
    return Ref('n', nid)


def as_ref(node: NodeLike) -> Ref:
    if isinstance(node, Ref):
        return node
    if isinstance(node, str):
        return Ref.parse(node)
    raise TypeError('expected a node reference, got %r' % (node, ))


@dataclass(frozen=True, order=True)
class OriginRef:
    """Where a sentence comes from, e.g. ``de-en/ep-00-02-15.al:326:en``."""
    document: str
    sentence_number: int
    lang: str

    def __post_init__(self):
        if not self.document or any(c.isspace() for c in self.document):
            raise ValueError('document must be non-empty without whitespace')
        if self.sentence_number < 1:
            raise ValueError('sentence_number must be >= 1')
        if not self.lang or ':' in self.lang or any(
                c.isspace() for c in self.lang):
            raise ValueError('malformed language code %r' % self.lang)

    @property
    def key(self) -> tuple[str, int]:
        """Language-independent part used to pair sentences."""
        return self.document, self.sentence_number

    def __str__(self) -> str:
        return '%s:%d:%s' % (self.document, self.sentence_number, self.lang)

    @classmethod
    def parse(cls, text: str) -> 'OriginRef':
        parts = text.rsplit(':', 2)
        if len(parts) != 3 or not parts[1].isdigit():
            raise ValueError('malformed origin %r; expected doc:number:lang'
                             % text)
        return cls(parts[0], int(parts[1]), parts[2])


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    pos: str


@dataclass(frozen=True)
class NonTerminal:
    id: int
    category: str


@dataclass(frozen=True)
class Edge:
    child: Ref
    parent: int
    label: str = NO_LABEL


def _check_field(value: str, what: str, sid: int) -> None:
    if not value or '\t' in value or '\n' in value:
        raise InvariantError('%s must be non-empty and free of tabs and '
                             'newlines: %r' % (what, value), sid)


@dataclass(frozen=True)
class SentenceTree:
    """An immutable constituent tree; invariants are checked on construction.

    ``edges`` holds exactly one edge per token and per non-terminal.
    """
    sid: int
    origin: OriginRef
    tokens: tuple[Token, ...]
    nodes: tuple[NonTerminal, ...] = ()
    edges: tuple[Edge, ...] = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'tokens', tuple(self.tokens))
        object.__setattr__(self, 'nodes', tuple(self.nodes))
        object.__setattr__(self, 'edges', tuple(self.edges))
        self._check()

    @classmethod
    def build(cls, sid: int, origin: OriginRef | str,
              tokens: Iterable[tuple[str, str, str, int]],
              nodes: Iterable[tuple[int, str, str, int]] = ()) -> 'SentenceTree':
        """Construct from ``(form, pos, label, parent)`` token rows and
        ``(id, category, label, parent)`` node rows, as in FTB."""
        if isinstance(origin, str):
            origin = OriginRef.parse(origin)
        toks, ntms, edges = [], [], []
        for i, (form, pos, label, parent) in enumerate(tokens):
            toks.append(Token(i, form, pos))
            edges.append(Edge(tok(i), parent, label))
        for nid, cat, label, parent in nodes:
            ntms.append(NonTerminal(nid, cat))
            edges.append(Edge(nt(nid), parent, label))
        return cls(sid, origin, tuple(toks), tuple(ntms), tuple(edges))

    def _check(self) -> None:
        sid = self.sid
        if not isinstance(sid, int) or sid < 1:
            raise InvariantError('sid must be a positive integer: %r' % sid)
        if not self.tokens:
            raise InvariantError('sentence has no tokens', sid)
        for i, token in enumerate(self.tokens):
            if token.index != i:
                raise InvariantError('token %d has index %d'
                                     % (i, token.index), sid)
            _check_field(token.form, 'token form', sid)
            _check_field(token.pos, 'POS tag', sid)
            if _BAD_FORM_RE.match(token.form):
                raise InvariantError('token form %r clashes with FTB markup'
                                     % token.form, sid)
        previous = MIN_NODE_ID - 1
        for node in self.nodes:
            if node.id < MIN_NODE_ID:
                raise InvariantError('node id %d is below %d'
                                     % (node.id, MIN_NODE_ID), sid)
            if node.id <= previous:
                raise InvariantError('node ids must be unique and ascending; '
                                     'got %d after %d' % (node.id, previous),
                                     sid)
            previous = node.id
            _check_field(node.category, 'category', sid)
        node_ids = {node.id for node in self.nodes}
        seen = set()
        for edge in self.edges:
            child = edge.child
            if child in seen:
                raise InvariantError('%s has more than one parent' % (child,), sid)
            seen.add(child)
            if child.is_token:
                if not 0 <= child.num < len(self.tokens):
                    raise InvariantError('edge from unknown token %s' % (child,),
                                         sid)
            elif child.num not in node_ids:
                raise InvariantError('edge from unknown node %s' % (child,), sid)
            if edge.parent != ROOT and edge.parent not in node_ids:
                raise InvariantError('parent %d of %s is not a node of this '
                                     'sentence' % (edge.parent, child), sid)
            _check_field(edge.label, 'edge label', sid)
        if len(seen) != len(self.tokens) + len(self.nodes):
            missing = [str(r) for r in self.refs() if r not in seen]
            raise InvariantError('no edge for %s' % ', '.join(missing), sid)
        # acyclicity: follow parent chains, remembering nodes known to reach ROOT
        parent_of = {e.child.num: e.parent for e in self.edges
                     if not e.child.is_token}
        grounded = {ROOT}
        for nid in node_ids:
            path = []
            cur = nid
            while cur not in grounded:
                if cur in path:
                    raise InvariantError('cycle through node %d' % cur, sid)
                path.append(cur)
                cur = parent_of[cur]
            grounded.update(path)
        for nid in node_ids:
            if not self._yields[nt(nid)]:
                raise InvariantError('node %d dominates no token' % nid, sid)

    def refs(self) -> list[Ref]:
        """All node references: tokens first, then non-terminals."""
        return ([tok(t.index) for t in self.tokens]
                + [nt(n.id) for n in self.nodes])

    @cached_property
    def _parent(self) -> dict[Ref, int]:
        return {e.child: e.parent for e in self.edges}

    @cached_property
    def _label(self) -> dict[Ref, str]:
        return {e.child: e.label for e in self.edges}

    @cached_property
    def _children(self) -> dict[int, tuple[Ref, ...]]:
        children: dict[int, list[Ref]] = {ROOT: []}
        for node in self.nodes:
            children[node.id] = []
        for edge in self.edges:
            children[edge.parent].append(edge.child)
        # surface order: by leftmost token, ties (impossible) by ref
        first = {ref: min(span) for ref, span in self._yields.items()}
        return {k: tuple(sorted(v, key=lambda r: (first[r], r)))
                for k, v in children.items()}

    @cached_property
    def _category(self) -> dict[int, str]:
        return {n.id: n.category for n in self.nodes}

    @cached_property
    def _yields(self) -> dict[Ref, frozenset[int]]:
        acc: dict[int, set[int]] = {node.id: set() for node in self.nodes}
        result: dict[Ref, frozenset[int]] = {}
        for token in self.tokens:
            result[tok(token.index)] = frozenset((token.index, ))
            up = self._parent[tok(token.index)]
            while up != ROOT:
                acc[up].add(token.index)
                up = self._parent[nt(up)]
        for nid, span in acc.items():
            result[nt(nid)] = frozenset(span)
        return result

    def __contains__(self, node: NodeLike) -> bool:
        try:
            return as_ref(node) in self._parent
        except ValueError:
            return False

    def _known(self, node: NodeLike) -> Ref:
        ref = as_ref(node)
        if ref not in self._parent:
            raise UnknownNodeError('sentence %d has no node %s'
                                   % (self.sid, ref))
        return ref

    def parent(self, node: NodeLike) -> int:
        return self._parent[self._known(node)]

    def children(self, node: NodeLike) -> tuple[Ref, ...]:
        """Daughters of ``node`` ordered by their leftmost token."""
        ref = self._known(node)
        return () if ref.is_token else self._children[ref.num]

    def roots(self) -> tuple[Ref, ...]:
        return self._children[ROOT]

    def label(self, node: NodeLike) -> str:
        """Functional label of the edge above ``node``."""
        return self._label[self._known(node)]

    def category(self, node: NodeLike) -> str:
        """Phrasal category of a non-terminal, or the POS tag of a token."""
        ref = self._known(node)
        if ref.is_token:
            return self.tokens[ref.num].pos
        return self._category[ref.num]

    def yield_set(self, node: NodeLike) -> frozenset[int]:
        return self._yields[self._known(node)]

    def __len__(self) -> int:
        return len(self.tokens)


def yield_of(tree: SentenceTree, node: NodeLike) -> tuple[int, ...]:
    """Sorted token indices dominated by ``node`` (reflexively for tokens)."""
    return tuple(sorted(tree.yield_set(node)))


def dominates(tree: SentenceTree, a: NodeLike, b: NodeLike) -> bool:
    """True iff ``b`` lies strictly below ``a``."""
    a = tree._known(a)
    b = tree._known(b)
    if a.is_token:
        return False
    cur = tree._parent[b]
    while cur != ROOT:
        if cur == a.num:
            return True
        cur = tree._parent[nt(cur)]
    return False


def parse_treebank(data: Source, path: str | None = None) -> list[SentenceTree]:
    """Read FTB blocks; returns trees in file order."""
    trees: list[SentenceTree] = []
    sids: set[int] = set()
    lines = read_lines(data, path)
    n = 0
    while n < len(lines):
        line = lines[n]
        n += 1
        if not line:
            continue
        if not line.startswith('#BOS '):
            raise ParseError('expected #BOS, got %r' % line[:40], n, path)
        bos_line = n
        head = line.split(' ')
        if len(head) != 3 or not head[1].isdigit() or int(head[1]) < 1:
            raise ParseError('malformed #BOS line', n, path)
        sid = int(head[1])
        try:
            origin = OriginRef.parse(head[2])
        except ValueError as err:
            raise ParseError(str(err), n, path) from None
        tokens, nodes = [], []
        while True:
            if n >= len(lines):
                raise ParseError('missing #EOS %d' % sid, n, path)
            line = lines[n]
            n += 1
            if line.startswith('#EOS '):
                if line != '#EOS %d' % sid:
                    raise ParseError('#EOS does not match #BOS %d' % sid,
                                     n, path)
                break
            fields = line.split('\t')
            if len(fields) != 4:
                raise ParseError('expected 4 tab-separated fields, got %d'
                                 % len(fields), n, path)
            if not fields[3].isdigit():
                raise ParseError('parent must be a node id or 0: %r'
                                 % fields[3], n, path)
            parent = int(fields[3])
            if parent != ROOT and parent < MIN_NODE_ID:
                raise InvariantError('parent %d is below %d'
                                     % (parent, MIN_NODE_ID), sid)
            if _NT_LINE_RE.match(line):
                nodes.append((int(fields[0][1:]), fields[1], fields[2],
                              parent))
            elif nodes:
                raise ParseError('token line after non-terminal lines',
                                 n, path)
            else:
                tokens.append((fields[0], fields[1], fields[2], parent))
        if sid in sids:
            raise InvariantError('duplicate sentence id', sid)
        sids.add(sid)
        try:
            trees.append(SentenceTree.build(sid, origin, tokens, nodes))
        except InvariantError as err:
            err.args = ('%s (block at line %d)' % (err, bos_line), )
            raise
        except ValueError as err:
            raise ParseError(str(err), bos_line, path) from None
    return trees


def serialize_tree(tree: SentenceTree) -> str:
    lines = ['#BOS %d %s' % (tree.sid, tree.origin)]
    for token in tree.tokens:
        ref = tok(token.index)
        lines.append('%s\t%s\t%s\t%d' % (token.form, token.pos,
                                          tree._label[ref], tree._parent[ref]))
    for node in tree.nodes:
        ref = nt(node.id)
        lines.append('#%d\t%s\t%s\t%d' % (node.id, node.category,
                                          tree._label[ref], tree._parent[ref]))
    lines.append('#EOS %d' % tree.sid)
    return '\n'.join(lines) + '\n'


def serialize_treebank(trees: Iterable[SentenceTree]) -> str:
    return ''.join(serialize_tree(tree) for tree in trees)
