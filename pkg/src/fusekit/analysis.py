"""Queries over a loaded parallel set.

* paradigmatic queries: every realisation of one role across a predicate
  group, whatever the syntactic form of the predicate (:func:`realisations`);
* syntagmatic summaries of argument structure per predicate (:func:`frames`);
* searches for tagged alignments (:func:`find_by_align_tag`);
* predicate clusters derived from the translation graph
  (:func:`build_graph`, :func:`derive_clusters`);
* corpus counts (:func:`stats`).
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from .align import (SentencePair, arg_roles, dangling_report,
                    resolved_alignments)
from .annot import resolve_binding
from .errors import EmptySpanError
from .store import ParallelSet
from .textio import join_list
from .tree import Ref


def _tagset(tags: Optional[Iterable[str]]) -> frozenset[str]:
    return frozenset(tags or ())


@dataclass(frozen=True)
class RealisationRecord:
    lang: str
    sid: int
    pid: str
    aid: str
    predicate: str
    pclass: str
    role: str
    span: tuple[int, ...]
    nodes: tuple[Ref, ...]
    categories: tuple[str, ...]
    functions: tuple[str, ...]
    tags: tuple[str, ...]

    def row(self) -> tuple[str, ...]:
        return (self.lang, str(self.sid), self.pid, self.aid, self.predicate,
                self.pclass, self.role, join_list(self.span),
                join_list(self.nodes), join_list(self.categories),
                join_list(self.functions), join_list(self.tags))

    def text(self) -> str:
        bound = ' '.join('%s=%s/%s' % x for x in zip(
            self.nodes, self.categories, self.functions))
        return '%s s%d %s.%s %s(%s) %s: tokens %s via %s tags=%s' % (
            self.lang, self.sid, self.pid, self.aid, self.predicate,
            self.pclass, self.role, join_list(self.span), bound,
            join_list(self.tags))


def _alignment_tags(pset: ParallelSet):
    """Tags on predicate alignments per structure and on argument links per
    argument, keyed by (lang, sid, pid[, aid])."""
    pred_tags: dict[tuple, set[str]] = defaultdict(set)
    arg_tags: dict[tuple, set[str]] = defaultdict(set)
    la, lb = pset.lang_a, pset.lang_b
    for res in resolved_alignments(pset):
        pa = res.alignment
        pred_tags[la, res.tree_a.sid, pa.pid_a].update(pa.tags)
        pred_tags[lb, res.tree_b.sid, pa.pid_b].update(pa.tags)
        for link in pa.arg_links:
            if arg_roles(res, link) is None:
                continue
            arg_tags[la, res.tree_a.sid, pa.pid_a, link.aid_a].update(link.tags)
            arg_tags[lb, res.tree_b.sid, pa.pid_b, link.aid_b].update(link.tags)
    return pred_tags, arg_tags


def realisations(pset: ParallelSet, group: str, role: str,
                 lang: str | None = None,
                 skip_binding_tags: Iterable[str] = (),
                 skip_pred_tags: Iterable[str] = (),
                 skip_align_tags: Iterable[str] = ()
                 ) -> list[RealisationRecord]:
    """All arguments with ``role`` of predicates in ``group``.

    Records are dropped when the argument binding carries a
    ``skip_binding_tags`` tag, when the predicate binding carries a
    ``skip_pred_tags`` tag, or when the argument link or the predicate
    alignment it belongs to carries a ``skip_align_tags`` tag.
    """
    skip_b = _tagset(skip_binding_tags)
    skip_p = _tagset(skip_pred_tags)
    skip_a = _tagset(skip_align_tags)
    if skip_a:
        pred_tags, arg_tags = _alignment_tags(pset)
    records = []
    for store in (pset.store_a, pset.store_b):
        if lang is not None and store.lang != lang:
            continue
        for tree, struct in store.structures():
            if struct.predicate.group != group:
                continue
            pbind = struct.binding
            if pbind is not None and skip_p.intersection(pbind.tags):
                continue
            for arg in struct.arguments:
                if arg.role != role or arg.binding is None:
                    continue
                binding = arg.binding
                if skip_b.intersection(binding.tags):
                    continue
                if skip_a and (
                        skip_a & pred_tags.get((store.lang, tree.sid,
                                                struct.pid), set())
                        or skip_a & arg_tags.get((store.lang, tree.sid,
                                                  struct.pid, arg.aid), set())):
                    continue
                try:
                    span = resolve_binding(binding, tree)
                except EmptySpanError:
                    continue
                records.append(RealisationRecord(
                    store.lang, tree.sid, struct.pid, arg.aid,
                    struct.predicate.name, struct.predicate.pclass, arg.role,
                    span, binding.included,
                    tuple(tree.category(r) for r in binding.included),
                    tuple(tree.label(r) for r in binding.included),
                    binding.tags))
    records.sort(key=lambda r: (r.lang, r.sid, int(r.pid[1:]), int(r.aid[1:])))
    return records


@dataclass(frozen=True)
class FrameSummary:
    lang: str
    name: str
    dis: int
    pclass: str
    group: str
    occurrences: int
    roles: tuple[str, ...]
    # (number of arguments, number of structures with that many)
    arg_counts: tuple[tuple[int, int], ...]

    @property
    def distribution(self) -> dict[int, int]:
        return dict(self.arg_counts)

    def row(self) -> tuple[str, ...]:
        return (self.lang, self.pclass, self.name, str(self.dis), self.group,
                str(self.occurrences), join_list(self.roles),
                join_list('%d:%d' % kv for kv in self.arg_counts))

    def text(self) -> str:
        return '%s %s/%d [%s] x%d roles=%s arity=%s' % (
            self.lang, self.name, self.dis, self.pclass, self.occurrences,
            join_list(self.roles),
            join_list('%d:%d' % kv for kv in self.arg_counts))


def frames(pset: ParallelSet, lang: str, group: str) -> list[FrameSummary]:
    """One summary per predicate of ``group`` in the ``lang`` store."""
    store = pset.store(lang)
    occurrences: Counter = Counter()
    roles: dict[tuple, set[str]] = defaultdict(set)
    arity: dict[tuple, Counter] = defaultdict(Counter)
    for _, struct in store.structures():
        pred = struct.predicate
        if pred.group != group:
            continue
        occurrences[pred] += 1
        roles[pred].update(arg.role for arg in struct.arguments)
        arity[pred][len(struct.arguments)] += 1
    return [FrameSummary(lang, p.name, p.dis, p.pclass, p.group,
                         occurrences[p], tuple(sorted(roles[p])),
                         tuple(sorted(arity[p].items())))
            for p in sorted(occurrences,
                            key=lambda p: (p.pclass, p.name, p.dis))]


@dataclass(frozen=True)
class TagHit:
    pair: SentencePair
    pid_a: str
    pid_b: str
    level: str  # 'predicate' or 'argument'
    predicate_a: str
    predicate_b: str
    role_a: str = ''
    role_b: str = ''

    def row(self) -> tuple[str, ...]:
        return (str(self.pair), self.pair.lang_a, self.pair.lang_b,
                self.pid_a, self.pid_b, self.level, self.predicate_a,
                self.predicate_b, self.role_a or '-', self.role_b or '-')

    def text(self) -> str:
        out = '%s %s %s<->%s (%s %s<->%s %s)' % (
            self.pair, self.level, self.predicate_a, self.predicate_b,
            self.pair.lang_a, self.pid_a, self.pid_b, self.pair.lang_b)
        if self.level == 'argument':
            out += ' roles %s<->%s' % (self.role_a, self.role_b)
        return out


def find_by_align_tag(pset: ParallelSet, tag: str) -> list[TagHit]:
    """Predicate alignments and argument links carrying ``tag``."""
    hits = []
    for res in resolved_alignments(pset):
        pa = res.alignment
        names = (res.struct_a.predicate.name, res.struct_b.predicate.name)
        if tag in pa.tags:
            hits.append(TagHit(pa.pair, pa.pid_a, pa.pid_b, 'predicate',
                               *names))
        for link in pa.arg_links:
            roles = arg_roles(res, link)
            if roles is not None and tag in link.tags:
                hits.append(TagHit(pa.pair, pa.pid_a, pa.pid_b, 'argument',
                                   *names, *roles))
    return hits


# -- translation graph and clusters -----------------------------------------

class PredKey(NamedTuple):
    lang: str
    name: str
    dis: int

    def __str__(self) -> str:
        return '%s:%s.%d' % self


class RoleKey(NamedTuple):
    lang: str
    name: str
    dis: int
    role: str

    @property
    def predicate(self) -> PredKey:
        return PredKey(self.lang, self.name, self.dis)

    def __str__(self) -> str:
        return '%s:%s.%d:%s' % self


@dataclass
class RoleEdge:
    count: int = 0
    tags: Counter = field(default_factory=Counter)


@dataclass
class TranslationGraph:
    """Predicates of both languages linked by observed alignments.

    Edge keys are ``(vertex in lang_a, vertex in lang_b)``; consumers treat
    them as unordered."""
    vertices: tuple[PredKey, ...]
    edges: dict[tuple[PredKey, PredKey], int]
    role_edges: dict[tuple[RoleKey, RoleKey], RoleEdge]


def build_graph(pset: ParallelSet,
                exclude_align_tags: Iterable[str] = ()) -> TranslationGraph:
    """Aggregate alignment counts.  An excluded tag on a predicate alignment
    drops it with all its argument links; on an argument link it drops only
    that link."""
    skip = _tagset(exclude_align_tags)
    vertices = {PredKey(store.lang, *key)
                for store in (pset.store_a, pset.store_b)
                for key in store.lexicon}
    edges: Counter = Counter()
    role_edges: dict = defaultdict(RoleEdge)
    for res in resolved_alignments(pset):
        pa = res.alignment
        if skip.intersection(pa.tags):
            continue
        pa_key = PredKey(pset.lang_a, *res.struct_a.predicate.key)
        pb_key = PredKey(pset.lang_b, *res.struct_b.predicate.key)
        edges[pa_key, pb_key] += 1
        for link in pa.arg_links:
            roles = arg_roles(res, link)
            if roles is None or skip.intersection(link.tags):
                continue
            edge = role_edges[RoleKey(*pa_key, roles[0]),
                              RoleKey(*pb_key, roles[1])]
            edge.count += 1
            edge.tags.update(link.tags)
    return TranslationGraph(tuple(sorted(vertices)), dict(edges),
                            dict(role_edges))


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, items=()):
        self.parent = {}
        self.size = {}
        for item in items:
            self.add(item)

    def add(self, item) -> None:
        if item not in self.parent:
            self.parent[item] = item
            self.size[item] = 1

    def find(self, item):
        parent = self.parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[list]:
        out = defaultdict(list)
        for item in self.parent:
            out[self.find(item)].append(item)
        return list(out.values())


@dataclass(frozen=True)
class PredicateCluster:
    members: tuple[PredKey, ...]
    role_classes: tuple[tuple[RoleKey, ...], ...]


def derive_clusters(graph: TranslationGraph,
                    min_count: int = 1) -> list[PredicateCluster]:
    """Connected components of the predicate graph over edges with
    ``count >= min_count``, singletons dropped; role classes are the
    components of the role graph under the same threshold."""
    if min_count < 1:
        raise ValueError('min_count must be >= 1')
    preds = UnionFind(graph.vertices)
    for (a, b), count in graph.edges.items():
        if count >= min_count:
            preds.add(a)
            preds.add(b)
            preds.union(a, b)
    roles = UnionFind()
    for (a, b), edge in graph.role_edges.items():
        if edge.count >= min_count:
            roles.add(a)
            roles.add(b)
            roles.union(a, b)
    classes_of = defaultdict(list)
    for group in roles.groups():
        cls = tuple(sorted(group))
        pa = cls[0].predicate
        if pa in preds.parent:
            classes_of[preds.find(pa)].append(cls)
    clusters = []
    for group in preds.groups():
        if len(group) < 2:
            continue
        root = preds.find(group[0])
        clusters.append(PredicateCluster(tuple(sorted(group)),
                                         tuple(sorted(classes_of[root]))))
    clusters.sort(key=lambda c: c.members[0])
    return clusters


# -- counts -----------------------------------------------------------------

STAT_KEYS = ('sentences', 'tokens', 'structures', 'arguments', 'bindings',
             'bindings_with_exclusions', 'dangling_predicates',
             'dangling_arguments')


def stats(pset: ParallelSet) -> list[tuple[str, str, int]]:
    """(scope, key, value) rows: per language, then ``total``."""
    report = dangling_report(pset)
    per_lang = {}
    for store in (pset.store_a, pset.store_b):
        c = dict.fromkeys(STAT_KEYS, 0)
        c['sentences'] = len(store.trees)
        c['tokens'] = sum(len(t) for t in store.trees)
        for _, struct in store.structures():
            c['structures'] += 1
            c['arguments'] += len(struct.arguments)
            for b in [struct.binding] + [a.binding for a in struct.arguments]:
                if b is not None:
                    c['bindings'] += 1
                    c['bindings_with_exclusions'] += bool(b.excluded)
        c['dangling_predicates'] = sum(
            d.lang == store.lang for d in report.predicates)
        c['dangling_arguments'] = sum(
            d.lang == store.lang for d in report.arguments)
        per_lang[store.lang] = c
    rows = []
    for lang in sorted(per_lang):
        rows.extend((lang, key, per_lang[lang][key]) for key in STAT_KEYS)
    total = {key: sum(c[key] for c in per_lang.values()) for key in STAT_KEYS}
    rows.append(('total', 'pairs', len(pset.pair_registry)))
    rows.extend(('total', key, total[key]) for key in STAT_KEYS)
    pred_tags: Counter = Counter()
    arg_tags: Counter = Counter()
    n_pred = n_arg = 0
    for pa in pset.predicate_alignments():
        n_pred += 1
        pred_tags.update(pa.tags)
        for link in pa.arg_links:
            n_arg += 1
            arg_tags.update(link.tags)
    rows.append(('total', 'predicate_alignments', n_pred))
    rows.append(('total', 'argument_alignments', n_arg))
    tags = list(pset.vocab.align_tags)
    tags += sorted((set(pred_tags) | set(arg_tags)) - set(tags))
    for tag in tags:
        rows.append(('total', 'predicate_alignments[%s]' % tag, pred_tags[tag]))
        rows.append(('total', 'argument_alignments[%s]' % tag, arg_tags[tag]))
    return rows
