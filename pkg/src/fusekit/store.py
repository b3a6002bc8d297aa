"""Treebank stores, parallel sets and the administrative manifest.

A manifest (``manifest.fuse``) declares parallel sets, each fusing two
monolingual stores (FTB trees + PAA structures) with one ALN alignment file::

    VOCAB <class|bindtag|aligntag> += <tag>
    SET <name> A=<lang>:<ftb>:<paa> B=<lang>:<ftb>:<paa> ALIGN=<aln>

Paths are relative to the manifest.  Blank lines and ``%`` comments are
ignored.  A saved set lives in ``<root>/<name>/`` as ``<lang>.ftb``,
``<lang>.paa``, ``<lang_a>-<lang_b>.aln`` and ``manifest.fuse``.
"""
from __future__ import annotations

import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from . import align as _align
from .align import AlignmentBlock, PredicateAlignment, SentencePair
from .annot import (AnnotatedSentence, PredArgStructure, PredicateEntry,
                    parse_paa, serialize_paa, validate_annotation)
from .diagnostics import Diagnostic, has_errors
from .errors import (FuseError, IngestError, LoadError, ParseError,
                     ValidationFailed)
from .textio import read_lines
from .tree import (ROOT, NO_LABEL, OriginRef, SentenceTree, parse_treebank,
                   serialize_treebank)
from .vocab import DEFAULT_VOCAB, KINDS, Vocab

log = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.fuse'


class TreebankStore:
    """Trees of one language plus their predicate-argument annotations."""

    def __init__(self, lang: str, trees, annotations=(),
                 vocab: Vocab = DEFAULT_VOCAB) -> None:
        self.lang = lang
        self.vocab = vocab
        self.trees: tuple[SentenceTree, ...] = tuple(trees)
        self._by_origin: dict[tuple[str, int], SentenceTree] = {}
        sids = set()
        for tree in self.trees:
            if tree.origin.lang != lang:
                raise LoadError('sentence %d is %r in a %r store'
                                % (tree.sid, tree.origin.lang, lang))
            if tree.sid in sids:
                raise LoadError('duplicate sentence id %d' % tree.sid)
            if tree.origin.key in self._by_origin:
                raise LoadError('sentence %s occurs twice' % tree.origin)
            sids.add(tree.sid)
            self._by_origin[tree.origin.key] = tree
        self.attach(annotations)

    def attach(self, blocks) -> None:
        """Replace the annotation layer and rebuild the derived indexes."""
        self.annotations: list[AnnotatedSentence] = list(blocks)
        self._blocks = {b.tree.origin.key: b for b in self.annotations}
        self.lexicon: dict[tuple[str, int], PredicateEntry] = {}
        self.inventories: dict[str, set[str]] = {}
        for block in self.annotations:
            for struct in block.structures:
                self._index(struct)

    def _index(self, struct: PredArgStructure) -> None:
        entry = struct.predicate
        self.lexicon.setdefault(entry.key, entry)
        roles = self.inventories.setdefault(entry.group, set())
        roles.update(arg.role for arg in struct.arguments)

    def add_structure(self, key: tuple[str, int],
                      struct: PredArgStructure) -> None:
        tree = self._by_origin[key]
        block = self._blocks.get(key)
        if block is None:
            block = self._blocks[key] = AnnotatedSentence(tree)
            self.annotations.append(block)
        if block.structure(struct.pid) is not None:
            raise ValueError('duplicate predicate id %s' % struct.pid)
        known = self.lexicon.get(struct.predicate.key)
        if known is not None and known != struct.predicate:
            raise ValueError('conflicting lexicon entry for %s/%d'
                             % struct.predicate.key)
        block.structures.append(struct)
        self._index(struct)

    def tree_for(self, key: tuple[str, int]) -> Optional[SentenceTree]:
        return self._by_origin.get(key)

    def structure(self, key: tuple[str, int], pid: str
                  ) -> Optional[tuple[SentenceTree, PredArgStructure]]:
        block = self._blocks.get(key)
        if block is None:
            return None
        struct = block.structure(pid)
        return None if struct is None else (block.tree, struct)

    def structures(self) -> Iterator[tuple[SentenceTree, PredArgStructure]]:
        for block in self.annotations:
            for struct in block.structures:
                yield block.tree, struct

    def role_inventory(self, group: str) -> frozenset[str]:
        return frozenset(self.inventories.get(group, ()))

    def origin_keys(self) -> set[tuple[str, int]]:
        return set(self._by_origin)

    def __repr__(self) -> str:
        return '<TreebankStore %s: %d sentences>' % (self.lang,
                                                     len(self.trees))


class ParallelSet:
    """Two monolingual stores fused by one alignment layer."""

    def __init__(self, name: str, store_a: TreebankStore,
                 store_b: TreebankStore, alignment=(),
                 vocab: Vocab = DEFAULT_VOCAB) -> None:
        if store_a.lang == store_b.lang:
            raise LoadError('set %s: both stores are %r' % (name, store_a.lang))
        self.name = name
        self.store_a = store_a
        self.store_b = store_b
        self.vocab = vocab
        self.alignment: list[AlignmentBlock] = list(alignment)
        shared = store_a.origin_keys() & store_b.origin_keys()
        self.pair_registry = frozenset(
            SentencePair(doc, num, store_a.lang, store_b.lang)
            for doc, num in shared)

    @property
    def lang_a(self) -> str:
        return self.store_a.lang

    @property
    def lang_b(self) -> str:
        return self.store_b.lang

    @property
    def aln_name(self) -> str:
        return '%s-%s.aln' % (self.lang_a, self.lang_b)

    def store(self, lang: str) -> TreebankStore:
        for store in (self.store_a, self.store_b):
            if store.lang == lang:
                return store
        raise KeyError(lang)

    def sorted_pairs(self) -> list[SentencePair]:
        return sorted(self.pair_registry)

    def predicate_alignments(self) -> Iterator[PredicateAlignment]:
        for block in self.alignment:
            yield from block.links

    def add_alignment(self, pa: PredicateAlignment) -> None:
        index = self._block_index()
        block = index.get(pa.pair)
        if block is None:
            block = index[pa.pair] = AlignmentBlock(pa.pair)
            self.alignment.append(block)
            self._indexed = (self.alignment, len(self.alignment))
        block.links.append(pa)

    def _block_index(self) -> dict[SentencePair, AlignmentBlock]:
        # ``alignment`` is a public list; rebuild when it was replaced or
        # resized behind our back
        seen = getattr(self, '_indexed', None)
        if (seen is None or seen[0] is not self.alignment
                or seen[1] != len(self.alignment)):
            self._index_by_pair = {b.pair: b for b in self.alignment}
            self._indexed = (self.alignment, len(self.alignment))
        return self._index_by_pair

    def mirrored(self) -> 'ParallelSet':
        """The same set with languages A and B swapped."""
        blocks = [AlignmentBlock(b.pair.mirrored(),
                                 [pa.mirrored() for pa in b.links])
                  for b in self.alignment]
        return ParallelSet(self.name, self.store_b, self.store_a, blocks,
                           self.vocab)

    def validate(self, recursion_severity: str | None = None
                 ) -> list[Diagnostic]:
        out = []
        for store in (self.store_a, self.store_b):
            out.extend(validate_annotation(store, recursion_severity))
        out.extend(_align.validate_alignment(self))
        return out

    def __repr__(self) -> str:
        return '<ParallelSet %s %s-%s>' % (self.name, self.lang_a, self.lang_b)


# -- manifest ---------------------------------------------------------------

@dataclass(frozen=True)
class StoreDecl:
    lang: str
    ftb: Path
    paa: Path


@dataclass(frozen=True)
class SetDecl:
    name: str
    a: StoreDecl
    b: StoreDecl
    aln: Path


@dataclass
class Manifest:
    path: Path
    sets: dict[str, SetDecl] = field(default_factory=dict)
    vocab: Vocab = DEFAULT_VOCAB


def _store_decl(value: str, base: Path, n: int, path) -> StoreDecl:
    parts = value.split(':')
    if len(parts) != 3 or not all(parts):
        raise ParseError('expected <lang>:<ftb>:<paa>, got %r' % value, n, path)
    return StoreDecl(parts[0], base / parts[1], base / parts[2])


def parse_manifest(path) -> Manifest:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as err:
        raise LoadError('cannot read manifest %s: %s' % (path,
                                                         err.strerror)) from err
    base = path.parent
    manifest = Manifest(path)
    for n, line in enumerate(read_lines(data, str(path)), 1):
        parts = line.split()
        if not parts or parts[0].startswith('%'):
            continue
        if parts[0] == 'VOCAB':
            if len(parts) != 4 or parts[2] != '+=' or parts[1] not in KINDS:
                raise ParseError('expected VOCAB <%s> += <tag>'
                                 % '|'.join(KINDS), n, str(path))
            try:
                manifest.vocab = manifest.vocab.extend(parts[1], parts[3])
            except ValueError as err:
                raise ParseError(str(err), n, str(path)) from None
        elif parts[0] == 'SET':
            if len(parts) != 5:
                raise ParseError('expected SET <name> A=... B=... ALIGN=...',
                                 n, str(path))
            name = parts[1]
            fields = {}
            for part in parts[2:]:
                key, sep, value = part.partition('=')
                if not sep or key not in ('A', 'B', 'ALIGN') or key in fields:
                    raise ParseError('unexpected field %r' % part, n, str(path))
                fields[key] = value
            if len(fields) != 3:
                raise ParseError('SET needs A=, B= and ALIGN=', n, str(path))
            if name in manifest.sets:
                raise ParseError('duplicate set name %r' % name, n, str(path))
            decl = SetDecl(name, _store_decl(fields['A'], base, n, str(path)),
                           _store_decl(fields['B'], base, n, str(path)),
                           base / fields['ALIGN'])
            if decl.a.lang == decl.b.lang:
                raise ParseError('set %s pairs %r with itself'
                                 % (name, decl.a.lang), n, str(path))
            manifest.sets[name] = decl
        else:
            raise ParseError('unknown manifest directive %r' % parts[0],
                             n, str(path))
    return manifest


def serialize_manifest(pset: ParallelSet) -> str:
    lines = ['VOCAB %s += %s' % ext for ext in pset.vocab.extensions()]
    la, lb = pset.lang_a, pset.lang_b
    lines.append('SET %s A=%s:%s.ftb:%s.paa B=%s:%s.ftb:%s.paa ALIGN=%s' % (
        pset.name, la, la, la, lb, lb, lb, pset.aln_name))
    return '\n'.join(lines) + '\n'


# -- loading ----------------------------------------------------------------

def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as err:
        raise LoadError('cannot read %s: %s' % (path, err.strerror)) from err


def _load_store(decl: StoreDecl, vocab: Vocab) -> TreebankStore:
    ftb, paa = _read(decl.ftb), _read(decl.paa)
    store = TreebankStore(decl.lang, parse_treebank(ftb, str(decl.ftb)),
                          vocab=vocab)
    parse_paa(paa, store, str(decl.paa))
    return store


def _load_decl(decl: SetDecl, vocab: Vocab, strict: bool,
               cache: dict) -> ParallelSet:
    for p in (decl.a.ftb, decl.a.paa, decl.b.ftb, decl.b.paa, decl.aln):
        if not p.is_file():
            raise LoadError('set %s: missing file %s' % (decl.name, p))
    stores = []
    for sdecl in (decl.a, decl.b):
        if sdecl not in cache:
            cache[sdecl] = _load_store(sdecl, vocab)
        stores.append(cache[sdecl])
    pset = ParallelSet(decl.name, stores[0], stores[1], vocab=vocab)
    _align.parse_aln(_read(decl.aln), pset, strict=False, path=str(decl.aln))
    if strict:
        diagnostics = pset.validate()
        if has_errors(diagnostics):
            raise ValidationFailed(diagnostics)
    log.debug('loaded set %s: %d pairs', decl.name, len(pset.pair_registry))
    return pset


def load_set(manifest_path, name: str | None = None,
             strict: bool = False) -> ParallelSet:
    """Load one set of a manifest; all-or-nothing.

    ``name`` may be omitted when the manifest declares exactly one set.
    With ``strict``, error-severity diagnostics raise
    :class:`~fusekit.errors.ValidationFailed`.
    """
    manifest = parse_manifest(manifest_path)
    if name is None:
        if len(manifest.sets) != 1:
            raise LoadError('manifest %s declares %d sets; name one of: %s' % (
                manifest_path, len(manifest.sets), ', '.join(manifest.sets)))
        name = next(iter(manifest.sets))
    if name not in manifest.sets:
        raise LoadError('manifest %s has no set %r' % (manifest_path, name))
    return _load_decl(manifest.sets[name], manifest.vocab, strict, {})


def load_manifest(manifest_path, strict: bool = False
                  ) -> dict[str, ParallelSet]:
    """Load every set; stores named by several sets are loaded once and
    shared."""
    manifest = parse_manifest(manifest_path)
    cache: dict = {}
    return {name: _load_decl(decl, manifest.vocab, strict, cache)
            for name, decl in manifest.sets.items()}


# -- saving -----------------------------------------------------------------

def render_set(pset: ParallelSet) -> dict[str, str]:
    """File name -> canonical content for a saved set."""
    files = {}
    for store in (pset.store_a, pset.store_b):
        files['%s.ftb' % store.lang] = serialize_treebank(store.trees)
        files['%s.paa' % store.lang] = serialize_paa(store.annotations)
    files[pset.aln_name] = _align.serialize_aln(pset.alignment)
    files[MANIFEST_NAME] = serialize_manifest(pset)
    return files


def _write_dir_atomically(files: dict[str, str], target: Path,
                          force: bool) -> Path:
    if target.exists() and not force:
        raise FileExistsError('%s exists; pass force=True to overwrite'
                              % target)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix='.%s.' % target.name,
                                dir=target.parent))
    try:
        for fname, content in files.items():
            (tmp / fname).write_bytes(content.encode('utf-8'))
        if target.exists():
            backup = Path(tempfile.mkdtemp(prefix='.%s.old.' % target.name,
                                           dir=target.parent))
            os.rename(target, backup / 'old')
            os.rename(tmp, target)
            shutil.rmtree(backup)
        else:
            os.rename(tmp, target)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return target


def save_set(pset: ParallelSet, root, force: bool = False) -> Path:
    """Write ``pset`` to ``<root>/<name>/``; returns that directory.

    Files are written to a temporary sibling directory first, so a failure
    leaves nothing behind.
    """
    return _write_dir_atomically(render_set(pset), Path(root) / pset.name,
                                 force)


def rewrite_in_place(manifest_path, name: str | None = None) -> list[Path]:
    """Re-serialize a set's files at the paths its manifest names."""
    manifest = parse_manifest(manifest_path)
    pset = load_set(manifest_path, name)
    decl = manifest.sets[pset.name]
    targets = {
        decl.a.ftb: serialize_treebank(pset.store_a.trees),
        decl.a.paa: serialize_paa(pset.store_a.annotations),
        decl.b.ftb: serialize_treebank(pset.store_b.trees),
        decl.b.paa: serialize_paa(pset.store_b.annotations),
        decl.aln: _align.serialize_aln(pset.alignment),
    }
    written = []
    for path, content in targets.items():
        data = content.encode('utf-8')
        if path.read_bytes() == data:
            continue
        fd, tmp = tempfile.mkstemp(prefix='.%s.' % path.name, dir=path.parent)
        try:
            with os.fdopen(fd, 'wb') as out:
                out.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        written.append(path)
    return written


# -- ingestion --------------------------------------------------------------

@dataclass
class IngestResult:
    pairs: list[SentencePair]
    trees_a: list[SentenceTree]
    trees_b: list[SentenceTree]


def _sentences(path) -> list[str]:
    try:
        data = Path(path).read_bytes()
    except OSError as err:
        raise LoadError('cannot read %s: %s' % (path, err.strerror)) from err
    return read_lines(data, str(path))


def _skeleton(sid: int, origin: OriginRef, line: str) -> SentenceTree:
    return SentenceTree.build(sid, origin, [(form, NO_LABEL, NO_LABEL, ROOT)
                                            for form in line.split()])


def ingest_pairs(file_a, file_b, document: str, lang_a: str, lang_b: str,
                 first_number: int = 1) -> IngestResult:
    """Turn two line-aligned plain-text files into skeleton trees.

    Line *k* (1-based) becomes sentence number ``first_number + k - 1`` on
    both sides; tokens are whitespace-separated and attached to ROOT with
    POS ``--``.
    """
    lines_a, lines_b = _sentences(file_a), _sentences(file_b)
    if len(lines_a) != len(lines_b):
        raise IngestError('line counts differ: %s has %d, %s has %d'
                          % (file_a, len(lines_a), file_b, len(lines_b)))
    if lang_a == lang_b:
        raise IngestError('both sides are %r' % lang_a)
    result = IngestResult([], [], [])
    for k, (la, lb) in enumerate(zip(lines_a, lines_b), 1):
        for text, fname in ((la, file_a), (lb, file_b)):
            if not text.split():
                raise IngestError('%s: line %d is empty' % (fname, k))
        number = first_number + k - 1
        try:
            result.trees_a.append(_skeleton(
                k, OriginRef(document, number, lang_a), la))
            result.trees_b.append(_skeleton(
                k, OriginRef(document, number, lang_b), lb))
        except (ValueError, FuseError) as err:
            raise IngestError('line %d: %s' % (k, err)) from None
        result.pairs.append(SentencePair(document, number, lang_a, lang_b))
    return result


def ingest_to_set(result: IngestResult, name: str) -> ParallelSet:
    if not result.trees_a:
        raise IngestError('nothing to ingest')
    lang_a = result.trees_a[0].origin.lang
    lang_b = result.trees_b[0].origin.lang
    return ParallelSet(name, TreebankStore(lang_a, result.trees_a),
                       TreebankStore(lang_b, result.trees_b))
