"""Command-line interface.

Exit status: 0 success, 1 error-severity diagnostics, 2 usage, parse or I/O
failure.  Data goes to standard output, diagnostics to standard error.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import analysis
from .align import dangling_report
from .diagnostics import has_errors
from .errors import FuseError, ValidationFailed
from .store import (MANIFEST_NAME, _write_dir_atomically, ingest_pairs,
                    ingest_to_set, load_set, render_set, rewrite_in_place,
                    save_set)

EXIT_OK, EXIT_INVALID, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


def _tags(values) -> list[str]:
    """Flatten repeated and comma-separated tag options."""
    out = []
    for value in values or ():
        out.extend(t for t in value.split(',') if t)
    return out


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('not an integer: %r' % text)
    if value < 1:
        raise argparse.ArgumentTypeError('must be >= 1, got %d' % value)
    return value


def _emit(rows, fmt: str, out) -> None:
    for record in rows:
        if fmt == 'tsv':
            out.write('\t'.join(record.row()) + '\n')
        else:
            out.write(record.text() + '\n')


def _print_diagnostics(diagnostics, err) -> None:
    for d in diagnostics:
        err.write(d.format() + '\n')


def _load(args):
    if not args.manifest:
        raise UsageError('no manifest: pass --manifest or set FUSE_MANIFEST')
    return load_set(args.manifest, args.set)


def cmd_import(args, out, err) -> int:
    if not args.manifest:
        raise UsageError('no manifest: pass --manifest or set FUSE_MANIFEST')
    try:
        pset = load_set(args.manifest, args.set, strict=args.strict)
    except ValidationFailed as exc:
        _print_diagnostics(exc.diagnostics, err)
        return EXIT_INVALID
    diagnostics = pset.validate()
    _print_diagnostics(diagnostics, err)
    if args.out:
        target = save_set(pset, args.out, force=args.force)
        err.write('wrote %s\n' % target)
    else:
        for path in rewrite_in_place(args.manifest, pset.name):
            err.write('rewrote %s\n' % path)
    return EXIT_OK


def cmd_validate(args, out, err) -> int:
    pset = _load(args)
    diagnostics = pset.validate()
    _print_diagnostics(diagnostics, err)
    n_err = sum(d.severity == 'error' for d in diagnostics)
    err.write('%s: %d error(s), %d warning(s)\n' % (
        pset.name, n_err, len(diagnostics) - n_err))
    return EXIT_INVALID if has_errors(diagnostics) else EXIT_OK


class StatRow(tuple):
    def row(self):
        return tuple(str(x) for x in self)

    def text(self):
        return '%-6s %-28s %d' % self


class DanglingRow(tuple):
    def row(self):
        return tuple(str(x) for x in self)

    def text(self):
        return ' '.join(str(x) for x in self)


def cmd_query(args, out, err) -> int:
    pset = _load(args)
    what = args.what
    if what == 'realisations':
        rows = analysis.realisations(
            pset, args.group, args.role, lang=args.lang,
            skip_binding_tags=_tags(args.skip_tags),
            skip_pred_tags=_tags(args.skip_pred_tags),
            skip_align_tags=_tags(args.exclude_align_tags))
    elif what == 'frames':
        langs = [args.lang] if args.lang else sorted((pset.lang_a,
                                                      pset.lang_b))
        rows = [f for lang in langs
                for f in analysis.frames(pset, lang, args.group)]
    elif what == 'aligntag':
        rows = analysis.find_by_align_tag(pset, args.tag)
    elif what == 'stats':
        rows = [StatRow(r) for r in analysis.stats(pset)]
    elif what == 'dangling':
        report = dangling_report(pset)
        rows = [DanglingRow(('predicate', d.lang, d.sid, d.pid, d.name))
                for d in report.predicates]
        rows += [DanglingRow(('argument', d.lang, d.sid, d.pid, d.aid, d.role,
                              d.counterpart)) for d in report.arguments]
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError('unknown query %r' % what)
    _emit(rows, args.format, out)
    return EXIT_OK


def cmd_cluster(args, out, err) -> int:
    pset = _load(args)
    graph = analysis.build_graph(pset, _tags(args.exclude_align_tags))
    clusters = analysis.derive_clusters(graph, args.min_count)
    for k, cluster in enumerate(clusters, 1):
        members = ','.join(map(str, cluster.members))
        if args.format == 'tsv':
            out.write('cluster\t%d\t%s\n' % (k, members))
        else:
            out.write('cluster %d: %s\n' % (k, ' '.join(
                map(str, cluster.members))))
    for k, cluster in enumerate(clusters, 1):
        for j, cls in enumerate(cluster.role_classes, 1):
            if args.format == 'tsv':
                out.write('roles\t%d\t%d\t%s\n' % (k, j, ','.join(map(str,
                                                                       cls))))
            else:
                out.write('  cluster %d role class %d: %s\n' % (
                    k, j, ' '.join(map(str, cls))))
    return EXIT_OK


def cmd_ingest(args, out, err) -> int:
    target = Path(args.out)
    if target.exists() and any(target.iterdir()) and not args.force:
        raise FileExistsError('%s exists and is not empty; pass --force to '
                              'overwrite' % target)
    result = ingest_pairs(args.src, args.tgt, args.doc, args.lang_a,
                          args.lang_b, first_number=args.first_number)
    name = args.set or target.name
    pset = ingest_to_set(result, name)
    _write_dir_atomically(render_set(pset), target, force=True)
    err.write('ingested %d sentence pairs into %s (%s)\n' % (
        len(result.pairs), target, MANIFEST_NAME))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='fusekit',
        description='Parallel treebank tools: import, validate, query and '
                    'cluster predicate-argument alignments.')
    sub = parser.add_subparsers(dest='command', required=True)

    def set_options(p):
        p.add_argument('--manifest', default=os.environ.get('FUSE_MANIFEST'),
                       help='manifest file (default: $FUSE_MANIFEST)')
        p.add_argument('--set', help='set name; optional if the manifest '
                       'declares a single set')

    def fmt_option(p):
        p.add_argument('--format', choices=('tsv', 'text'), default='tsv')

    p = sub.add_parser('import', help='load a set and write canonical files')
    set_options(p)
    p.add_argument('--strict', action='store_true',
                   help='fail (exit 1) on any error-severity diagnostic')
    p.add_argument('--out', help='write <out>/<set>/ instead of rewriting '
                   'the manifest files in place')
    p.add_argument('--force', action='store_true')
    p.set_defaults(func=cmd_import)

    p = sub.add_parser('validate', help='report annotation and alignment '
                       'diagnostics')
    set_options(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser('query', help='query a set')
    set_options(p)
    p.add_argument('what', choices=('realisations', 'frames', 'aligntag',
                                    'stats', 'dangling'))
    p.add_argument('--group')
    p.add_argument('--role')
    p.add_argument('--lang')
    p.add_argument('--tag')
    p.add_argument('--skip-tags', action='append',
                   help='skip arguments whose binding has one of these tags')
    p.add_argument('--skip-pred-tags', action='append',
                   help='skip structures whose predicate binding has one of '
                   'these tags')
    p.add_argument('--exclude-align-tags', action='append',
                   help='skip arguments linked by alignments with these tags')
    fmt_option(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser('cluster', help='derive predicate clusters')
    set_options(p)
    p.add_argument('--min-count', type=_positive, default=1)
    p.add_argument('--exclude-align-tags', action='append')
    fmt_option(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser('ingest', help='build skeleton stores from two '
                       'line-aligned text files')
    p.add_argument('--src', required=True)
    p.add_argument('--tgt', required=True)
    p.add_argument('--doc', required=True)
    p.add_argument('--lang-a', required=True)
    p.add_argument('--lang-b', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--set', help='set name (default: basename of --out)')
    p.add_argument('--first-number', type=_positive, default=1,
                   help='sentence number of the first line')
    p.add_argument('--force', action='store_true')
    p.set_defaults(func=cmd_ingest)
    return parser


def _check_query(args) -> None:
    if args.command != 'query':
        return
    needed = {'realisations': ('group', 'role'), 'frames': ('group', ),
              'aligntag': ('tag', )}.get(args.what, ())
    missing = ['--' + n for n in needed if getattr(args, n) is None]
    if missing:
        raise UsageError('query %s needs %s' % (args.what, ' '.join(missing)))


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_FAILURE if exc.code else EXIT_OK
    try:
        _check_query(args)
        return args.func(args, out, err)
    except (UsageError, FuseError, OSError, ValueError) as exc:
        err.write('fusekit: error: %s\n' % exc)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
