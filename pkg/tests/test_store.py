import os
import shutil
from pathlib import Path

import pytest

from fusekit import (Argument, Binding, IngestError, LoadError, ParseError,
                     PredArgStructure, PredicateEntry, ValidationFailed,
                     ingest_pairs, load_manifest, load_set, save_set)
from fusekit.store import (parse_manifest, render_set, rewrite_in_place,
                           ingest_to_set)

SETS = ('nominate', 'raise', 'harmonise', 'give', 'absopp', 'interpret', 'propose', 'buy')


def copy_set(fixtures_dir, name, dest):
    target = dest / name
    shutil.copytree(fixtures_dir / name, target)
    return target / 'manifest.fuse'


@pytest.mark.parametrize('name', SETS)
def test_fixture_files_are_canonical(fixtures_dir, name):
    pset = load_set(fixtures_dir / name / 'manifest.fuse')
    for fname, content in render_set(pset).items():
        assert (fixtures_dir / name / fname).read_text('utf-8') == content


def test_load_manifest_shares_stores(tmp_path, fixtures_dir):
    shutil.copytree(fixtures_dir / 'nominate', tmp_path / 'nominate')
    (tmp_path / 'm.fuse').write_text(
        '% two views over the same trees\n'
        'SET one A=en:nominate/en.ftb:nominate/en.paa B=de:nominate/de.ftb:nominate/de.paa '
        'ALIGN=nominate/en-de.aln\n'
        'SET two A=en:nominate/en.ftb:nominate/en.paa B=de:nominate/de.ftb:nominate/de.paa '
        'ALIGN=nominate/en-de.aln\n')
    sets = load_manifest(tmp_path / 'm.fuse')
    assert sets['one'].store_a is sets['two'].store_a
    assert sets['one'].alignment is not sets['two'].alignment
    with pytest.raises(LoadError, match='declares 2 sets'):
        load_set(tmp_path / 'm.fuse')


def test_load_errors(tmp_path, fixtures_dir):
    m = copy_set(fixtures_dir, 'nominate', tmp_path)
    with pytest.raises(LoadError, match='no set'):
        load_set(m, 'nope')
    (m.parent / 'de.paa').unlink()
    with pytest.raises(LoadError, match='missing file'):
        load_set(m)
    with pytest.raises(LoadError, match='cannot read manifest'):
        load_set(tmp_path / 'absent.fuse')


@pytest.mark.parametrize('text, pattern', [
    ('SET s A=en:a:b B=de:c:d\n', 'SET <name>'),
    ('SET s A=en:a:b B=en:c:d ALIGN=x\n', 'with itself'),
    ('SET s A=en:a B=de:c:d ALIGN=x\n', '<lang>:<ftb>:<paa>'),
    ('SET s A=en:a:b A=de:c:d ALIGN=x\n', 'unexpected field'),
    ('SET s A=en:a:b B=de:c:d ALIGN=x\nSET s A=en:a:b B=de:c:d ALIGN=x\n',
     'duplicate set'),
    ('VOCAB colour += red\n', 'VOCAB'),
    ('VOCAB aligntag += a,b\n', 'malformed tag'),
    ('INCLUDE other\n', 'unknown manifest directive'),
])
def test_manifest_errors(tmp_path, text, pattern):
    (tmp_path / 'm.fuse').write_text(text)
    with pytest.raises(ParseError, match=pattern):
        parse_manifest(tmp_path / 'm.fuse')


def test_vocabulary_extension_round_trip(tmp_path, fixtures_dir):
    m = copy_set(fixtures_dir, 'give', tmp_path)
    aln = m.parent / 'en-de.aln'
    aln.write_text(aln.read_text().replace('tags=incomp', 'tags=loose'))
    assert [d.rule for d in load_set(m).validate()] == ['UNKNOWN_TAG']
    m.write_text('VOCAB aligntag += loose\n' + m.read_text())
    pset = load_set(m)
    assert pset.validate() == []
    saved = save_set(pset, tmp_path / 'out')
    text = (saved / 'manifest.fuse').read_text()
    assert text.startswith('VOCAB aligntag += loose\n')
    assert load_set(saved / 'manifest.fuse').validate() == []


def test_strict_load(tmp_path, fixtures_dir):
    m = copy_set(fixtures_dir, 'raise', tmp_path)
    paa = m.parent / 'en.paa'
    paa.write_text(paa.read_text().replace('excl=n517', 'excl=-'))
    assert [d.rule for d in load_set(m).validate()] == ['RECURSION']
    with pytest.raises(ValidationFailed) as info:
        load_set(m, strict=True)
    assert [d.rule for d in info.value.diagnostics] == ['RECURSION']


class TestSave:
    def test_refuses_to_overwrite(self, tmp_path, manifest):
        pset = load_set(manifest, 'nominate')
        save_set(pset, tmp_path)
        with pytest.raises(FileExistsError):
            save_set(pset, tmp_path)
        save_set(pset, tmp_path, force=True)
        assert sorted(os.listdir(tmp_path)) == ['nominate']

    def test_failure_leaves_no_trace(self, tmp_path, manifest, monkeypatch):
        pset = load_set(manifest, 'nominate')
        first = save_set(pset, tmp_path)
        before = {p.name: p.read_bytes() for p in first.iterdir()}
        real = Path.write_bytes
        calls = []

        def flaky(self, data):
            calls.append(self)
            if len(calls) == 3:
                raise OSError(28, 'No space left on device')
            return real(self, data)

        monkeypatch.setattr(Path, 'write_bytes', flaky)
        with pytest.raises(OSError):
            save_set(pset, tmp_path, force=True)
        monkeypatch.undo()
        assert sorted(os.listdir(tmp_path)) == ['nominate']
        assert {p.name: p.read_bytes() for p in first.iterdir()} == before

    def test_failure_on_fresh_target(self, tmp_path, manifest, monkeypatch):
        pset = load_set(manifest, 'buy')

        def boom(self, data):
            raise OSError(13, 'Permission denied')

        monkeypatch.setattr(Path, 'write_bytes', boom)
        with pytest.raises(OSError):
            save_set(pset, tmp_path)
        monkeypatch.undo()
        assert os.listdir(tmp_path) == []

    def test_mutation_round_trip(self, tmp_path, manifest):
        pset = load_set(manifest, 'harmonise')
        key = ('de-en/ep-00-01-19.al', 489)
        extra = PredArgStructure(
            'P2', PredicateEntry('MUST', 1, 'V', 'MUST-G'), Binding(('t4', )),
            [Argument('A1', 'ENT_REQUIRED', Binding(('n503', )))])
        pset.store_a.add_structure(key, extra)
        again = load_set(save_set(pset, tmp_path) / 'manifest.fuse')
        assert again.store_a.structure(key, 'P2')[1] == extra
        assert render_set(again) == render_set(pset)


def test_rewrite_in_place(tmp_path, fixtures_dir):
    m = copy_set(fixtures_dir, 'buy', tmp_path)
    ftb = m.parent / 'en.ftb'
    ftb.write_bytes(ftb.read_bytes().rstrip(b'\n'))
    assert rewrite_in_place(m) == [ftb]
    assert ftb.read_bytes() == (fixtures_dir / 'buy' / 'en.ftb').read_bytes()
    assert rewrite_in_place(m) == []


class TestIngest:
    def write(self, tmp_path, a, b):
        pa, pb = tmp_path / 'a.txt', tmp_path / 'b.txt'
        pa.write_text(a)
        pb.write_text(b)
        return pa, pb

    def test_ingest(self, tmp_path):
        pa, pb = self.write(tmp_path, 'We buy land .\nThey buy bread .\n',
                            'Wir kaufen Land .\nSie kaufen Brot .')
        result = ingest_pairs(pa, pb, 'web/x.al', 'en', 'de', first_number=7)
        assert [p.sentence_number for p in result.pairs] == [7, 8]
        tree = result.trees_b[1]
        assert [t.form for t in tree.tokens] == ['Sie', 'kaufen', 'Brot', '.']
        assert str(tree.origin) == 'web/x.al:8:de'
        pset = ingest_to_set(result, 'web')
        assert len(pset.pair_registry) == 2
        again = load_set(save_set(pset, tmp_path / 'out') / 'manifest.fuse')
        assert render_set(again) == render_set(pset)

    def test_line_count_mismatch(self, tmp_path):
        pa, pb = self.write(tmp_path, 'a\nb\nc\n', 'x\ny\n')
        with pytest.raises(IngestError, match='has 3.*has 2'):
            ingest_pairs(pa, pb, 'd', 'en', 'de')

    def test_empty_line(self, tmp_path):
        pa, pb = self.write(tmp_path, 'a\nb\n', 'x\n  \n')
        with pytest.raises(IngestError, match='line 2 is empty'):
            ingest_pairs(pa, pb, 'd', 'en', 'de')

    def test_same_language(self, tmp_path):
        pa, pb = self.write(tmp_path, 'a\n', 'x\n')
        with pytest.raises(IngestError):
            ingest_pairs(pa, pb, 'd', 'en', 'en')
