import pytest

from magnet.dataset import load_dataset
from magnet.errors import FormatError

GOOD = "int f(int a){ return a; }"
GOOD2 = "int g(int b){ return b + 1; }"
BROKEN = "int h(int c){ return }"


def write_corpus(tmp_path, fragments, pair_lines):
    src_dir = tmp_path / "src"
    src_dir.mkdir(exist_ok=True)
    manifest = []
    for fid, code in fragments:
        (src_dir / f"{fid}.java").write_text(code)
        manifest.append(f"{fid}\tsrc/{fid}.java")
    (tmp_path / "manifest.tsv").write_text("\n".join(manifest) + "\n")
    (tmp_path / "pairs.tsv").write_text("\n".join(pair_lines) + ("\n" if pair_lines else ""))
    return tmp_path / "manifest.tsv", tmp_path / "pairs.tsv"


def test_empty_pairs_file(tmp_path):
    m, p = write_corpus(tmp_path, [("a", GOOD)], [])
    ds = load_dataset(m, p, warn=lambda _: None)
    assert ds.pairs == []
    assert len(ds.fragments) == 1


def test_counts(tmp_path):
    frags = [("a", GOOD), ("b", GOOD2), ("c", GOOD), ("d", GOOD2)]
    pairs = ["a\tb\t1\tT2", "c\td\t0", "a\tc\t1"]
    m, p = write_corpus(tmp_path, frags, pairs)
    ds = load_dataset(m, p, warn=lambda _: None)
    assert len(ds.fragments) == 4
    assert len(ds.pairs) == 3
    assert ds.pairs[0].clone_type == "T2"
    assert ds.pairs[1].label == 0


def test_unknown_id_is_format_error(tmp_path):
    m, p = write_corpus(tmp_path, [("a", GOOD)], ["a\tmissing\t1"])
    with pytest.raises(FormatError) as exc:
        load_dataset(m, p, warn=lambda _: None)
    assert "missing" in str(exc.value)


def test_parse_failures_excluded_with_warning(tmp_path):
    m, p = write_corpus(tmp_path, [("a", GOOD), ("bad", BROKEN), ("b", GOOD2)],
                        ["a\tb\t1", "a\tbad\t1"])
    warnings = []
    ds = load_dataset(m, p, warn=warnings.append)
    assert ds.skipped_fragments == ["bad"]
    assert len(ds.pairs) == 1
    assert ds.skipped_pairs == 1
    assert any("bad" in w for w in warnings)
    assert any("1 fragment" in w for w in warnings)


def test_duplicate_id_rejected(tmp_path):
    m, p = write_corpus(tmp_path, [("a", GOOD), ("a", GOOD2)], [])
    with pytest.raises(FormatError):
        load_dataset(m, p, warn=lambda _: None)


def test_bad_label_rejected(tmp_path):
    m, p = write_corpus(tmp_path, [("a", GOOD), ("b", GOOD2)], ["a\tb\t2"])
    with pytest.raises(FormatError):
        load_dataset(m, p, warn=lambda _: None)


def test_bad_clone_type_rejected(tmp_path):
    m, p = write_corpus(tmp_path, [("a", GOOD), ("b", GOOD2)], ["a\tb\t1\tT9"])
    with pytest.raises(FormatError):
        load_dataset(m, p, warn=lambda _: None)


def test_malformed_manifest_line(tmp_path):
    (tmp_path / "manifest.tsv").write_text("justonefield\n")
    (tmp_path / "pairs.tsv").write_text("")
    with pytest.raises(FormatError) as exc:
        load_dataset(tmp_path / "manifest.tsv", tmp_path / "pairs.tsv", warn=lambda _: None)
    assert exc.value.lineno == 1
