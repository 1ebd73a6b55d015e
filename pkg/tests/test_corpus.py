from __future__ import annotations

import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from codeanomaly.corpus import (Corpus, FormatError, IngestLog, build_corpus, dedup_units, file_facade_class,
                                ingest_bytecode, ingest_source, ingest_trees, javap_to_listing, link_units,
                                parse_listing, serialize_trees)
from codeanomaly.synthetic import TEMPLATES


def write(tmp_path, name, text):
    p = tmp_path / name
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p


def test_two_functions_in_one_file(tmp_path):
    p = write(tmp_path, "a.kt", "fun one() = 1\n\nfun two(x: Int): Int {\n    return x\n}\n")
    units = ingest_source([p])
    assert [u.display_name for u in units] == ["one", "two"]
    assert units[1].origin.start_line == 3 and units[1].origin.end_line == 5
    assert units[1].excerpt.startswith("fun two")


def test_empty_input():
    assert ingest_source([]) == []


def test_bad_file_is_skipped_and_logged(tmp_path):
    bad = write(tmp_path, "bad.kt", "fun f( {\n")
    ok = write(tmp_path, "ok.kt", "fun g() {}\n")
    ilog = IngestLog()
    units = ingest_source([bad, ok], ilog)
    assert len(units) == 1 and units[0].display_name == "g"
    assert len(ilog.skipped) == 1 and ilog.skipped[0]["path"].endswith("bad.kt")


def test_unreadable_file_is_skipped(tmp_path):
    ilog = IngestLog()
    assert ingest_source([tmp_path / "missing.kt"], ilog) == []
    assert len(ilog.skipped) == 1


def test_members_nested_and_local_functions_are_units(fixture_corpus):
    owners = {u.display_name: u.owner for u in fixture_corpus.functions}
    assert len(fixture_corpus.functions) >= 15
    assert all(o for o in owners.values())
    assert any(o.endswith("Kt") for o in owners.values())
    assert any("$" in o for o in owners.values())


def test_file_facade_names():
    assert file_facade_class("src/util.kt", "com.example") == "com.example.UtilKt"
    assert file_facade_class("my-file.kt", "") == "My_fileKt"


def test_trees_round_trip(tmp_path):
    src = write(tmp_path, "t.kt", "fun a() = 1\nfun b(x: Int) = x\nclass C {\n    fun c() {}\n}\n")
    units = ingest_source([src])
    assert len(units) == 3
    trees = write(tmp_path, "trees.jsonl", serialize_trees(units))
    back = ingest_trees(trees)
    assert [u.unit_id for u in back] == [u.unit_id for u in units]
    assert [u.owner for u in back] == [u.owner for u in units]


def test_empty_tree_file(tmp_path):
    assert ingest_trees(write(tmp_path, "e.jsonl", "")) == []


def test_unknown_node_kind_is_named(tmp_path):
    good = json.dumps({"kind": "FUNCTION", "children": [{"kind": "IDENTIFIER", "children": [], "text": "f"}]})
    bad = json.dumps({"kind": "FUNCTION", "children": [{"kind": "MACRO_CALL", "children": []}]})
    with pytest.raises(FormatError) as err:
        ingest_trees(write(tmp_path, "bad.jsonl", good + "\n" + bad + "\n"))
    assert "MACRO_CALL" in str(err.value) and "record 2" in str(err.value)
    assert err.value.line == 2


LISTING = """class com.example.FooKt
method add
iload_0
iload_1
ireturn
method zero
iconst_0
ireturn

class com.example.Bar
method get
aload_0
areturn
"""


def test_listing_concatenates_methods(tmp_path):
    units = ingest_bytecode(write(tmp_path, "bc.txt", LISTING))
    assert [u.class_name for u in units] == ["com.example.FooKt", "com.example.Bar"]
    assert units[0].instructions == ["iload_0", "iload_1", "ireturn", "iconst_0", "ireturn"]
    assert units[0].methods == ["add", "zero"]


def test_empty_listing(tmp_path):
    assert ingest_bytecode(write(tmp_path, "e.txt", "")) == []


def test_unknown_mnemonic_kept_and_recorded():
    issues = []
    units = parse_listing("class A\nmethod m\nfrobnicate 1\nreturn\n", issues=issues)
    assert units[0].instructions == ["frobnicate", "return"]
    assert issues[0]["issue"] == "unknown-mnemonic"


def test_operands_are_stripped():
    units = parse_listing("class A\nmethod m\nldc \"hello\"\ninvokestatic #12 // Method x\n")
    assert units[0].instructions == ["ldc", "invokestatic"]


@pytest.mark.parametrize("text", ["iload_0\n", "class A\nclass B\n", "class A\niload_0\n", "class A\nmethod\n"])
def test_malformed_listing(text):
    with pytest.raises(FormatError):
        parse_listing(text)


JAVAP = """Compiled from "Foo.kt"
public final class com.example.FooKt {
  public static final int add(int, int);
    Code:
       0: iload_0
       1: iload_1
       2: iadd
       3: ireturn

  public static final java.lang.String hello();
    Code:
       0: ldc           #9                  // String hi
       2: areturn
}
"""


def test_javap_conversion():
    units = parse_listing(javap_to_listing(JAVAP))
    assert len(units) == 1
    assert units[0].class_name == "com.example.FooKt"
    assert units[0].methods == ["add", "hello"]
    assert units[0].instructions == ["iload_0", "iload_1", "iadd", "ireturn", "ldc", "areturn"]


def test_dedup_identical_functions_in_two_files(tmp_path):
    a = write(tmp_path, "a.kt", "fun f(x: Int) = x + 1\n")
    b = write(tmp_path, "b.kt", "\n\n\nfun f(x: Int) = x + 1\n")
    units = dedup_units(ingest_source([a, b]))
    assert len(units) == 1
    assert units[0].origin.path.endswith("a.kt")


def test_dedup_keeps_identifier_differences(tmp_path):
    a = write(tmp_path, "a.kt", "fun f(x: Int) = x + 1\nfun f(y: Int) = y + 1\n")
    assert len(dedup_units(ingest_source([a]))) == 2


def test_linking_by_owner(tmp_path):
    write(tmp_path, "src/com/example/foo.kt", "package com.example\n\nfun add(a: Int, b: Int) = a + b\n")
    write(tmp_path, "bc.txt", LISTING)
    corpus = build_corpus(src=str(tmp_path / "src"), bytecode=str(tmp_path / "bc.txt"))
    foo = next(c for c in corpus.classes if c.class_name == "com.example.FooKt")
    assert corpus.links == {foo.unit_id: [corpus.functions[0].unit_id]}
    assert foo.source_link == [corpus.functions[0].unit_id]
    bar = next(c for c in corpus.classes if c.class_name == "com.example.Bar")
    assert bar.source_link == []
    assert link_units([], corpus.classes) == {}


def test_corpus_save_load(tmp_path, fixtures):
    corpus = build_corpus(src=str(fixtures / "corpus"))
    again = Corpus.load(corpus.save(tmp_path / "c"))
    assert again.corpus_id == corpus.corpus_id
    assert [u.to_record() for u in again.functions] == [u.to_record() for u in corpus.functions]


def test_ingest_twice_same_ids(fixtures):
    first = build_corpus(src=str(fixtures / "corpus"))
    second = build_corpus(src=str(fixtures / "corpus"))
    assert [u.unit_id for u in first.functions] == [u.unit_id for u in second.functions]


@given(st.lists(st.tuples(st.integers(0, 10_000), st.integers(0, len(TEMPLATES) - 1)), min_size=1, max_size=8))
def test_one_unit_per_declaration_and_serialize_round_trip(tmp_path_factory, picks):
    # nested functions count too, so compare against FUNCTION nodes rather than templates
    srcs = [TEMPLATES[w](random.Random(s)) for s, w in picks]
    d = tmp_path_factory.mktemp("gen")
    p = d / "gen.kt"
    p.write_text("\n\n".join(srcs) + "\n")
    units = ingest_source([p])
    expected = sum(src.count("fun ") for src in srcs)
    assert len(units) == expected
    (d / "t.jsonl").write_text(serialize_trees(units))
    assert [u.unit_id for u in ingest_trees(d / "t.jsonl")] == [u.unit_id for u in units]
