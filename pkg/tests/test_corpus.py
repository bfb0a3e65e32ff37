import itertools
import json

import pytest

from vultype.corpus import (
    Dataset,
    SplitSpec,
    TypeVocabulary,
    VulnFunction,
    label_vector,
    load_dataset,
    rare_types,
    rename_types,
    save_dataset,
    split_dataset,
)
from vultype.errors import DatasetError


def mk(fid, labels, source="int x = 0;"):
    return VulnFunction(id=fid, source=source, labels=frozenset(labels))


def make_dataset(n, types=("dos", "overflow")):
    functions = tuple(mk(f"f{i:03d}", [types[i % len(types)]]) for i in range(n))
    return Dataset(functions=functions, vocabulary=TypeVocabulary.from_labels(types))


# ------------------------------------------------------------------- loading

def test_load_jsonl_roundtrip_of_two_records(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(
        json.dumps({"id": "a", "source": "int x;", "labels": ["dos"]}) + "\n"
        + json.dumps({"id": "b", "source": "int y;", "labels": ["overflow"]}) + "\n"
    )
    d = load_dataset(path, "jsonl")
    assert len(d) == 2
    assert len(d.vocabulary) == 2
    assert d.vocabulary.names == ("dos", "overflow")  # lexicographic inference
    assert d.functions[0].labels == frozenset({"dos"})


def test_load_rejects_empty_source(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(json.dumps({"id": "a", "source": "", "labels": []}) + "\n")
    with pytest.raises(DatasetError, match="empty source"):
        load_dataset(path, "jsonl")


def test_load_reports_line_number_for_malformed_record(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text('{"id": "a", "source": "x;", "labels": []}\n{oops\n')
    with pytest.raises(DatasetError, match="line 2"):
        load_dataset(path, "jsonl")


def test_load_rejects_duplicate_ids(tmp_path):
    path = tmp_path / "data.jsonl"
    row = json.dumps({"id": "a", "source": "x;", "labels": []})
    path.write_text(row + "\n" + row + "\n")
    with pytest.raises(DatasetError, match="duplicate id"):
        load_dataset(path, "jsonl")


def test_load_rejects_label_outside_supplied_vocabulary(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(json.dumps({"id": "a", "source": "x;", "labels": ["dos"]}) + "\n")
    with pytest.raises(DatasetError, match="outside supplied vocabulary"):
        load_dataset(path, "jsonl", vocabulary=TypeVocabulary(("overflow",)))


def test_csv_semicolon_labels_match_handwritten_fixture(tmp_path):
    # hand-written RFC-4180 fixture: quoted source containing a comma and newline
    fixture = tmp_path / "data.csv"
    fixture.write_text(
        'id,source,labels\r\n'
        'a,"int x, y;\nreturn x;",dos;overflow\r\n'
        'b,int z;,dos\r\n'
    )
    d = load_dataset(fixture, "csv")
    assert d.functions[0].labels == frozenset({"dos", "overflow"})
    assert d.functions[0].source == "int x, y;\nreturn x;"
    assert d.functions[1].labels == frozenset({"dos"})

    # re-serialize and reload: the (id, source, labels) triples survive
    out = tmp_path / "out.csv"
    save_dataset(d, out, "csv")
    d2 = load_dataset(out, "csv")
    assert [(f.id, f.source, f.labels) for f in d2.functions] == [
        (f.id, f.source, f.labels) for f in d.functions
    ]


@pytest.mark.parametrize("format", ["jsonl", "csv"])
def test_load_save_load_identity(tmp_path, format):
    d = make_dataset(7, types=("a", "b", "c"))
    path = tmp_path / f"data.{format}"
    save_dataset(d, path, format)
    d2 = load_dataset(path, format)
    assert [(f.id, f.source, f.labels) for f in d2.functions] == [
        (f.id, f.source, f.labels) for f in d.functions
    ]


# ------------------------------------------------------------------ splitting

def test_split_sizes_floor_with_remainder_to_train():
    d = make_dataset(10)
    train, val, test = split_dataset(d, SplitSpec(ratios=(0.8, 0.1, 0.1), seed=7))
    assert (len(train), len(val), len(test)) == (8, 1, 1)

    d11 = make_dataset(11)
    train, val, test = split_dataset(d11, SplitSpec(ratios=(0.8, 0.1, 0.1), seed=7))
    assert (len(train), len(val), len(test)) == (9, 1, 1)


def test_split_is_deterministic():
    d = make_dataset(10)
    spec = SplitSpec(ratios=(0.8, 0.1, 0.1), seed=7)
    a = split_dataset(d, spec)
    b = split_dataset(d, spec)
    for part_a, part_b in zip(a, b):
        assert part_a.ids() == part_b.ids()


def test_split_seed_changes_membership_not_sizes():
    d = make_dataset(100)
    s1 = split_dataset(d, SplitSpec(ratios=(0.8, 0.1, 0.1), seed=1))
    s2 = split_dataset(d, SplitSpec(ratios=(0.8, 0.1, 0.1), seed=2))
    assert [len(p) for p in s1] == [len(p) for p in s2] == [80, 10, 10]
    assert set(s1[0].ids()) != set(s2[0].ids())


def test_split_partitions_the_dataset():
    d = make_dataset(37, types=("a", "b", "c"))
    for seed in range(5):
        parts = split_dataset(d, SplitSpec(ratios=(0.6, 0.2, 0.2), seed=seed))
        combined = sorted(fid for p in parts for fid in p.ids())
        assert combined == sorted(d.ids())


def test_split_too_small():
    d = make_dataset(2)
    with pytest.raises(DatasetError, match="too small"):
        split_dataset(d, SplitSpec(ratios=(0.8, 0.1, 0.1), seed=0))


def test_split_ratios_must_sum_to_one():
    with pytest.raises(DatasetError, match="sum to 1.0"):
        SplitSpec(ratios=(0.8, 0.1, 0.2), seed=0)


# -------------------------------------------------------------- label vectors

def test_label_vector_examples():
    vocab = TypeVocabulary(("t0", "t1", "t2"))
    assert label_vector(mk("a", []), vocab).bits == (0, 0, 0)
    assert label_vector(mk("b", ["t2"]), vocab).bits == (0, 0, 1)
    assert label_vector(mk("c", ["t0", "t2"]), vocab).bits == (1, 0, 1)


def test_label_vector_rejects_unknown_label():
    vocab = TypeVocabulary(("t0",))
    with pytest.raises(DatasetError, match="unknown label"):
        label_vector(mk("a", ["nope"]), vocab)


def test_label_vector_injective_on_label_sets():
    vocab = TypeVocabulary(("t0", "t1", "t2"))
    seen = set()
    for r in range(4):
        for subset in itertools.combinations(vocab.names, r):
            bits = label_vector(mk("x", subset), vocab).bits
            assert bits not in seen
            seen.add(bits)


def test_vocabulary_invariants():
    with pytest.raises(DatasetError):
        TypeVocabulary(("a", "a"))
    with pytest.raises(DatasetError):
        TypeVocabulary(("a", ""))
    vocab = TypeVocabulary.from_labels(["z", "a", "m", "a"])
    assert vocab.names == ("a", "m", "z")
    assert [vocab.position(n) for n in vocab.names] == [0, 1, 2]


# ------------------------------------------------------------- rare grouping

def test_group_below_renames_rare_types():
    functions = tuple(
        [mk(f"d{i}", ["dos"]) for i in range(5)]
        + [mk("r0", ["rare"]), mk("r1", ["rare", "dos"])]
    )
    d = Dataset(functions=functions, vocabulary=TypeVocabulary.from_labels(["dos", "rare"]))
    rare = rare_types(d, 3)
    assert rare == {"rare"}
    grouped = rename_types(d, rare)
    assert "rare" not in grouped.vocabulary.names
    assert "others" in grouped.vocabulary.names
    assert grouped.functions[5].labels == frozenset({"others"})
    assert grouped.functions[6].labels == frozenset({"others", "dos"})
