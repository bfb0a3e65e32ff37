"""Dataset model, JSONL/CSV ingestion, deterministic splitting, label vectors.

A dataset is a list of known-vulnerable functions, each carrying raw source
text and a set of vulnerability-type labels. The split is an unstratified
seeded shuffle; the shuffle algorithm identifier is recorded in the split
manifest so runs are reproducible.
"""

from __future__ import annotations

import csv
import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DatasetError
from .persist import dump_json

# random.Random is CPython's MT19937; shuffle is Fisher-Yates. Recorded in
# manifests because splits only reproduce under the same PRNG.
PRNG_ID = "python-random-mt19937-fisher-yates"

OTHERS_LABEL = "others"


@dataclass(frozen=True)
class TypeVocabulary:
    """Ordered set of vulnerability type names; position = bit index."""

    names: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise DatasetError("type names must be unique")
        if any(not n for n in self.names):
            raise DatasetError("type names must be non-empty")
        object.__setattr__(self, "index", {n: i for i, n in enumerate(self.names)})

    @classmethod
    def from_labels(cls, labels) -> "TypeVocabulary":
        return cls(tuple(sorted(set(labels))))

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def position(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise DatasetError(f"unknown label {name!r}") from None


@dataclass(frozen=True)
class VulnFunction:
    id: str
    source: str
    labels: frozenset[str]

    def __post_init__(self):
        if not self.source:
            raise DatasetError(f"function {self.id!r}: empty source")


@dataclass(frozen=True)
class Dataset:
    functions: tuple[VulnFunction, ...]
    vocabulary: TypeVocabulary

    def __len__(self) -> int:
        return len(self.functions)

    def ids(self) -> list[str]:
        return [f.id for f in self.functions]

    def label_counts(self) -> Counter:
        counts = Counter()
        for f in self.functions:
            counts.update(f.labels)
        return counts


@dataclass(frozen=True)
class LabelVector:
    bits: tuple[int, ...]


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple[float, float, float]
    seed: int

    def __post_init__(self):
        if len(self.ratios) != 3 or any(r < 0 for r in self.ratios):
            raise DatasetError("split needs three non-negative ratios")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise DatasetError(f"split ratios must sum to 1.0, got {sum(self.ratios)}")


def _make_function(record: dict, where: str) -> VulnFunction:
    for key in ("id", "source", "labels"):
        if key not in record:
            raise DatasetError(f"{where}: missing field {key!r}")
    fid, source, labels = record["id"], record["source"], record["labels"]
    if not isinstance(fid, str) or not fid:
        raise DatasetError(f"{where}: id must be a non-empty string")
    if not isinstance(source, str) or not source:
        raise DatasetError(f"{where}: empty source")
    if not isinstance(labels, (list, tuple, set, frozenset)) or any(
        not isinstance(l, str) or not l for l in labels
    ):
        raise DatasetError(f"{where}: labels must be a list of non-empty strings")
    return VulnFunction(id=fid, source=source, labels=frozenset(labels))


def _read_jsonl(path: Path) -> list[VulnFunction]:
    functions = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path.name} line {lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: malformed record: {exc}") from None
            if not isinstance(record, dict):
                raise DatasetError(f"{where}: record must be a JSON object")
            functions.append(_make_function(record, where))
    return functions


def _read_csv(path: Path) -> list[VulnFunction]:
    functions = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path.name}: empty CSV") from None
        if header != ["id", "source", "labels"]:
            raise DatasetError(f"{path.name}: expected header id,source,labels, got {header}")
        for lineno, row in enumerate(reader, start=2):
            where = f"{path.name} line {lineno}"
            if len(row) != 3:
                raise DatasetError(f"{where}: expected 3 columns, got {len(row)}")
            labels = [part for part in row[2].split(";") if part]
            functions.append(_make_function({"id": row[0], "source": row[1], "labels": labels}, where))
    return functions


def load_dataset(path: str | Path, format: str = "jsonl",
                 vocabulary: TypeVocabulary | None = None) -> Dataset:
    """Load a dataset file. Labels outside an explicitly supplied vocabulary are errors;
    when no vocabulary is given it is inferred as the sorted set of observed labels."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    if format == "jsonl":
        functions = _read_jsonl(path)
    elif format == "csv":
        functions = _read_csv(path)
    else:
        raise DatasetError(f"unknown dataset format {format!r}")

    seen = set()
    for f in functions:
        if f.id in seen:
            raise DatasetError(f"duplicate id {f.id!r}")
        seen.add(f.id)

    observed = {l for f in functions for l in f.labels}
    if vocabulary is None:
        vocabulary = TypeVocabulary.from_labels(observed)
    else:
        unknown = observed - set(vocabulary.names)
        if unknown:
            raise DatasetError(f"labels outside supplied vocabulary: {sorted(unknown)}")
    return Dataset(functions=tuple(functions), vocabulary=vocabulary)


def save_dataset(dataset: Dataset, path: str | Path, format: str = "jsonl") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for f in dataset.functions:
                row = {"id": f.id, "source": f.source, "labels": sorted(f.labels)}
                fh.write(json.dumps(row, ensure_ascii=True) + "\n")
    elif format == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "source", "labels"])
            for f in dataset.functions:
                writer.writerow([f.id, f.source, ";".join(sorted(f.labels))])
    else:
        raise DatasetError(f"unknown dataset format {format!r}")
    return path


def split_dataset(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Seeded shuffle, then slice into train/validation/test.

    Sizes are floor(N * ratio) for validation and test; the remainder goes to
    train. The partition is a pure function of (seed, input id order).
    """
    n = len(dataset)
    if n < 3 and all(r > 0 for r in spec.ratios):
        raise DatasetError("dataset too small to split")
    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    n_val = math.floor(n * spec.ratios[1])
    n_test = math.floor(n * spec.ratios[2])
    n_train = n - n_val - n_test
    picks = (order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:])
    return tuple(
        Dataset(functions=tuple(dataset.functions[i] for i in part), vocabulary=dataset.vocabulary)
        for part in picks
    )


def label_vector(function: VulnFunction, vocabulary: TypeVocabulary) -> LabelVector:
    for l in function.labels:
        if l not in vocabulary:
            raise DatasetError(f"function {function.id!r}: unknown label {l!r}")
    bits = tuple(1 if name in function.labels else 0 for name in vocabulary.names)
    return LabelVector(bits=bits)


def label_matrix(dataset: Dataset) -> list[LabelVector]:
    return [label_vector(f, dataset.vocabulary) for f in dataset.functions]


def rare_types(train: Dataset, threshold: int) -> set[str]:
    """Types with fewer than `threshold` training cases."""
    counts = train.label_counts()
    return {name for name in train.vocabulary.names if counts.get(name, 0) < threshold}


def rename_types(dataset: Dataset, renamed: set[str],
                 replacement: str = OTHERS_LABEL) -> Dataset:
    """Collapse the given types into one replacement label across the dataset."""
    if not renamed:
        return dataset
    functions = tuple(
        VulnFunction(
            id=f.id,
            source=f.source,
            labels=frozenset(replacement if l in renamed else l for l in f.labels),
        )
        for f in dataset.functions
    )
    keep = [n for n in dataset.vocabulary.names if n not in renamed]
    if replacement not in keep:
        keep.append(replacement)
    return Dataset(functions=functions, vocabulary=TypeVocabulary.from_labels(keep))


def write_splits(splits: tuple[Dataset, Dataset, Dataset], out_dir: str | Path,
                 spec: SplitSpec, group_below: int = 0,
                 renamed: set[str] | None = None) -> dict:
    """Write train/validation/test JSONL files plus split-manifest.json."""
    out_dir = Path(out_dir)
    names = ("train", "validation", "test")
    for name, part in zip(names, splits):
        save_dataset(part, out_dir / f"{name}.jsonl")
    manifest = {
        "seed": spec.seed,
        "ratios": list(spec.ratios),
        "prng": PRNG_ID,
        "types": list(splits[0].vocabulary.names),
        "group_below": group_below,
        "renamed_types": sorted(renamed) if renamed else [],
        "splits": {name: part.ids() for name, part in zip(names, splits)},
    }
    dump_json(out_dir / "split-manifest.json", manifest)
    return manifest
