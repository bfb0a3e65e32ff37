"""Bag-of-words TF-IDF over unigrams and bigrams, with chi-square selection.

The TF-IDF channel vectorizes the full lexed token stream of a function
(operators and punctuation included), unlike the element buckets used for
token mining. idf is the smoothed variant ln((1+N)/(1+df)) + 1 and vectors
are L2-normalized.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

from .corpus import LabelVector
from .errors import FeatureError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TfIdfVocabulary:
    terms: tuple[str, ...]
    idf: tuple[float, ...]
    doc_count: int
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def to_json_dict(self) -> dict:
        return {"terms": list(self.terms), "idf": list(self.idf), "doc_count": self.doc_count}

    @classmethod
    def from_json_dict(cls, data: dict) -> "TfIdfVocabulary":
        return cls(terms=tuple(data["terms"]), idf=tuple(data["idf"]),
                   doc_count=int(data["doc_count"]))


@dataclass(frozen=True)
class FeatureVector:
    """Sparse TF-IDF vector: term index -> weight, L2-normalized (or all-zero)."""

    entries: dict[int, float]
    norm: float


@dataclass(frozen=True)
class Chi2Selection:
    kept: tuple[int, ...]
    p_threshold: float
    scores: dict[int, tuple[float, float]]  # term index -> (chi2, p) at its best label
    warnings: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {"kept": list(self.kept), "p_threshold": self.p_threshold}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Chi2Selection":
        return cls(kept=tuple(int(i) for i in data["kept"]),
                   p_threshold=float(data["p_threshold"]), scores={})


def build_ngrams(tokens: list[str]) -> Counter:
    """Unigrams plus adjacent-pair bigrams (joined by one space), with counts."""
    grams = Counter(tokens)
    for a, b in zip(tokens, tokens[1:]):
        grams[f"{a} {b}"] += 1
    return grams


def fit_tfidf(corpus: list[Counter]) -> TfIdfVocabulary:
    if not corpus:
        raise FeatureError("cannot fit TF-IDF on an empty corpus")
    df = Counter()
    for doc in corpus:
        df.update(set(doc))
    n = len(corpus)
    terms = tuple(sorted(df))
    idf = tuple(math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms)
    return TfIdfVocabulary(terms=terms, idf=idf, doc_count=n)


def transform(doc: Counter, vocab: TfIdfVocabulary) -> FeatureVector:
    entries = {}
    for term, count in doc.items():
        idx = vocab.index.get(term)
        if idx is not None and count:
            entries[idx] = count * vocab.idf[idx]
    norm = math.sqrt(sum(v * v for v in entries.values()))
    if norm > 0:
        entries = {i: v / norm for i, v in entries.items()}
        return FeatureVector(entries=entries, norm=1.0)
    return FeatureVector(entries={}, norm=0.0)


def chi2_p_value(stat: float) -> float:
    """Survival function of the chi-square distribution with 1 degree of freedom."""
    if stat < 0:
        raise FeatureError(f"chi2 statistic must be non-negative, got {stat}")
    return math.erfc(math.sqrt(stat / 2.0))


def chi2_select(vectors: list[FeatureVector], labels: list[LabelVector],
                p_threshold: float) -> Chi2Selection:
    """Keep terms whose feature mass splits significantly by any label.

    Per (term, label), the statistic compares observed class-conditional sums
    of feature values against the split expected from class sizes (2 cells,
    1 degree of freedom). A term survives if its best p-value over labels is
    below p_threshold; a threshold >= 1.0 keeps every term.
    """
    if len(vectors) != len(labels):
        raise FeatureError("vectors and labels must have the same length")
    if len(vectors) < 2:
        raise FeatureError("chi-square selection needs at least 2 documents")
    if not (0.0 < p_threshold <= 1.0):
        raise FeatureError(f"p_threshold must be in (0, 1], got {p_threshold}")

    n = len(vectors)
    num_labels = len(labels[0].bits)
    observed_terms = {t for v in vectors for t in v.entries}

    warnings: list[str] = []
    best: dict[int, tuple[float, float]] = {}

    for j in range(num_labels):
        n_pos = sum(lv.bits[j] for lv in labels)
        n_neg = n - n_pos
        if n_pos == 0 or n_neg == 0:
            msg = f"label {j} is degenerate (single class); no terms selected from it"
            warnings.append(msg)
            log.warning(msg)
            continue
        pos_sum: dict[int, float] = {}
        total_sum: dict[int, float] = {}
        for vec, lv in zip(vectors, labels):
            positive = lv.bits[j] == 1
            for term, value in vec.entries.items():
                total_sum[term] = total_sum.get(term, 0.0) + value
                if positive:
                    pos_sum[term] = pos_sum.get(term, 0.0) + value
        for term, total in total_sum.items():
            if total <= 0:
                continue
            obs_pos = pos_sum.get(term, 0.0)
            obs_neg = total - obs_pos
            exp_pos = total * n_pos / n
            exp_neg = total * n_neg / n
            stat = (obs_pos - exp_pos) ** 2 / exp_pos + (obs_neg - exp_neg) ** 2 / exp_neg
            p = chi2_p_value(stat)
            if term not in best or p < best[term][1]:
                best[term] = (stat, p)

    if p_threshold >= 1.0:
        kept = tuple(sorted(observed_terms))
    else:
        kept = tuple(sorted(t for t, (_, p) in best.items() if p < p_threshold))
    if not kept:
        raise FeatureError(
            "chi-square selection kept no terms; no term co-varies with any label "
            f"at p < {p_threshold}"
        )
    return Chi2Selection(kept=kept, p_threshold=p_threshold, scores=best,
                         warnings=tuple(warnings))


def restrict(vector: FeatureVector, selection: Chi2Selection) -> list[float]:
    """Project a sparse vector onto the kept term indices, densely."""
    return [vector.entries.get(term, 0.0) for term in selection.kept]
