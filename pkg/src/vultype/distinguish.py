"""Mining of positive/negative distinguishing tokens per (type, element kind).

For each vulnerability type t and element kind e, a token c is scored by how
much more (dis+) or less (dis-) prevalent it is in the cases of t than in any
other type:

    prev(c, e, t)  = fraction of type-t cases whose e-bucket contains c
    dis+(c, e, t)  = prev(c, e, t) / max over other types of prev(c, e, t')
    dis-(c, e, t)  = min over other types of prev(c, e, t') / prev(c, e, t)

Either ratio is +inf when its denominator is 0 while its numerator is
positive, and 0 whenever its numerator is 0. Tokens scoring strictly above
theta land in the positive/negative table for (t, e).

The mining token channel is the element bucket contents plus their lowercased
sub-tokens, so "readHTTPHeader" can match through "read", "http" or "header".
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

from .corpus import Dataset
from .errors import MiningError
from .persist import from_jsonable_score
from .syntax import ELEMENT_KINDS, SyntacticElements, split_subtokens

log = logging.getLogger(__name__)


def mining_token_set(bucket: set[str]) -> set[str]:
    """Bucket tokens augmented with their lowercased sub-tokens."""
    out = set(bucket)
    for token in bucket:
        out.update(split_subtokens(token))
    return out


@dataclass
class PrevalenceTable:
    counts: dict[tuple[str, str, str], int]  # (token, element, type) -> case count
    case_totals: dict[str, int]              # type -> |D_t|
    support: dict[tuple[str, str], int]      # (token, element) -> distinct cases

    @property
    def types(self) -> list[str]:
        return sorted(self.case_totals)

    def prev(self, token: str, element: str, type_name: str) -> float:
        total = self.case_totals.get(type_name)
        if not total:
            raise MiningError(f"type {type_name!r} has no cases in the table")
        return self.counts.get((token, element, type_name), 0) / total


def build_prevalence(train: Dataset, elements: dict[str, SyntacticElements]) -> PrevalenceTable:
    """Count, per (token, element kind, type), the type-t cases containing the token.

    Multi-label cases contribute to every type in their label set. Vocabulary
    types with zero training cases are excluded with a warning.
    """
    counts: Counter = Counter()
    support: Counter = Counter()
    case_totals: Counter = Counter()
    for f in train.functions:
        case_totals.update(f.labels)

    for name in train.vocabulary.names:
        if case_totals.get(name, 0) == 0:
            log.warning("type %r has no cases in the training split; excluded from mining", name)

    for f in train.functions:
        if f.id not in elements:
            raise MiningError(f"no extracted elements for function {f.id!r}")
        buckets = elements[f.id].buckets
        for kind in ELEMENT_KINDS:
            for token in mining_token_set(buckets[kind]):
                support[(token, kind)] += 1
                for t in f.labels:
                    counts[(token, kind, t)] += 1

    return PrevalenceTable(counts=dict(counts), case_totals=dict(case_totals),
                           support=dict(support))


def _ratio(numerator: float, denominator: float) -> float:
    if numerator == 0.0:
        return 0.0
    if denominator == 0.0:
        return math.inf
    return numerator / denominator


def dis_plus(token: str, element: str, type_name: str, table: PrevalenceTable) -> float:
    others = [table.prev(token, element, t) for t in table.types if t != type_name]
    if not others:
        raise MiningError("distinguishing tokens undefined for a single type")
    return _ratio(table.prev(token, element, type_name), max(others))


def dis_minus(token: str, element: str, type_name: str, table: PrevalenceTable) -> float:
    others = [table.prev(token, element, t) for t in table.types if t != type_name]
    if not others:
        raise MiningError("distinguishing tokens undefined for a single type")
    return _ratio(min(others), table.prev(token, element, type_name))


@dataclass
class DistinguishingTokenTable:
    positive: dict[tuple[str, str], dict[str, float]]  # (type, element) -> token -> dis+
    negative: dict[tuple[str, str], dict[str, float]]  # (type, element) -> token -> dis-
    theta: float
    min_support: int
    types: tuple[str, ...] = field(default=())

    def table_types(self) -> set[str]:
        found = {t for t, _ in self.positive} | {t for t, _ in self.negative}
        return found | set(self.types)

    def to_json_dict(self) -> dict:
        def side(entries):
            return {f"{t}/{e}": dict(sorted(tokens.items()))
                    for (t, e), tokens in sorted(entries.items())}
        return {
            "theta": self.theta,
            "min_support": self.min_support,
            "positive": side(self.positive),
            "negative": side(self.negative),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DistinguishingTokenTable":
        def side(entries):
            out: dict[tuple[str, str], dict[str, float]] = {}
            for key, tokens in entries.items():
                type_name, _, element = key.rpartition("/")
                out[(type_name, element)] = {
                    tok: from_jsonable_score(score) for tok, score in tokens.items()
                }
            return out
        return cls(
            positive=side(data["positive"]),
            negative=side(data["negative"]),
            theta=float(data["theta"]),
            min_support=int(data["min_support"]),
            types=tuple(data.get("types", ())),
        )

    @classmethod
    def empty(cls, theta: float = 1.0, min_support: int = 1) -> "DistinguishingTokenTable":
        return cls(positive={}, negative={}, theta=theta, min_support=min_support)


def mine(train: Dataset, elements: dict[str, SyntacticElements],
         theta: float = 1.0, min_support: int = 1) -> DistinguishingTokenTable:
    """Build the distinguishing-token table from the training split.

    Only tokens present in at least min_support training cases (per element
    kind, regardless of labels) are considered. theta >= 1 guarantees the
    positive and negative sets are disjoint for every (type, element).
    """
    if theta < 1.0:
        raise MiningError(f"theta must be >= 1, got {theta}")
    if min_support < 1:
        raise MiningError(f"min_support must be >= 1, got {min_support}")

    table = build_prevalence(train, elements)
    types = table.types
    if len(types) < 2:
        raise MiningError("distinguishing tokens undefined for a single type")

    positive: dict[tuple[str, str], dict[str, float]] = {}
    negative: dict[tuple[str, str], dict[str, float]] = {}
    for (token, element), sup in table.support.items():
        if sup < min_support:
            continue
        prevs = {t: table.prev(token, element, t) for t in types}
        for t in types:
            others = [prevs[t2] for t2 in types if t2 != t]
            plus = _ratio(prevs[t], max(others))
            if plus > theta:
                positive.setdefault((t, element), {})[token] = plus
            minus = _ratio(min(others), prevs[t])
            if minus > theta:
                negative.setdefault((t, element), {})[token] = minus

    return DistinguishingTokenTable(positive=positive, negative=negative,
                                    theta=theta, min_support=min_support,
                                    types=tuple(types))
