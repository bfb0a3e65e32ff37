"""Prediction refinement with distinguishing tokens.

Given a base prediction Z for a function, each type t is re-examined against
the function's element buckets:

  * a positive-table hit without any negative hit turns Z[t]=0 into 1;
  * a negative-table hit without any positive hit turns Z[t]=1 into 0;
  * a function carrying both kinds of token for t keeps the base prediction.

Matching pairs tokens with their element kind (a positive token mined from
call buckets only fires on the call bucket) and matches raw bucket tokens as
well as lowercased sub-tokens, mirroring the mining channel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .classifier import PredictionVector
from .corpus import LabelVector, TypeVocabulary
from .distinguish import DistinguishingTokenTable, mining_token_set
from .errors import RefineError
from .syntax import ELEMENT_KINDS, SyntacticElements


@dataclass(frozen=True)
class Flip:
    id: str
    type: str
    direction: str  # "0->1" or "1->0"
    token: str
    element: str
    score: float

    def to_json_dict(self) -> dict:
        return {"id": self.id, "type": self.type, "direction": self.direction,
                "token": self.token, "element": self.element, "score": self.score}


@dataclass(frozen=True)
class RefinementAudit:
    affected: int
    corrected: int | None  # absent without ground truth
    flips: tuple[Flip, ...]

    @property
    def accuracy_rate(self) -> float | None:
        if self.corrected is None or self.affected == 0:
            return None
        return self.corrected / self.affected

    def to_json_dict(self) -> dict:
        return {
            "affected": self.affected,
            "corrected": self.corrected,
            "accuracy_rate": self.accuracy_rate,
            "flips": [f.to_json_dict() for f in self.flips],
        }


def _first_hit(elems: SyntacticElements, table_side: dict, type_name: str):
    """Earliest (element-kind order, token order) match of the function's
    augmented buckets against one table side, or None."""
    for kind in ELEMENT_KINDS:
        entries = table_side.get((type_name, kind))
        if not entries:
            continue
        hits = mining_token_set(elems.buckets[kind]) & entries.keys()
        if hits:
            token = min(hits)
            return kind, token, entries[token]
    return None


def refine_one(z: PredictionVector, elems: SyntacticElements,
               table: DistinguishingTokenTable, vocabulary: TypeVocabulary,
               function_id: str = "") -> tuple[PredictionVector, list[Flip]]:
    if len(z.bits) != len(vocabulary):
        raise RefineError(f"prediction width {len(z.bits)} does not match "
                          f"vocabulary size {len(vocabulary)}")
    unknown = table.table_types() - set(vocabulary.names)
    if unknown:
        raise RefineError(f"vocabulary mismatch: table types {sorted(unknown)} "
                          "not in prediction vocabulary")

    bits = list(z.bits)
    flips: list[Flip] = []
    for j, t in enumerate(vocabulary.names):
        pos_hit = _first_hit(elems, table.positive, t)
        neg_hit = _first_hit(elems, table.negative, t)
        if pos_hit and neg_hit:
            continue  # conflicting evidence: defer to the base prediction
        if pos_hit and bits[j] == 0:
            bits[j] = 1
            kind, token, score = pos_hit
            flips.append(Flip(id=function_id, type=t, direction="0->1",
                              token=token, element=kind, score=score))
        elif neg_hit and bits[j] == 1:
            bits[j] = 0
            kind, token, score = neg_hit
            flips.append(Flip(id=function_id, type=t, direction="1->0",
                              token=token, element=kind, score=score))
    return PredictionVector(bits=tuple(bits), scores=z.scores), flips


def refine_batch(predictions: list[tuple[str, PredictionVector]],
                 elements: dict[str, SyntacticElements],
                 table: DistinguishingTokenTable,
                 vocabulary: TypeVocabulary,
                 truth: dict[str, LabelVector] | None = None,
                 ) -> tuple[list[tuple[str, PredictionVector]], RefinementAudit]:
    refined: list[tuple[str, PredictionVector]] = []
    all_flips: list[Flip] = []
    corrected: int | None = 0 if truth is not None else None

    for fid, z in predictions:
        if fid not in elements:
            raise RefineError(f"no extracted elements for function {fid!r}")
        z_prime, flips = refine_one(z, elements[fid], table, vocabulary, function_id=fid)
        refined.append((fid, z_prime))
        all_flips.extend(flips)
        if truth is not None:
            truth_bits = truth[fid].bits
            for flip in flips:
                j = vocabulary.position(flip.type)
                if z_prime.bits[j] == truth_bits[j]:
                    corrected += 1

    all_flips.sort(key=lambda f: (f.id, vocabulary.position(f.type)))
    audit = RefinementAudit(affected=len(all_flips), corrected=corrected,
                            flips=tuple(all_flips))
    return refined, audit


def load_external_predictions(path: str | Path,
                              vocabulary: TypeVocabulary) -> list[tuple[str, PredictionVector]]:
    """Read {"id", "bits"} JSONL rows produced by any other approach."""
    path = Path(path)
    if not path.is_file():
        raise RefineError(f"predictions file not found: {path}")
    out: list[tuple[str, PredictionVector]] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path.name} line {lineno}"
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RefineError(f"{where}: malformed record: {exc}") from None
            if not isinstance(row, dict) or "id" not in row or "bits" not in row:
                raise RefineError(f"{where}: expected an object with id and bits")
            fid, bits = row["id"], row["bits"]
            if fid in seen:
                raise RefineError(f"{where}: duplicate id {fid!r}")
            seen.add(fid)
            if not isinstance(bits, list) or len(bits) != len(vocabulary):
                raise RefineError(f"{where}: length mismatch: expected {len(vocabulary)} bits")
            if any(isinstance(b, bool) or b not in (0, 1) for b in bits):
                raise RefineError(f"{where}: non-binary prediction entries")
            out.append((fid, PredictionVector(bits=tuple(bits))))
    return out
