"""Multi-label evaluation metrics.

Covers exact-match ratio, hamming score (per-case Jaccard), per-cell accuracy,
per-type precision/recall/F1, and the four averaging families:

  micro    - P/R from summed tp/fp/fn, F1 harmonic of those
  macro    - unweighted mean of per-type P and R; F1 is the harmonic mean of
             macro-P and macro-R (not the mean of per-type F1s)
  weighted - support-weighted mean of per-type P/R/F1
  samples  - per-case P/R/F1 averaged over cases

All 0/0 ratios are defined as 0 and counted in the report metadata. A hamming
row with empty union scores empty_union_score (default 1.0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import VultypeError

SAMPLES_F1_RULE = "mean-of-per-row-f1"


class MetricsError(VultypeError):
    pass


def _bits(row):
    return row.bits if hasattr(row, "bits") else tuple(row)


def _check(y_rows, z_rows) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    y = [tuple(_bits(r)) for r in y_rows]
    z = [tuple(_bits(r)) for r in z_rows]
    if len(y) != len(z):
        raise MetricsError(f"length mismatch: {len(y)} truth rows vs {len(z)} predictions")
    if not y:
        raise MetricsError("cannot evaluate an empty set")
    width = len(y[0])
    if any(len(r) != width for r in y + z):
        raise MetricsError("length mismatch: rows have differing widths")
    return y, z


@dataclass
class _ZeroDivision:
    count: int = 0

    def ratio(self, num: float, den: float) -> float:
        if den == 0:
            self.count += 1
            return 0.0
        return num / den


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class PrfTriple:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    n: int
    type_names: tuple[str, ...]
    exact_match: float
    hamming: float
    accuracy: float
    per_type: dict[str, PrfTriple]
    support: dict[str, int]
    micro: PrfTriple
    macro: PrfTriple
    weighted: PrfTriple
    samples: PrfTriple
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def triple(t: PrfTriple) -> dict:
            return {"precision": t.precision, "recall": t.recall, "f1": t.f1}
        return {
            "n": self.n,
            "num_types": len(self.type_names),
            "types": list(self.type_names),
            "exact_match": self.exact_match,
            "hamming": self.hamming,
            "accuracy": self.accuracy,
            "per_type": {
                name: dict(triple(self.per_type[name]), support=self.support[name])
                for name in self.type_names
            },
            "micro": triple(self.micro),
            "macro": triple(self.macro),
            "weighted": triple(self.weighted),
            "samples": triple(self.samples),
            "metadata": dict(self.metadata),
        }


def confusion_counts(y_rows, z_rows) -> list[ConfusionCounts]:
    y, z = _check(y_rows, z_rows)
    width = len(y[0])
    out = []
    for j in range(width):
        tp = sum(1 for yi, zi in zip(y, z) if yi[j] == 1 and zi[j] == 1)
        fp = sum(1 for yi, zi in zip(y, z) if yi[j] == 0 and zi[j] == 1)
        fn = sum(1 for yi, zi in zip(y, z) if yi[j] == 1 and zi[j] == 0)
        out.append(ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=len(y) - tp - fp - fn))
    return out


def exact_match_ratio(y_rows, z_rows) -> float:
    y, z = _check(y_rows, z_rows)
    return sum(1 for yi, zi in zip(y, z) if yi == zi) / len(y)


def hamming_score(y_rows, z_rows, empty_union_score: float = 1.0) -> float:
    y, z = _check(y_rows, z_rows)
    total = 0.0
    for yi, zi in zip(y, z):
        inter = sum(1 for a, b in zip(yi, zi) if a == 1 and b == 1)
        union = sum(1 for a, b in zip(yi, zi) if a == 1 or b == 1)
        total += inter / union if union else empty_union_score
    return total / len(y)


def accuracy(y_rows, z_rows) -> float:
    y, z = _check(y_rows, z_rows)
    width = len(y[0])
    agree = sum(sum(1 for a, b in zip(yi, zi) if a == b) for yi, zi in zip(y, z))
    return agree / (len(y) * width)


def _f1(p: float, r: float, zd: _ZeroDivision) -> float:
    return zd.ratio(2 * p * r, p + r)


def averaged_prf(y_rows, z_rows):
    """Returns (micro, macro, weighted, samples, per_type_triples, supports, zero_div_count)."""
    y, z = _check(y_rows, z_rows)
    counts = confusion_counts(y, z)
    zd = _ZeroDivision()

    per_type = []
    for c in counts:
        p = zd.ratio(c.tp, c.tp + c.fp)
        r = zd.ratio(c.tp, c.tp + c.fn)
        per_type.append(PrfTriple(precision=p, recall=r, f1=_f1(p, r, zd)))
    supports = [c.tp + c.fn for c in counts]

    micro_p = zd.ratio(sum(c.tp for c in counts), sum(c.tp + c.fp for c in counts))
    micro_r = zd.ratio(sum(c.tp for c in counts), sum(c.tp + c.fn for c in counts))
    micro = PrfTriple(micro_p, micro_r, _f1(micro_p, micro_r, zd))

    width = len(counts)
    macro_p = sum(t.precision for t in per_type) / width
    macro_r = sum(t.recall for t in per_type) / width
    macro = PrfTriple(macro_p, macro_r, _f1(macro_p, macro_r, zd))

    total_support = sum(supports)
    weighted = PrfTriple(
        zd.ratio(sum(t.precision * s for t, s in zip(per_type, supports)), total_support),
        zd.ratio(sum(t.recall * s for t, s in zip(per_type, supports)), total_support),
        zd.ratio(sum(t.f1 * s for t, s in zip(per_type, supports)), total_support),
    )

    sample_p = sample_r = sample_f = 0.0
    for yi, zi in zip(y, z):
        inter = sum(1 for a, b in zip(yi, zi) if a == 1 and b == 1)
        p = zd.ratio(inter, sum(zi))
        r = zd.ratio(inter, sum(yi))
        sample_p += p
        sample_r += r
        sample_f += _f1(p, r, zd)
    n = len(y)
    samples = PrfTriple(sample_p / n, sample_r / n, sample_f / n)

    return micro, macro, weighted, samples, per_type, supports, zd.count


def evaluate(y_rows, z_rows, type_names,
             empty_union_score: float = 1.0) -> MetricsReport:
    y, z = _check(y_rows, z_rows)
    type_names = tuple(type_names)
    if len(type_names) != len(y[0]):
        raise MetricsError(f"length mismatch: {len(type_names)} type names for "
                           f"width-{len(y[0])} rows")
    micro, macro, weighted, samples, per_type, supports, zero_divs = averaged_prf(y, z)
    return MetricsReport(
        n=len(y),
        type_names=type_names,
        exact_match=exact_match_ratio(y, z),
        hamming=hamming_score(y, z, empty_union_score=empty_union_score),
        accuracy=accuracy(y, z),
        per_type={name: t for name, t in zip(type_names, per_type)},
        support={name: s for name, s in zip(type_names, supports)},
        micro=micro,
        macro=macro,
        weighted=weighted,
        samples=samples,
        metadata={
            "empty_union_score": empty_union_score,
            "zero_division_count": zero_divs,
            "samples_f1": SAMPLES_F1_RULE,
        },
    )
