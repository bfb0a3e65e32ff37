import random

import pytest

from vultype.metrics import (
    MetricsError,
    accuracy,
    averaged_prf,
    confusion_counts,
    evaluate,
    exact_match_ratio,
    hamming_score,
)


# ------------------------------------------------------------------- oracle

def oracle_metrics(y, z, empty_union_score=1.0):
    """Brute-force re-derivation of every metric straight from the definitions,
    with the 0/0 -> 0 convention. Kept loop-based and flat on purpose."""
    n, width = len(y), len(y[0])

    def safe(num, den):
        return num / den if den else 0.0

    exact = sum(1 for i in range(n)
                if all(y[i][j] == z[i][j] for j in range(width))) / n

    hamming = 0.0
    for i in range(n):
        inter = sum(1 for j in range(width) if y[i][j] and z[i][j])
        union = sum(1 for j in range(width) if y[i][j] or z[i][j])
        hamming += inter / union if union else empty_union_score
    hamming /= n

    acc = sum(
        sum(1 for j in range(width) if y[i][j] == z[i][j]) / width for i in range(n)
    ) / n

    tps = [sum(1 for i in range(n) if y[i][j] and z[i][j]) for j in range(width)]
    fps = [sum(1 for i in range(n) if not y[i][j] and z[i][j]) for j in range(width)]
    fns = [sum(1 for i in range(n) if y[i][j] and not z[i][j]) for j in range(width)]

    per_p = [safe(tps[j], tps[j] + fps[j]) for j in range(width)]
    per_r = [safe(tps[j], tps[j] + fns[j]) for j in range(width)]
    per_f = [safe(2 * per_p[j] * per_r[j], per_p[j] + per_r[j]) for j in range(width)]
    supports = [tps[j] + fns[j] for j in range(width)]

    micro_p = safe(sum(tps), sum(tps) + sum(fps))
    micro_r = safe(sum(tps), sum(tps) + sum(fns))
    micro = (micro_p, micro_r, safe(2 * micro_p * micro_r, micro_p + micro_r))

    macro_p = sum(per_p) / width
    macro_r = sum(per_r) / width
    macro = (macro_p, macro_r, safe(2 * macro_p * macro_r, macro_p + macro_r))

    tot = sum(supports)
    weighted = (
        safe(sum(p * s for p, s in zip(per_p, supports)), tot),
        safe(sum(r * s for r, s in zip(per_r, supports)), tot),
        safe(sum(f * s for f, s in zip(per_f, supports)), tot),
    )

    sp = sr = sf = 0.0
    for i in range(n):
        inter = sum(1 for j in range(width) if y[i][j] and z[i][j])
        p = safe(inter, sum(z[i]))
        r = safe(inter, sum(y[i]))
        sp += p
        sr += r
        sf += safe(2 * p * r, p + r)
    samples = (sp / n, sr / n, sf / n)

    return {
        "exact": exact, "hamming": hamming, "accuracy": acc,
        "per_type": list(zip(per_p, per_r, per_f)), "supports": supports,
        "micro": micro, "macro": macro, "weighted": weighted, "samples": samples,
    }


def random_pair(rng, n=None, width=None):
    n = n or rng.randint(1, 20)
    width = width or rng.randint(1, 5)
    y = [tuple(rng.randint(0, 1) for _ in range(width)) for _ in range(n)]
    z = [tuple(rng.randint(0, 1) for _ in range(width)) for _ in range(n)]
    return y, z


# ------------------------------------------------------------ exact examples

def test_exact_match_examples():
    y = [(1, 0), (0, 1)]
    assert exact_match_ratio(y, y) == 1.0
    assert exact_match_ratio(y, [(1, 0), (1, 1)]) == 0.5
    assert exact_match_ratio(y, [(0, 0), (1, 0)]) == 0.0


def test_hamming_examples():
    assert hamming_score([(1, 0, 1)], [(1, 1, 0)]) == pytest.approx(1 / 3)
    y = [(1, 0), (0, 1)]
    assert hamming_score(y, y) == 1.0
    assert hamming_score([(0, 0)], [(0, 0)]) == 1.0  # empty-union convention
    assert hamming_score([(0, 0)], [(0, 0)], empty_union_score=0.0) == 0.0


def test_accuracy_examples():
    assert accuracy([(1, 0, 1)], [(1, 1, 0)]) == pytest.approx(1 / 3)
    assert accuracy([(1, 0)], [(0, 1)]) == 0.0
    y = [(1, 0), (0, 1)]
    assert accuracy(y, y) == 1.0


def test_micro_from_summed_counts():
    # t0: tp=2; t1: one fp and one fn -> micro P = R = F1 = 2/3
    y = [(1, 0), (1, 1)]
    z = [(1, 1), (1, 0)]
    micro, _, _, _, _, _, _ = averaged_prf(y, z)
    assert micro.precision == pytest.approx(2 / 3)
    assert micro.recall == pytest.approx(2 / 3)
    assert micro.f1 == pytest.approx(2 / 3)


def test_macro_composes_f1_from_averaged_p_and_r():
    # t0 perfect, t1 fully wrong -> per-type P = (1, 0), R = (1, 0)
    y = [(1, 1), (1, 0)]
    z = [(1, 0), (1, 1)]
    _, macro, _, _, per_type, _, _ = averaged_prf(y, z)
    assert [t.precision for t in per_type] == [1.0, 0.0]
    assert [t.recall for t in per_type] == [1.0, 0.0]
    assert macro.precision == 0.5
    assert macro.recall == 0.5
    assert macro.f1 == 0.5  # harmonic(0.5, 0.5); the mean of per-type F1s would differ


def test_perfect_predictions_score_one_everywhere():
    y = [(1, 0, 1), (0, 1, 0), (1, 1, 1)]
    report = evaluate(y, y, ("a", "b", "c"))
    assert report.exact_match == report.hamming == report.accuracy == 1.0
    for fam in (report.micro, report.macro, report.weighted, report.samples):
        assert (fam.precision, fam.recall, fam.f1) == (1.0, 1.0, 1.0)


def test_confusion_counts_sum_to_n():
    rng = random.Random(5)
    y, z = random_pair(rng, n=13, width=4)
    for c in confusion_counts(y, z):
        assert c.tp + c.fp + c.fn + c.tn == 13


def test_length_mismatch_errors():
    with pytest.raises(MetricsError, match="length mismatch"):
        exact_match_ratio([(1, 0)], [(1, 0), (0, 0)])
    with pytest.raises(MetricsError, match="length mismatch"):
        accuracy([(1, 0)], [(1,)])
    with pytest.raises(MetricsError):
        evaluate([(1, 0)], [(1, 0)], ("only",))


# -------------------------------------------------------------- properties

def test_all_metrics_match_brute_force_oracle():
    rng = random.Random(99)
    for _ in range(30):
        y, z = random_pair(rng)
        expected = oracle_metrics(y, z)
        report = evaluate(y, z, tuple(f"t{j}" for j in range(len(y[0]))))
        assert report.exact_match == pytest.approx(expected["exact"], abs=1e-12)
        assert report.hamming == pytest.approx(expected["hamming"], abs=1e-12)
        assert report.accuracy == pytest.approx(expected["accuracy"], abs=1e-12)
        for fam, key in ((report.micro, "micro"), (report.macro, "macro"),
                         (report.weighted, "weighted"), (report.samples, "samples")):
            assert (fam.precision, fam.recall, fam.f1) == pytest.approx(
                expected[key], abs=1e-12)
        for j, name in enumerate(report.type_names):
            t = report.per_type[name]
            assert (t.precision, t.recall, t.f1) == pytest.approx(
                expected["per_type"][j], abs=1e-12)
            assert report.support[name] == expected["supports"][j]


def test_swapping_y_and_z_swaps_precision_and_recall():
    # holds for per-type, micro, macro, and samples; the weighted family
    # reweights by the swapped supports, so it is excluded
    rng = random.Random(123)
    for _ in range(20):
        y, z = random_pair(rng, n=12, width=4)
        names = ("a", "b", "c", "d")
        fwd = evaluate(y, z, names)
        rev = evaluate(z, y, names)
        for f_fam, r_fam in ((fwd.micro, rev.micro), (fwd.macro, rev.macro),
                             (fwd.samples, rev.samples)):
            assert f_fam.precision == pytest.approx(r_fam.recall, abs=1e-12)
            assert f_fam.recall == pytest.approx(r_fam.precision, abs=1e-12)
            assert f_fam.f1 == pytest.approx(r_fam.f1, abs=1e-12)
        for name in names:
            assert fwd.per_type[name].precision == pytest.approx(
                rev.per_type[name].recall, abs=1e-12)
            assert fwd.per_type[name].f1 == pytest.approx(
                rev.per_type[name].f1, abs=1e-12)


def test_row_permutation_invariance():
    rng = random.Random(321)
    y, z = random_pair(rng, n=10, width=3)
    names = ("a", "b", "c")
    base = evaluate(y, z, names).to_json_dict()
    order = list(range(10))
    rng.shuffle(order)
    permuted = evaluate([y[i] for i in order], [z[i] for i in order], names).to_json_dict()
    assert base == permuted


def test_exact_match_bounded_by_hamming():
    rng = random.Random(777)
    for _ in range(30):
        y, z = random_pair(rng)
        assert exact_match_ratio(y, z) <= hamming_score(y, z) + 1e-12
        assert hamming_score(y, z) <= 1.0


def test_all_values_in_unit_interval():
    rng = random.Random(555)
    for _ in range(10):
        y, z = random_pair(rng)
        report = evaluate(y, z, tuple(f"t{j}" for j in range(len(y[0]))))
        values = [report.exact_match, report.hamming, report.accuracy]
        for fam in (report.micro, report.macro, report.weighted, report.samples):
            values += [fam.precision, fam.recall, fam.f1]
        for t in report.per_type.values():
            values += [t.precision, t.recall, t.f1]
        assert all(0.0 <= v <= 1.0 for v in values)


def test_zero_division_count_recorded():
    report = evaluate([(0, 0)], [(0, 0)], ("a", "b"))
    assert report.metadata["zero_division_count"] > 0
    assert report.metadata["samples_f1"] == "mean-of-per-row-f1"
