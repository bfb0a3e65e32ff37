"""Rendering of evaluation reports: JSON, aligned text table, and figures.

The text table mirrors the usual multi-label layout: one row per type with
precision/recall/F1/support columns, followed by the four averaging families
and the set-level metrics. Figures are bar charts of the same numbers,
rendered to PNG next to the table.
"""

from __future__ import annotations

from pathlib import Path

from .metrics import MetricsReport
from .persist import dump_json

_FAMILIES = ("micro avg", "macro avg", "weighted avg", "samples avg")


def render_text_table(report: MetricsReport) -> str:
    name_width = max(18, max((len(n) for n in report.type_names), default=0) + 2,
                     len("exact match ratio") + 2)
    lines = [f"{'':<{name_width}}{'precision':>11}{'recall':>11}{'f1':>11}{'support':>11}"]
    for name in report.type_names:
        t = report.per_type[name]
        lines.append(f"{name:<{name_width}}{t.precision:>11.4f}{t.recall:>11.4f}"
                     f"{t.f1:>11.4f}{report.support[name]:>11}")

    # averaging families as columns
    families = dict(zip(_FAMILIES, (report.micro, report.macro,
                                    report.weighted, report.samples)))
    lines.append("")
    lines.append(f"{'':<{name_width}}" + "".join(f"{f:>14}" for f in _FAMILIES))
    for row, attr in (("precision", "precision"), ("recall", "recall"), ("f1", "f1")):
        cells = "".join(f"{getattr(families[f], attr):>14.4f}" for f in _FAMILIES)
        lines.append(f"{row:<{name_width}}{cells}")

    lines.append("")
    for label, value in (("exact match ratio", report.exact_match),
                         ("hamming score", report.hamming),
                         ("accuracy", report.accuracy)):
        lines.append(f"{label:<{name_width}}{value:>11.4f}")
    lines.append("")
    lines.append(f"cases (N): {report.n}    types (|T|): {len(report.type_names)}")
    return "\n".join(lines) + "\n"


def render_figures(report: MetricsReport, out_dir: str | Path,
                   stem: str = "report") -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    def grouped_bars(path: Path, names, triples, title: str):
        x = list(range(len(names)))
        width = 0.27
        fig, ax = plt.subplots(figsize=(max(6.0, 1.4 * len(names)), 4.0))
        for k, (label, values) in enumerate((
            ("precision", [t.precision for t in triples]),
            ("recall", [t.recall for t in triples]),
            ("f1", [t.f1 for t in triples]),
        )):
            ax.bar([i + (k - 1) * width for i in x], values, width, label=label)
        ax.set_xticks(x)
        ax.set_xticklabels(names, rotation=30, ha="right")
        ax.set_ylim(0.0, 1.05)
        ax.set_title(title)
        ax.legend(loc="lower right")
        ax.grid(axis="y", alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)

    grouped_bars(out_dir / f"{stem}_per_type.png", list(report.type_names),
                 [report.per_type[n] for n in report.type_names],
                 "Per-type precision / recall / F1")
    grouped_bars(out_dir / f"{stem}_averages.png",
                 ["micro", "macro", "weighted", "samples"],
                 [report.micro, report.macro, report.weighted, report.samples],
                 "Averaged precision / recall / F1")
    return paths


def write_report(report: MetricsReport, out_dir: str | Path, stem: str = "report",
                 figures: bool = True) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {
        "json": dump_json(out_dir / f"{stem}.json", report.to_json_dict()),
    }
    text_path = out_dir / f"{stem}.txt"
    text_path.write_text(render_text_table(report), encoding="utf-8")
    written["text"] = text_path
    if figures:
        for path in render_figures(report, out_dir, stem=stem):
            written[path.name] = path
    return written
