import json

import pytest

BACKGROUND_CALLS = ("log_event", "check_state", "update_counter", "emit_trace")


def toy_function_source(idx: int, marker: str) -> str:
    # every background call appears in every function, so the marker is the
    # only token whose prevalence differs between types, whatever the split
    background = "\n".join(f"  {bg}(acc, n);" for bg in BACKGROUND_CALLS)
    return (
        f"void fn_{idx}(int n) {{\n"
        f"  int acc = 0;\n"
        f"  {marker}(buf, n);\n"
        f"{background}\n"
        f"  if (acc > n) {{ acc = n; }}\n"
        f"  return;\n"
        f"}}\n"
    )


def write_toy_dataset(path, n=12, types=("dos", "overflow")):
    """Separable toy corpus: each type has one exclusive marker call."""
    markers = {t: f"{t}_marker" for t in types}
    rows = []
    for i in range(n):
        t = types[i % len(types)]
        rows.append({
            "id": f"fn_{i:03d}",
            "source": toy_function_source(i, markers[t]),
            "labels": [t],
        })
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return rows


@pytest.fixture
def toy_dataset(tmp_path):
    path = tmp_path / "toy.jsonl"
    write_toy_dataset(path)
    return path
