"""Run configuration: a flat key=value file plus per-command flag overrides.

Flags win over the file, the file wins over built-in defaults. All randomness
flows from the single seed.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError


@dataclass
class RunConfig:
    seed: int = 7
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    p_threshold: float = 0.05
    theta: float = 1.0
    min_support: int = 1
    group_below: int = 0
    empty_union_score: float = 1.0
    figures: bool = True
    dataset: str | None = None
    format: str = "jsonl"
    splits_dir: str = "splits"
    artifacts_dir: str = "artifacts"
    table: str | None = None
    predictions: str | None = None
    reports_dir: str = "reports"

    def validate(self) -> "RunConfig":
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if len(self.ratios) != 3 or any(r < 0 for r in self.ratios):
            raise ConfigError(f"ratios must be three non-negative fractions, got {self.ratios!r}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ConfigError(f"ratios must sum to 1.0, got {sum(self.ratios)}")
        if not (0.0 < self.p_threshold <= 1.0):
            raise ConfigError(f"p_threshold must be in (0, 1], got {self.p_threshold}")
        if self.theta < 1.0:
            raise ConfigError(f"theta must be >= 1.0, got {self.theta}")
        if not isinstance(self.min_support, int) or self.min_support < 1:
            raise ConfigError(f"min_support must be a positive integer, got {self.min_support!r}")
        if not isinstance(self.group_below, int) or self.group_below < 0:
            raise ConfigError(f"group_below must be a non-negative integer, got {self.group_below!r}")
        if not (0.0 <= self.empty_union_score <= 1.0):
            raise ConfigError(f"empty_union_score must be in [0, 1], got {self.empty_union_score}")
        if self.format not in ("jsonl", "csv"):
            raise ConfigError(f"format must be jsonl or csv, got {self.format!r}")
        return self


def parse_ratios(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse ratios {text!r}") from None
    if len(parts) != 3:
        raise ConfigError(f"ratios need exactly three comma-separated values, got {text!r}")
    return parts


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


_COERCERS = {
    "seed": int,
    "ratios": parse_ratios,
    "p_threshold": float,
    "theta": float,
    "min_support": int,
    "group_below": int,
    "empty_union_score": float,
    "figures": _parse_bool,
    "dataset": str,
    "format": str,
    "splits_dir": str,
    "artifacts_dir": str,
    "table": str,
    "predictions": str,
    "reports_dir": str,
}


def read_config_file(path: str | Path) -> dict:
    """Parse a flat key = value file; # starts a comment, blank lines ignored."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path.name} line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip().strip('"').strip("'")
        if key not in _COERCERS:
            raise ConfigError(f"{path.name} line {lineno}: unknown config key {key!r}")
        try:
            values[key] = _COERCERS[key](value)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path.name} line {lineno}: bad value for {key}: {exc}") from None
    return values


def resolve_config(config_path: str | Path | None, overrides: dict) -> RunConfig:
    """Defaults <- config file <- flag overrides (None flags are ignored)."""
    values: dict = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**values).validate()
