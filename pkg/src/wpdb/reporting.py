"""Run configuration documents and sweep serialization (CSV and JSON)."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from . import __version__
from .analytic import FormulaVariant
from .errors import WpdbError
from .montecarlo import SweepRow, SweepSpec

__all__ = [
    "CSV_COLUMNS",
    "RUN_CONFIG_SCHEMA",
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config",
    "resolve_seed",
    "rows_to_records",
    "format_csv",
    "format_json",
]

SEED_ENV = "WPDB_SEED"

CSV_COLUMNS = (
    "policy",
    "fraction",
    "sigma_theta_sq",
    "n_relays",
    "trials",
    "mc_mean",
    "mc_std_error",
    "mc_ci95_lo",
    "mc_ci95_hi",
    "pred_corrected",
    "pred_literal",
    "mc_mean_db",
    "pred_corrected_db",
    "pred_literal_db",
)

_FRACTION = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}

RUN_CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "wpdb sweep configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["policy_kind", "fractions", "sigma_theta_sq_grid", "n_relays_grid"],
    "properties": {
        "policy_kind": {"enum": ["ts", "ps"]},
        "fractions": {"type": "array", "minItems": 1, "items": _FRACTION},
        "sigma_theta_sq_grid": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
        "n_relays_grid": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "eta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "source_power": {"type": "number", "exclusiveMinimum": 0},
        "noise_var": {"type": "number", "exclusiveMinimum": 0},
        "trials": {"type": "integer", "minimum": 2},
        "master_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "variants": {
            "type": "array",
            "minItems": 1,
            "items": {"enum": [v.value for v in FormulaVariant]},
        },
        "output_path": {"type": "string"},
        "output_format": {"enum": ["csv", "json"]},
        "figure_path": {"type": "string"},
    },
}


class ConfigError(WpdbError):
    """A configuration document is malformed or fails validation."""


@dataclass(frozen=True)
class RunConfig:
    spec: SweepSpec
    output_path: str | None = None
    output_format: str = "csv"
    figure_path: str | None = None

    @property
    def noise_var(self) -> float:
        return self.spec.noise_var


def _locate(text: str, path: Sequence[Any]) -> str:
    """Best-effort line number of the first key in ``path`` within ``text``."""
    for key in reversed([p for p in path if isinstance(p, str)]):
        needle = json.dumps(key) + ":"
        idx = text.find(needle)
        if idx < 0:
            needle = json.dumps(key)
            idx = text.find(needle)
        if idx >= 0:
            return f"line {text.count(chr(10), 0, idx) + 1}: "
    return ""


def parse_config(text: str, *, seed_override: int | None = None, env: dict | None = None) -> RunConfig:
    """Validate a JSON configuration document and build the sweep it describes.

    Raises:
        ConfigError: with a line and field diagnostic when the document is
            not valid JSON, violates the schema, or names an invalid grid point.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(RUN_CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            field = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"{_locate(text, list(err.absolute_path))}field '{field}': {err.message}")
        raise ConfigError("\n".join(lines))

    seed = resolve_seed(doc.get("master_seed", 0), seed_override, os.environ if env is None else env)
    try:
        spec = SweepSpec(
            policy_kind=doc["policy_kind"],
            fractions=doc["fractions"],
            sigma_theta_sq_grid=doc["sigma_theta_sq_grid"],
            n_relays_grid=doc["n_relays_grid"],
            eta=doc.get("eta", 1.0),
            source_power=doc.get("source_power", 1.0),
            trials=doc.get("trials", 100_000),
            master_seed=seed,
            variants=doc.get("variants", [v.value for v in FormulaVariant]),
            noise_var=doc.get("noise_var", 1.0),
        )
        spec.validate()
    except WpdbError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        spec=spec,
        output_path=doc.get("output_path"),
        output_format=doc.get("output_format", "csv"),
        figure_path=doc.get("figure_path"),
    )


def load_config(path: str | os.PathLike, **kwargs) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return parse_config(text, **kwargs)


def resolve_seed(config_seed: int, flag_seed: int | None, env: dict) -> int:
    """Explicit flag beats the environment, which beats the config file."""
    if flag_seed is not None:
        return int(flag_seed)
    raw = env.get(SEED_ENV)
    if raw not in (None, ""):
        try:
            seed = int(raw, 0)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None
        if not 0 <= seed < 2**64:
            raise ConfigError(f"{SEED_ENV}={raw!r} must fit in 64 unsigned bits")
        return seed
    return int(config_seed)


def rows_to_records(rows: Sequence[SweepRow]) -> list[dict[str, Any]]:
    records = []
    for r in rows:
        records.append(
            {
                "policy": r.policy_kind,
                "fraction": r.fraction,
                "sigma_theta_sq": r.sigma_theta_sq,
                "n_relays": r.n_relays,
                "trials": r.mc.trials,
                "mc_mean": r.mc.mean,
                "mc_std_error": r.mc.std_error,
                "mc_ci95_lo": r.mc.ci95_lo,
                "mc_ci95_hi": r.mc.ci95_hi,
                "pred_corrected": r.predicted.get(FormulaVariant.CORRECTED, math.nan),
                "pred_literal": r.predicted.get(FormulaVariant.LITERAL, math.nan),
                "mc_mean_db": r.mc_db,
                "pred_corrected_db": r.predicted_db.get(FormulaVariant.CORRECTED, math.nan),
                "pred_literal_db": r.predicted_db.get(FormulaVariant.LITERAL, math.nan),
            }
        )
    return records


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def format_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in rows_to_records(rows):
        writer.writerow([_fmt(rec[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_json(rows: Sequence[SweepRow], spec: SweepSpec) -> str:
    """Full-precision JSON: ``{"metadata": {...}, "rows": [...]}``."""
    records = [{k: _json_safe(v) for k, v in rec.items()} for rec in rows_to_records(rows)]
    metadata = {
        "seed": spec.master_seed,
        "version": __version__,
        "redraws": sum(r.mc.redraws for r in rows),
        "policy": spec.policy_kind,
        "eta": spec.eta,
        "source_power": spec.source_power,
        "noise_var": spec.noise_var,
        "trials": spec.trials,
    }
    return json.dumps({"metadata": metadata, "rows": records}, indent=2) + "\n"
