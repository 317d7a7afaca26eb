"""Pipeline configuration loaded from a single JSON document.

Every key is optional and defaults to the published constants. Unknown keys
are rejected so a typo cannot silently fall back to a default. Fractions may
be written as strings, e.g. ``"k1": "1/80"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .apf import APFConfig
from .destination import DestinationConfig
from .morphology import MorphConfig
from .segmap import DEFAULT_CLASS_TABLE, ClassTable


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    class_table: ClassTable = DEFAULT_CLASS_TABLE
    morphology: MorphConfig = field(default_factory=MorphConfig)
    destination: DestinationConfig = field(default_factory=DestinationConfig)
    apf: APFConfig = field(default_factory=APFConfig)
    roi_min_area_fraction: float = 0.01
    overlay: bool = True
    workers: int = 1

    def __post_init__(self):
        if not 0 <= self.roi_min_area_fraction < 1:
            raise ConfigError("roi_min_area_fraction must lie in [0, 1)")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


def _number(value, key):
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{key}: cannot parse {value!r} as a number") from exc
    raise ConfigError(f"{key}: expected a number, got {value!r}")


def _section(cls, doc, name):
    if not isinstance(doc, dict):
        raise ConfigError(f"{name} must be a JSON object")
    known = {f.name: f for f in fields(cls)}
    unknown = set(doc) - set(known)
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {sorted(unknown)}")
    kwargs = {}
    for key, value in doc.items():
        number = _number(value, f"{name}.{key}")
        if known[key].type in ("int", int):
            if float(number) != int(number):
                raise ConfigError(f"{name}.{key}: expected an integer, got {value!r}")
            number = int(number)
        kwargs[key] = number
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def parse_config(doc: dict, base_dir: Path | None = None) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    allowed = {"class_table", "morphology", "destination", "apf", "roi_min_area_fraction", "overlay", "workers"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    kwargs = {}
    if "class_table" in doc:
        table = doc["class_table"]
        try:
            if isinstance(table, str):
                path = Path(table)
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                kwargs["class_table"] = ClassTable.from_json(path.read_text())
            else:
                kwargs["class_table"] = ClassTable.from_json(json.dumps(table))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"class_table: {exc}") from exc
    if "morphology" in doc:
        kwargs["morphology"] = _section(MorphConfig, doc["morphology"], "morphology")
    if "destination" in doc:
        kwargs["destination"] = _section(DestinationConfig, doc["destination"], "destination")
    if "apf" in doc:
        kwargs["apf"] = _section(APFConfig, doc["apf"], "apf")
    if "roi_min_area_fraction" in doc:
        kwargs["roi_min_area_fraction"] = _number(doc["roi_min_area_fraction"], "roi_min_area_fraction")
    if "overlay" in doc:
        if not isinstance(doc["overlay"], bool):
            raise ConfigError("overlay must be true or false")
        kwargs["overlay"] = doc["overlay"]
    if "workers" in doc:
        workers = doc["workers"]
        if not isinstance(workers, int) or isinstance(workers, bool):
            raise ConfigError("workers must be an integer")
        kwargs["workers"] = workers
    return PipelineConfig(**kwargs)


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(doc, base_dir=path.parent)
