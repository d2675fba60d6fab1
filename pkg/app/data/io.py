"""File input and output

Scenario and state files are JSON validated against the pydantic models;
time series go to CSV with full float precision; arrays are written as raw
little-endian float64 with a JSON sidecar.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Type, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from app.errors import ConfigError
from app.data.schema import RunSummary

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

ModelT = TypeVar("ModelT", bound=BaseModel)
PathLike = Union[str, Path]


def load_model(path: PathLike, model: Type[ModelT]) -> ModelT:
    """Read a JSON file into a validated model

    Raises:
        ConfigError: unreadable file, bad JSON or schema mismatch
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}")
    return parse_model(raw, model, source=str(path))


def parse_model(raw: Any, model: Type[ModelT], source: str = "input") -> ModelT:
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(x) for x in first["loc"]) or "<root>"
        raise ConfigError(f"{source}: {where}: {first['msg']} ({e.error_count()} error(s))")


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"📦 wrote {len(frame)} rows to {path}")
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_summary(summary: RunSummary, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(summary.model_dump_json(indent=2))
    return path


def write_snapshot(stem: PathLike, array: np.ndarray, meta: Dict[str, Any]) -> Path:
    """Write ``stem.bin`` (float64, little-endian, C order) and ``stem.json``"""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    data = np.ascontiguousarray(array, dtype="<f8")
    data.tofile(stem.with_suffix(".bin"))
    sidecar = {"schema_version": 1, "dtype": "<f8", "shape": list(data.shape), **meta}
    stem.with_suffix(".json").write_text(json.dumps(sidecar, indent=2))
    return stem.with_suffix(".bin")


def read_snapshot(stem: PathLike) -> tuple:
    stem = Path(stem)
    try:
        meta = json.loads(stem.with_suffix(".json").read_text())
        data = np.fromfile(stem.with_suffix(".bin"), dtype=meta.get("dtype", "<f8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read snapshot {stem}: {e}")
    return data.reshape(meta["shape"]), meta
