"""JSON and CSV formats shared by the modules and the CLI."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from . import config
from .errors import SchemaError
from .linalg_core import as_hermitian


def _f(x: float) -> float:
    # round-trip through 17 significant digits so outputs are byte-stable
    return float(f"{float(x):.17g}")


def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    entries = [[_f(z.real), _f(z.imag)] for z in M.astype(complex).ravel()]
    return {"dim": int(M.shape[0]), "entries": entries}


def matrix_from_json(obj: dict, hermitian: bool = True) -> np.ndarray:
    try:
        n = int(obj["dim"])
        raw = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad matrix object: {exc}") from exc
    if raw.shape != (n * n, 2):
        raise SchemaError(f"expected {n * n} [re, im] pairs, got shape {raw.shape}")
    M = (raw[:, 0] + 1j * raw[:, 1]).reshape(n, n)
    if not np.any(raw[:, 1]):
        M = M.real
    return as_hermitian(M) if hermitian else M


def check_schema(obj: dict) -> dict:
    """Refuse files written by a newer major schema version."""
    version = str(obj.get("schema_version", config.SCHEMA_VERSION))
    if int(version.split(".")[0]) > int(config.SCHEMA_VERSION.split(".")[0]):
        raise SchemaError(f"schema version {version} is newer than supported {config.SCHEMA_VERSION}")
    return obj


def load_json(path: str | Path) -> Any:
    with open(path) as fh:
        obj = json.load(fh)
    if isinstance(obj, dict):
        check_schema(obj)
    return obj


def load_matrix(path: str | Path, hermitian: bool = True) -> np.ndarray:
    obj = load_json(path)
    if "matrix" in obj:
        obj = obj["matrix"]
    return matrix_from_json(obj, hermitian=hermitian)


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _f(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [_f(obj.real), _f(obj.imag)]
    return obj


def write_json(obj: Any, path: str | Path | None) -> str:
    text = dumps(obj) + "\n"
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)
    return text
