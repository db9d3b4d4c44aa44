"""Bundled golden datasets and their loader.

Each JSON file is either a Gram document (upper-triangular entries as exact
strings) or a holonomy document (full matrices, optionally with the fourth
derived by closure), plus an ``expected`` block consumed by the batch
verifier.  Setting the HOLOTET_DATASETS environment variable to a directory
overrides the bundled files.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

import numpy as np

from ..backend import as_matrix, parse_scalar
from ..errors import InputDocumentError

_PACKAGE = __name__
DATASET_DIR_ENV = "HOLOTET_DATASETS"


def _override_dir() -> Path | None:
    path = os.environ.get(DATASET_DIR_ENV)
    return Path(path) if path else None


def list_datasets() -> list[str]:
    override = _override_dir()
    if override is not None:
        return sorted(p.stem for p in override.glob("*.json"))
    names = []
    for entry in resources.files(_PACKAGE).iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[:-5])
    return sorted(names)


def load_dataset(name: str) -> dict:
    override = _override_dir()
    try:
        if override is not None:
            payload = (override / f"{name}.json").read_text()
        else:
            payload = resources.files(_PACKAGE).joinpath(f"{name}.json").read_text()
    except FileNotFoundError:
        raise InputDocumentError(f"no dataset named {name!r}; "
                                 f"available: {', '.join(list_datasets())}")
    return json.loads(payload)


def gram_from_upper(upper, exact: bool) -> np.ndarray:
    """Symmetric completion of 10 row-major upper-triangular entries."""
    if len(upper) != 10:
        raise InputDocumentError(f"expected 10 upper-triangular entries, got {len(upper)}")
    vals = [parse_scalar(v, exact) for v in upper]
    rows = [[None] * 4 for _ in range(4)]
    k = 0
    for i in range(4):
        for j in range(i, 4):
            rows[i][j] = vals[k]
            rows[j][i] = vals[k]
            k += 1
    return as_matrix(rows, exact=exact)


def matrices_from_document(doc: dict, exact: bool | None = None) -> list[np.ndarray]:
    """Parse the matrix list of a holonomy document."""
    exact = doc.get("exact", False) if exact is None else exact
    out = []
    for m in doc.get("matrices", []):
        rows = [[parse_scalar(v, exact) for v in row] for row in m]
        out.append(as_matrix(rows, exact=exact))
    return out
