"""Artifact emission: CSV tables and JSON documents with a run manifest.

Every artifact carries the manifest hash (over the canonical config, seed
and package version) in a leading `#` comment line (CSV) or a "manifest"
key (JSON), so outputs can always be traced to their inputs.  Numbers are
written in shortest round-trip decimal form; re-parsing reproduces them
bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path


def manifest_hash(raw_config: dict, seed: int, version: str) -> str:
    canon = json.dumps(
        {"config": raw_config, "seed": seed, "version": version},
        sort_keys=True, separators=(",", ":"),
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, columns: list[str], rows: list[dict], manifest: str):
    lines = [f"# manifest: {manifest}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format(row.get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path: Path) -> tuple[list[str], list[dict], str]:
    """Re-parse an emitted CSV; numeric strings become floats."""
    lines = Path(path).read_text().splitlines()
    manifest = ""
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        if "manifest:" in lines[k]:
            manifest = lines[k].split("manifest:")[1].strip()
        k += 1
    columns = lines[k].split(",")
    rows = []
    for line in lines[k + 1:]:
        if not line:
            continue
        cells = line.split(",")
        row = {}
        for c, cell in zip(columns, cells):
            if cell == "":
                row[c] = None
            elif cell in ("true", "false"):
                row[c] = cell == "true"
            else:
                try:
                    row[c] = float(cell)
                except ValueError:
                    row[c] = cell
        rows.append(row)
    return columns, rows, manifest


def write_json(path: Path, payload: dict, manifest: str):
    doc = {"manifest": manifest}
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n")


def jsonable(value):
    """Recursively convert dataclass-ish / numpy values for JSON output."""
    import dataclasses

    import numpy as np

    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: jsonable(getattr(value, f.name))
                for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value") and value.__class__.__module__ != "builtins":
        try:  # enums
            return value.value
        except Exception:
            return str(value)
    return value
