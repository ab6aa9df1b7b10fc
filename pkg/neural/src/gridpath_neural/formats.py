"""The planner exchange surface: HMAP binaries, grid map text, instance JSONL.

This package talks to the planner exclusively through these file formats, so
the readers/writers are implemented here against the published layouts rather
than imported from the planner package.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

HMAP_MAGIC = b"HMAP"
HMAP_VERSION = 1
KINDS = {"cf": 0, "pp": 1, "abs": 2}
KIND_NAMES = {v: k for k, v in KINDS.items()}
# file-name tags used by the planner's oracle output
KIND_TAGS = {"cf": "cf", "pp": "ppm", "abs": "hstar"}

_HEADER = struct.Struct("<4sIB3xII")


def read_hmap(path) -> tuple[str, np.ndarray]:
    """Returns (kind name, float32 array of shape (height, width))."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, kind_code, h, w = _HEADER.unpack_from(raw)
    if magic != HMAP_MAGIC or version != HMAP_VERSION:
        raise ValueError(f"{path}: not a version-{HMAP_VERSION} HMAP file")
    if kind_code not in KIND_NAMES:
        raise ValueError(f"{path}: unknown kind {kind_code}")
    need = _HEADER.size + 4 * h * w
    if len(raw) != need:
        raise ValueError(f"{path}: expected {need} bytes, found {len(raw)}")
    values = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(h, w)
    return KIND_NAMES[kind_code], values


def write_hmap(path, kind: str, values: np.ndarray) -> None:
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2:
        raise ValueError("values must be 2-D")
    if not np.all(np.isfinite(values)):
        raise ValueError("refusing to write non-finite values")
    header = _HEADER.pack(HMAP_MAGIC, HMAP_VERSION, KINDS[kind],
                          values.shape[0], values.shape[1])
    Path(path).write_bytes(header + values.tobytes())


def load_grid(path) -> np.ndarray:
    """Occupancy as a bool array (True = blocked); supports the planner's
    internal .grid text and MovingAI .map text."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines[0].lower().startswith("type"):
        height = int(lines[1].split()[1])
        rows = lines[4:4 + height]
        return np.array([[ch in "@OTWS" for ch in row] for row in rows])
    h, w = (int(t) for t in lines[0].split())
    rows = lines[1:1 + h]
    return np.array([[ch == "#" for ch in row] for row in rows])


def load_instances(path) -> list[dict]:
    """Instance records with grids attached under "blocked"."""
    base = Path(path).parent
    grids = {}
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        ref = rec["map"]
        if ref not in grids:
            grids[ref] = load_grid(base / ref)
        rec["blocked"] = grids[ref]
        out.append(rec)
    return out


def target_path(hmaps_dir, instance_id: str, kind: str) -> Path:
    return Path(hmaps_dir) / f"{instance_id}.{KIND_TAGS[kind]}.hmap"
