"""Instance records + oracle HMAP targets as model tensors.

Channel 0 is the occupancy image (1 = blocked); channel 1 marks the
conditioning cells: start and goal for PP targets, goal only for CF and ABS
targets.  ABS targets are divided by (height + width) for training and
multiplied back at export.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset

from . import formats

MARKER_COUNT = {"cf": 1, "pp": 2, "abs": 1}


def model_input(blocked: np.ndarray, start, goal, target_kind: str) -> torch.Tensor:
    occ = torch.from_numpy(blocked.astype(np.float32))
    markers = torch.zeros_like(occ)
    markers[goal[0], goal[1]] = 1.0
    if target_kind == "pp":
        markers[start[0], start[1]] = 1.0
    return torch.stack((occ, markers))


def normalize_target(kind: str, values: np.ndarray, height: int, width: int):
    """Target in model range plus the loss mask (ABS sentinel cells at
    unreachable free cells are excluded from the loss)."""
    vals = values.astype(np.float32)
    mask = np.ones_like(vals, dtype=np.float32)
    if kind == "abs":
        sentinel = vals >= 1e9
        mask[sentinel] = 0.0
        vals = np.where(sentinel, 0.0, vals) / float(height + width)
    return vals, mask


def denormalize_output(kind: str, values: np.ndarray, height: int, width: int):
    if kind == "abs":
        return values * float(height + width)
    return values


class InstanceDataset(Dataset):
    """(input, target, mask) triples for one target kind.

    ``instances`` is the planner's JSONL file; targets are HMAP files named
    ``<instance id>.<tag>.hmap`` in ``hmaps_dir``.  Missing targets are
    reported up front, before any training step runs.
    """

    def __init__(self, instances_file, hmaps_dir, target_kind: str):
        if target_kind not in MARKER_COUNT:
            raise ValueError(f"unknown target kind {target_kind!r}")
        self.target_kind = target_kind
        self.records = formats.load_instances(instances_file)
        if not self.records:
            raise ValueError(f"no instances in {instances_file}")
        missing = [rec["id"] for rec in self.records
                   if not formats.target_path(hmaps_dir, rec["id"], target_kind).exists()]
        if missing:
            raise FileNotFoundError(
                f"{len(missing)} of {len(self.records)} instances lack "
                f"{target_kind} targets in {hmaps_dir} "
                f"(first missing: {missing[0]})")
        self.hmaps_dir = Path(hmaps_dir)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, idx):
        rec = self.records[idx]
        blocked = rec["blocked"]
        x = model_input(blocked, rec["start"], rec["goal"], self.target_kind)
        kind, values = formats.read_hmap(
            formats.target_path(self.hmaps_dir, rec["id"], self.target_kind))
        if kind != self.target_kind:
            raise ValueError(f"{rec['id']}: target file kind {kind!r} != "
                             f"{self.target_kind!r}")
        vals, mask = normalize_target(self.target_kind, values,
                                      blocked.shape[0], blocked.shape[1])
        return x, torch.from_numpy(vals)[None], torch.from_numpy(mask)[None]
