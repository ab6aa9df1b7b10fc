"""Checkpoint inference: instance record in, HMAP file out."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from . import formats
from .data import denormalize_output, model_input
from .model import ModelConfig, PathPredictor


def load_checkpoint(path, device="cpu"):
    ckpt = torch.load(path, map_location=device, weights_only=False)
    model = PathPredictor(ModelConfig(**ckpt["model_config"]))
    model.load_state_dict(ckpt["state_dict"])
    model.eval()
    return model, ckpt


def predict_values(model, target_kind: str, blocked: np.ndarray, start, goal) -> np.ndarray:
    h, w = blocked.shape
    x = model_input(blocked, start, goal, target_kind)[None]
    with torch.no_grad():
        out = model(x)[0, 0].numpy()
    if out.shape != (h, w):
        raise ValueError(f"model produced {out.shape}, grid is {(h, w)}")
    return denormalize_output(target_kind, out, h, w)


def predict_to_hmap(checkpoint_path, record: dict, out_dir) -> Path:
    """Writes one HMAP of the checkpoint's target kind for an instance record
    (a dict from the planner's instance JSONL with "blocked" attached)."""
    model, ckpt = load_checkpoint(checkpoint_path)
    kind = ckpt["target"]
    values = predict_values(model, kind, record["blocked"],
                            record["start"], record["goal"])
    out = formats.target_path(out_dir, record["id"], kind)
    out.parent.mkdir(parents=True, exist_ok=True)
    formats.write_hmap(out, kind, values)
    return out


def predict_batch(checkpoint_path, instances_file, out_dir) -> list:
    model, ckpt = load_checkpoint(checkpoint_path)
    kind = ckpt["target"]
    written = []
    for rec in formats.load_instances(instances_file):
        values = predict_values(model, kind, rec["blocked"],
                                rec["start"], rec["goal"])
        out = formats.target_path(out_dir, rec["id"], kind)
        out.parent.mkdir(parents=True, exist_ok=True)
        formats.write_hmap(out, kind, values)
        written.append(out)
    return written
