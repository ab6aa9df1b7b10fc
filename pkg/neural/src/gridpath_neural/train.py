"""Supervised training of the heuristic predictor.

Adam with a one-cycle learning-rate schedule; squared error for CF and PP
targets, absolute error for the cost-to-go (ABS) targets.  Full-scale
training constants (35 epochs, batch 512, max lr 4e-4) are retained;
desk-scale defaults are active so the loop runs on commodity CPUs.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, asdict, field
from pathlib import Path

import torch
from torch.utils.data import DataLoader, random_split

from .data import InstanceDataset
from .model import ModelConfig, PathPredictor

FULL_SCALE_EPOCHS = 35
FULL_SCALE_BATCH_SIZE = 512
FULL_SCALE_MAX_LR = 4e-4


@dataclass(frozen=True)
class TrainConfig:
    target: str = "cf"                      # cf | pp | abs
    epochs: int = 8                         # desk-scale; full scale uses 35
    batch_size: int = 32                    # desk-scale; full scale uses 512
    max_lr: float = FULL_SCALE_MAX_LR
    seed: int = 0
    val_fraction: float = 0.1
    max_steps: int = 0                      # 0 = no cap; handy for overfit runs
    device: str = "cpu"
    model: ModelConfig = field(default_factory=ModelConfig)

    def loss_name(self) -> str:
        # squared error for the [0,1]-ranged targets, absolute for cost-to-go
        return "l1" if self.target == "abs" else "l2"

    def resolved_model(self) -> ModelConfig:
        out = "softplus" if self.target == "abs" else "sigmoid"
        if self.model.output != out:
            return ModelConfig(**{**self.model.as_dict(), "output": out})
        return self.model

    def config_hash(self) -> str:
        payload = json.dumps({**asdict(self), "model": self.resolved_model().as_dict()},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _masked_loss(pred, target, mask, loss_name):
    diff = pred - target
    err = diff.abs() if loss_name == "l1" else diff * diff
    denom = mask.sum().clamp_min(1.0)
    return (err * mask).sum() / denom


def _masked_mse(pred, target, mask):
    diff = (pred - target) ** 2
    return float(((diff * mask).sum() / mask.sum().clamp_min(1.0)).item())


def evaluate_model(model, loader, device, loss_name):
    model.eval()
    total = count = 0.0
    mse_total = 0.0
    with torch.no_grad():
        for x, y, m in loader:
            x, y, m = x.to(device), y.to(device), m.to(device)
            pred = model(x)
            total += float(_masked_loss(pred, y, m, loss_name).item()) * len(x)
            mse_total += _masked_mse(pred, y, m) * len(x)
            count += len(x)
    return total / max(count, 1.0), mse_total / max(count, 1.0)


def train(instances_file, hmaps_dir, config: TrainConfig, out_dir,
          log_every: int = 0):
    """Train a predictor; writes checkpoint.pt and training_log.jsonl into
    out_dir and returns (checkpoint path, log entries)."""
    torch.manual_seed(config.seed)
    device = torch.device(config.device)
    dataset = InstanceDataset(instances_file, hmaps_dir, config.target)

    n_val = int(len(dataset) * config.val_fraction)
    if config.val_fraction > 0:
        n_val = max(1, n_val)
    n_val = min(n_val, len(dataset) - 1)
    gen = torch.Generator().manual_seed(config.seed)
    if n_val > 0:
        train_set, val_set = random_split(dataset, [len(dataset) - n_val, n_val],
                                          generator=gen)
    else:
        # val_fraction 0: train on everything, report metrics on the training
        # set itself (overfit/memorization runs)
        train_set, val_set = dataset, dataset
    train_loader = DataLoader(train_set, batch_size=config.batch_size,
                              shuffle=True, generator=gen)
    val_loader = DataLoader(val_set, batch_size=config.batch_size)

    model = PathPredictor(config.resolved_model()).to(device)
    loss_name = config.loss_name()
    steps_per_epoch = max(1, len(train_loader))
    total_steps = config.epochs * steps_per_epoch
    if config.max_steps:
        total_steps = min(total_steps, config.max_steps)

    log = []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ckpt_path = out_dir / "checkpoint.pt"
    log_path = out_dir / "training_log.jsonl"

    optimizer = None
    scheduler = None
    if total_steps > 0:
        optimizer = torch.optim.Adam(model.parameters(), lr=config.max_lr)
        scheduler = torch.optim.lr_scheduler.OneCycleLR(
            optimizer, max_lr=config.max_lr, total_steps=total_steps)

    step = 0
    t0 = time.perf_counter()
    epochs = config.epochs if total_steps else 0
    last_train = None
    for epoch in range(epochs):
        model.train()
        running = running_n = 0.0
        for x, y, m in train_loader:
            if config.max_steps and step >= config.max_steps:
                break
            x, y, m = x.to(device), y.to(device), m.to(device)
            optimizer.zero_grad()
            loss = _masked_loss(model(x), y, m, loss_name)
            loss.backward()
            optimizer.step()
            scheduler.step()
            running += float(loss.item()) * len(x)
            running_n += len(x)
            step += 1
            if log_every and step % log_every == 0:
                print(f"step {step}/{total_steps} loss {loss.item():.5f}", flush=True)
        if running_n:
            last_train = running / running_n
        val_loss, val_mse = evaluate_model(model, val_loader, device, loss_name)
        log.append({"epoch": epoch + 1, "step": step,
                    "train_loss": last_train, "val_loss": val_loss,
                    "val_mse": val_mse,
                    "elapsed_s": round(time.perf_counter() - t0, 2)})
        if config.max_steps and step >= config.max_steps:
            break

    if not log:  # zero-epoch run still records the initial validation metric
        val_loss, val_mse = evaluate_model(model, val_loader, device, loss_name)
        log.append({"epoch": 0, "step": 0, "train_loss": None,
                    "val_loss": val_loss, "val_mse": val_mse,
                    "elapsed_s": round(time.perf_counter() - t0, 2)})

    torch.save({
        "state_dict": model.state_dict(),
        "target": config.target,
        "model_config": config.resolved_model().as_dict(),
        "train_config": asdict(config),
        "config_hash": config.config_hash(),
        "log": log,
    }, ckpt_path)
    with open(log_path, "w") as fh:
        for entry in log:
            fh.write(json.dumps(entry) + "\n")
    return ckpt_path, log
