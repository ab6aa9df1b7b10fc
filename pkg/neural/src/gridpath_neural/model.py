"""Encoder / transformer-bottleneck / decoder predictor for heuristic maps.

The convolutional encoder extracts local obstacle features, the transformer
relates them globally (passages between regions, detour structure), and the
decoder upsamples back to the input resolution.  All layer choices the
architecture sketch leaves open (normalization, activation, widths, head
counts) sit in ModelConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import torch
from torch import nn


@dataclass(frozen=True)
class ModelConfig:
    in_channels: int = 2
    base_width: int = 32
    stage_widths: tuple = (32, 48, 64)     # one downsampling stage per entry
    blocks_per_stage: int = 1
    transformer_blocks: int = 4
    heads: int = 4
    ff_dim: int = 128
    pos_grid: int = 8                      # learned pos-embedding spatial base
    use_transformer: bool = True           # False = identity bottleneck (ablation)
    output: str = "sigmoid"                # squash into [0,1]; "softplus" for ABS

    def as_dict(self):
        return asdict(self)


def _norm(ch):
    return nn.GroupNorm(min(8, ch), ch)


class ResidualBlock(nn.Module):
    def __init__(self, ch):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(ch, ch, 3, padding=1),
            _norm(ch),
            nn.GELU(),
            nn.Conv2d(ch, ch, 3, padding=1),
            _norm(ch),
        )
        self.act = nn.GELU()

    def forward(self, x):
        return self.act(x + self.body(x))


class TransformerBottleneck(nn.Module):
    """Self-attention over flattened spatial tokens with a learned positional
    embedding; the embedding is stored on a base grid and interpolated to the
    actual token grid so one model serves multiple input resolutions."""

    def __init__(self, d_model, heads, blocks, ff_dim, pos_grid):
        super().__init__()
        self.pos = nn.Parameter(torch.zeros(1, d_model, pos_grid, pos_grid))
        nn.init.trunc_normal_(self.pos, std=0.02)
        layer = nn.TransformerEncoderLayer(
            d_model=d_model, nhead=heads, dim_feedforward=ff_dim,
            batch_first=True, norm_first=True, activation="gelu",
            dropout=0.0)
        self.encoder = nn.TransformerEncoder(layer, num_layers=blocks,
                                             enable_nested_tensor=False)

    def forward(self, x):
        b, c, h, w = x.shape
        pos = self.pos
        if pos.shape[-2:] != (h, w):
            pos = nn.functional.interpolate(pos, size=(h, w), mode="bilinear",
                                            align_corners=False)
        x = x + pos
        tokens = x.flatten(2).transpose(1, 2)          # (b, h*w, c)
        tokens = self.encoder(tokens)
        return tokens.transpose(1, 2).reshape(b, c, h, w)


class PathPredictor(nn.Module):
    def __init__(self, config: ModelConfig = ModelConfig()):
        super().__init__()
        self.config = config
        w0 = config.base_width
        self.stem = nn.Sequential(nn.Conv2d(config.in_channels, w0, 3, padding=1),
                                  _norm(w0), nn.GELU(),
                                  ResidualBlock(w0))
        enc = []
        prev = w0
        for width in config.stage_widths:
            stage = [nn.Conv2d(prev, width, 3, stride=2, padding=1),
                     _norm(width), nn.GELU()]
            stage += [ResidualBlock(width) for _ in range(config.blocks_per_stage)]
            enc.append(nn.Sequential(*stage))
            prev = width
        self.encoder = nn.ModuleList(enc)

        if config.use_transformer:
            self.bottleneck = TransformerBottleneck(
                prev, config.heads, config.transformer_blocks,
                config.ff_dim, config.pos_grid)
        else:
            self.bottleneck = nn.Identity()

        dec = []
        widths_up = list(config.stage_widths[-2::-1]) + [w0]
        for width in widths_up:
            dec.append(nn.Sequential(
                nn.ConvTranspose2d(prev, width, 4, stride=2, padding=1),
                _norm(width), nn.GELU(),
                ResidualBlock(width)))
            prev = width
        self.decoder = nn.ModuleList(dec)
        self.head = nn.Conv2d(prev, 1, 3, padding=1)

    def forward(self, x):
        h, w = x.shape[-2:]
        factor = 2 ** len(self.config.stage_widths)
        if h % factor or w % factor:
            raise ValueError(f"input {h}x{w} not divisible by the downsampling "
                             f"factor {factor}")
        x = self.stem(x)
        for stage in self.encoder:
            x = stage(x)
        x = self.bottleneck(x)
        for stage in self.decoder:
            x = stage(x)
        x = self.head(x)
        if self.config.output == "sigmoid":
            x = torch.sigmoid(x)
        elif self.config.output == "softplus":
            x = nn.functional.softplus(x)
        else:
            raise ValueError(f"unknown output mode {self.config.output!r}")
        return x
