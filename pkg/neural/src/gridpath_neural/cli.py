"""Train / predict entry point for the heuristic predictor."""

from __future__ import annotations

import argparse
import sys

from .model import ModelConfig
from .train import TrainConfig, train


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gridpath-neural",
        description="Train the heuristic-map predictor and export HMAP files.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a predictor on oracle targets")
    p.add_argument("--instances", required=True, help="planner instance JSONL")
    p.add_argument("--hmaps", required=True, help="oracle HMAP target directory")
    p.add_argument("--target", choices=["cf", "pp", "abs"], default="cf")
    p.add_argument("--epochs", type=int, default=8)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--max-lr", type=float, default=4e-4)
    p.add_argument("--max-steps", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.add_argument("--base-width", type=int, default=32)
    p.add_argument("--transformer-blocks", type=int, default=4)
    p.add_argument("--no-transformer", action="store_true",
                   help="ablation: identity bottleneck, convolutions only")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="export predictions for an instance file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--instances", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)
    return parser


def cmd_train(args):
    model = ModelConfig(base_width=args.base_width,
                        transformer_blocks=args.transformer_blocks,
                        use_transformer=not args.no_transformer)
    config = TrainConfig(target=args.target, epochs=args.epochs,
                         batch_size=args.batch_size, max_lr=args.max_lr,
                         max_steps=args.max_steps, seed=args.seed,
                         val_fraction=args.val_fraction, model=model)
    ckpt, log = train(args.instances, args.hmaps, config, args.out, log_every=20)
    last = log[-1]
    print(f"checkpoint {ckpt}  epochs {last['epoch']}  "
          f"val_mse {last['val_mse']:.6f}")
    return 0


def cmd_predict(args):
    from .predict import predict_batch
    written = predict_batch(args.checkpoint, args.instances, args.out)
    print(f"wrote {len(written)} heuristic maps to {args.out}")
    return 0


def main():
    args = build_parser().parse_args()
    sys.exit(args.func(args))


if __name__ == "__main__":
    main()
