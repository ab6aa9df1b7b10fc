"""Heuristic-map predictor for the gridpath planner.

Trains a convolutional encoder / transformer bottleneck / decoder network on
oracle-generated HMAP targets (correction factors, path probabilities, or
absolute cost-to-go) and exports predictions in the same binary format the
planner consumes.
"""

from .model import ModelConfig, PathPredictor
from .train import TrainConfig, train

__version__ = "0.1.0"

__all__ = ["ModelConfig", "PathPredictor", "TrainConfig", "train"]
