"""Instance-independent heuristics and the heuristic-map container.

A HeuristicMap is the exchange unit between the oracle pipeline, any external
predictor, and the planner.  The kind tag travels with the values so that a
planner cannot silently consume, say, a path-probability map where a
correction-factor map is expected.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .costs import ExactCost
from .errors import DimensionError, KindMismatchError, RangeError
from .grid import Cell


class HmapKind(enum.Enum):
    CF = 0    # correction factor, octile / true cost-to-go, in [0, 1]
    PP = 1    # path probability, {0} u [0.95, 1] for ground truth
    ABS = 2   # absolute cost-to-go estimate, >= 0


def octile(a: Cell, b: Cell) -> ExactCost:
    """Octile distance as an exact cost: (max-min) cardinals + min diagonals."""
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    lo, hi = (dx, dy) if dx < dy else (dy, dx)
    return ExactCost(hi - lo, lo)


def chebyshev(a: Cell, b: Cell) -> float:
    return float(max(abs(a[0] - b[0]), abs(a[1] - b[1])))


def euclidean(a: Cell, b: Cell) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class HeuristicMap:
    """Per-cell scalar field of a declared kind.

    Ground-truth PP maps take values in {0} u [0.95, 1]; predictor-emitted PP
    maps may be continuous in [0, 1] (see hmap_io's raw mode).  Construction
    checks finiteness and the kind's value range.
    """

    kind: HmapKind
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 2:
            raise DimensionError(f"heuristic map must be 2-D, got shape {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if not np.all(np.isfinite(arr)):
            raise RangeError("heuristic map contains non-finite values")
        validate_range(self.kind, arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def lookup(self, cell: Cell) -> float:
        if not (0 <= cell[0] < self.height and 0 <= cell[1] < self.width):
            raise DimensionError(f"cell {cell} outside {self.height}x{self.width} map")
        return float(self.values[cell[0], cell[1]])


def validate_range(kind: HmapKind, arr: np.ndarray, tol: float = 1e-6) -> None:
    """Raise RangeError when values break the kind invariant beyond tol.

    CF must lie in [0, 1]; ABS must be non-negative; PP must lie in [0, 1]
    (the stricter {0} u [0.95, 1] ground-truth shape is enforced on file read,
    where predictor outputs are clamped).  The default tolerance admits
    predictor outputs that graze a range edge in float32.
    """
    lo = float(arr.min(initial=0.0))
    hi = float(arr.max(initial=0.0))
    if kind is HmapKind.ABS:
        if lo < -tol:
            raise RangeError(f"ABS values must be >= 0, found {lo}")
    else:
        if lo < -tol or hi > 1.0 + tol:
            raise RangeError(f"{kind.name} values must lie in [0, 1], found [{lo}, {hi}]")


def require_kind(hmap: HeuristicMap, kind: HmapKind) -> HeuristicMap:
    if hmap.kind is not kind:
        raise KindMismatchError(f"need a {kind.name} map, got {hmap.kind.name}")
    return hmap


def lookup(hmap: HeuristicMap, cell: Cell) -> float:
    return hmap.lookup(cell)
