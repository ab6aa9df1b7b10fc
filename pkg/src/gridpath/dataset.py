"""Map generation, augmentation, instance sampling and dataset splits.

Maps are composed of independently generated quadrant tiles; augmentation
applies a fixed table of per-quadrant dihedral transforms (16 variants, the
first being the identity).  Instances pick a goal uniformly at random and a
start uniformly from the third of reachable cells farthest from the goal,
which biases the pool toward non-trivial detours.  Everything is reproducible
from the seeds alone.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .costs import ExactCost
from .errors import DimensionError
from .grid import Cell, GridMap, MovePolicy
from .heuristics import octile
from .oracle import dijkstra_map
from .search import PTask

DEFAULT_MIN_HARDNESS = 1.05
_SPLIT_SALT = "gridpath-split-v1"


class ObstacleStyle(enum.Enum):
    RANDOM_RECTS = "random-rects"
    RANDOM_SCATTER = "random-scatter"
    MAZE = "maze"


@dataclass(frozen=True)
class MapGenConfig:
    tile_size: int = 32
    tiles_per_side: int = 2
    obstacle_style: ObstacleStyle = ObstacleStyle.RANDOM_RECTS
    density: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.tile_size < 1 or self.tiles_per_side < 1:
            raise ValueError("tile_size and tiles_per_side must be positive")
        if not (0.0 <= self.density < 1.0):
            raise ValueError(f"density must lie in [0, 1), got {self.density}")


@dataclass(frozen=True)
class InstanceRecord:
    map_id: str
    task: PTask
    optimal_cost: ExactCost
    hardness: float


def _gen_tile(style: ObstacleStyle, size: int, density: float, rng) -> np.ndarray:
    blocked = np.zeros((size, size), dtype=bool)
    if density == 0.0:
        return blocked
    if style is ObstacleStyle.RANDOM_SCATTER:
        return rng.random((size, size)) < density
    if style is ObstacleStyle.RANDOM_RECTS:
        budget = density * size * size
        painted = 0
        max_side = max(2, size // 3)
        while painted < budget:
            rh = int(rng.integers(1, max_side + 1))
            rw = int(rng.integers(1, max_side + 1))
            r = int(rng.integers(0, size - rh + 1))
            c = int(rng.integers(0, size - rw + 1))
            blocked[r:r + rh, c:c + rw] = True
            painted += rh * rw
        return blocked
    # MAZE: walls on the odd lattice carved by a randomized DFS; density is
    # reused as the probability of knocking extra openings (loops)
    blocked[:] = True
    cells_r = (size + 1) // 2
    cells_c = (size + 1) // 2
    visited = np.zeros((cells_r, cells_c), dtype=bool)
    stack = [(0, 0)]
    visited[0, 0] = True
    blocked[0, 0] = False
    while stack:
        r, c = stack[-1]
        options = []
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < cells_r and 0 <= nc < cells_c and not visited[nr, nc]:
                options.append((nr, nc))
        if not options:
            stack.pop()
            continue
        nr, nc = options[rng.integers(0, len(options))]
        visited[nr, nc] = True
        blocked[2 * nr, 2 * nc] = False
        blocked[r + nr, c + nc] = False  # knock out the wall between the two
        stack.append((nr, nc))
    extra = rng.random((size, size)) < density * 0.5
    blocked &= ~extra
    return blocked


def generate_map(config: MapGenConfig) -> GridMap:
    """Compose tiles_per_side^2 independently generated quadrant tiles."""
    t = config.tile_size
    k = config.tiles_per_side
    blocked = np.zeros((t * k, t * k), dtype=bool)
    for qi in range(k * k):
        rng = np.random.default_rng([config.seed & 0xFFFFFFFFFFFFFFFF, qi])
        tile = _gen_tile(config.obstacle_style, t, config.density, rng)
        r0 = (qi // k) * t
        c0 = (qi % k) * t
        blocked[r0:r0 + t, c0:c0 + t] = tile
    return GridMap(blocked)


# The 8 dihedral transforms of a square tile: 0-3 rotations, 4-7 mirrored
# rotations.  The augmentation table below assigns one transform per quadrant
# (top-left, top-right, bottom-left, bottom-right); row 0 is the identity.
AUGMENT_TABLE = (
    (0, 0, 0, 0),
    (1, 1, 1, 1),
    (2, 2, 2, 2),
    (3, 3, 3, 3),
    (4, 4, 4, 4),
    (5, 5, 5, 5),
    (6, 6, 6, 6),
    (7, 7, 7, 7),
    (0, 1, 2, 3),
    (4, 5, 6, 7),
    (1, 3, 5, 7),
    (2, 6, 0, 4),
    (3, 0, 7, 2),
    (5, 2, 4, 1),
    (6, 7, 1, 0),
    (7, 4, 3, 6),
)


def dihedral(tile: np.ndarray, t: int) -> np.ndarray:
    if not 0 <= t < 8:
        raise ValueError(f"transform index {t} out of range")
    if t < 4:
        return np.rot90(tile, t)
    return np.rot90(np.fliplr(tile), t - 4)


def _dihedral_inverse_table():
    probe = np.arange(16).reshape(4, 4)
    inv = []
    for t in range(8):
        for u in range(8):
            if np.array_equal(dihedral(dihedral(probe, t), u), probe):
                inv.append(u)
                break
    return tuple(inv)


DIHEDRAL_INVERSE = _dihedral_inverse_table()


def dihedral_inverse(t: int) -> int:
    return DIHEDRAL_INVERSE[t]


def augment(grid: GridMap) -> list[GridMap]:
    """The 16 fixed per-quadrant transform variants of a map (identity first).

    Quadrants must be square since 90-degree rotations change the shape of
    non-square tiles.
    """
    h, w = grid.height, grid.width
    if h % 2 or w % 2:
        raise DimensionError(f"map dimensions {h}x{w} not divisible into quadrants")
    qh, qw = h // 2, w // 2
    if qh != qw:
        raise DimensionError(f"quadrants {qh}x{qw} must be square for rotation")
    src = grid.blocked
    quads = (src[:qh, :qw], src[:qh, qw:], src[qh:, :qw], src[qh:, qw:])
    out = []
    for row in AUGMENT_TABLE:
        blocked = np.zeros_like(src)
        blocked[:qh, :qw] = dihedral(quads[0], row[0])
        blocked[:qh, qw:] = dihedral(quads[1], row[1])
        blocked[qh:, :qw] = dihedral(quads[2], row[2])
        blocked[qh:, qw:] = dihedral(quads[3], row[3])
        out.append(GridMap(blocked))
    return out


def sample_instance(grid: GridMap, seed: int, policy: MovePolicy,
                    map_id: str = "") -> Optional[InstanceRecord]:
    """One (goal, start) draw: goal uniform over free cells, start uniform
    over the ceil(R/3) reachable cells farthest from the goal (ties broken
    row-major).  Returns None when the goal has no reachable companion."""
    free = grid.free_cells()
    if len(free) < 2:
        return None
    rng = np.random.default_rng(seed)
    goal = free[int(rng.integers(0, len(free)))]
    dist = dijkstra_map(grid, goal, policy)
    reach_r, reach_c = np.nonzero(dist.reachable)
    flat = dist.float_values()
    candidates = []
    for r, c in zip(reach_r.tolist(), reach_c.tolist()):
        if (r, c) == (goal.row, goal.col):
            continue
        candidates.append((-flat[r, c], r, c))
    if not candidates:
        return None
    candidates.sort()
    k = -(-len(candidates) // 3)  # ceil(R/3)
    top = candidates[:k]
    _, sr, sc = top[int(rng.integers(0, len(top)))]
    start = Cell(sr, sc)
    optimal = dist.cost(start)
    task = PTask(grid, start, goal)
    hardness = optimal.to_float() / octile(start, goal).to_float()
    return InstanceRecord(map_id=map_id, task=task, optimal_cost=optimal,
                          hardness=hardness)


def filter_hardness(records, min_hardness: float = DEFAULT_MIN_HARDNESS):
    return [r for r in records if r.hardness >= min_hardness]


def base_map_id(map_id: str) -> str:
    """Strip the augmentation suffix ("m0001_a07" -> "m0001")."""
    stem, sep, tail = map_id.rpartition("_a")
    if sep and tail.isdigit():
        return stem
    return map_id


def split_bucket(base_id: str, ratios=(8, 1, 1)) -> str:
    """Deterministic split assignment by hashing the pre-augmentation map id,
    so all augmentations of one base map land together."""
    total = sum(ratios)
    digest = hashlib.sha256(f"{_SPLIT_SALT}:{base_id}".encode()).digest()
    bucket = int.from_bytes(digest[:8], "big") % total
    if bucket < ratios[0]:
        return "train"
    if bucket < ratios[0] + ratios[1]:
        return "val"
    return "test"


def split(records, ratios=(8, 1, 1)) -> dict:
    """Partition records into train/val/test by base-map identity."""
    out = {"train": [], "val": [], "test": []}
    for rec in records:
        out[split_bucket(base_map_id(rec.map_id), ratios)].append(rec)
    return out
