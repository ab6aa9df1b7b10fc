"""Best-first search over 8-connected grids: A*, weighted A*, weighted A*
with a per-node correction factor, Focal Search, greedy best-first over a
path-probability map, and A* over an absolute learned heuristic.

All variants share one relaxation rule (a successor is re-queued only on a
strict g improvement) and one termination rule (the goal is removed from OPEN
for expansion, OPEN empties, or the expansion limit is hit).  g-values are
kept exact as (cardinal, diagonal) move counts in every variant; only the
ordering keys are floats.  Ties on the key are broken by g (higher-g first by
default), then row-major cell order, so identical inputs always produce
identical results including expansion counts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Optional

import numpy as np

from .costs import SQRT2, ExactCost
from .errors import DimensionError, KindMismatchError
from .grid import Cell, GridMap, MovePolicy, neighbors
from .heuristics import HeuristicMap, HmapKind

CF_EPSILON = 1e-6      # correction factors at or below this are not divided by
H_SENTINEL = 1e12      # stand-in heuristic for cf ~ 0 (unreachable) cells


class Variant(enum.Enum):
    ASTAR = "astar"
    WASTAR = "wastar"
    WASTAR_CF = "wastar-cf"
    FOCAL = "focal"
    GBFS_PPM = "gbfs-ppm"
    ASTAR_HL = "astar-hl"


class TieBreak(enum.Enum):
    HIGH_G = "high-g"
    LOW_G = "low-g"


class Status(enum.Enum):
    FOUND = "found"
    NO_PATH = "no-path"
    LIMIT_EXCEEDED = "limit-exceeded"


_MAP_KIND = {
    Variant.WASTAR_CF: HmapKind.CF,
    Variant.FOCAL: HmapKind.PP,
    Variant.GBFS_PPM: HmapKind.PP,
    Variant.ASTAR_HL: HmapKind.ABS,
}


@dataclass(frozen=True)
class PTask:
    """A pathfinding instance: (grid, start, goal), both endpoints free."""

    grid: GridMap
    start: Cell
    goal: Cell

    def __post_init__(self):
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if not self.grid.is_free(cell):
                raise ValueError(f"{name} cell {cell} is blocked or out of bounds")


@dataclass(frozen=True)
class SearchConfig:
    variant: Variant
    w: float = 2.0
    heuristic_map: Optional[HeuristicMap] = None
    tie_break: TieBreak = TieBreak.HIGH_G
    expansion_limit: Optional[int] = None
    policy: MovePolicy = MovePolicy.PERMISSIVE
    check_invariants: bool = False

    def __post_init__(self):
        need = _MAP_KIND.get(self.variant)
        if need is not None:
            if self.heuristic_map is None:
                raise KindMismatchError(f"{self.variant.value} requires a {need.name} map")
            if self.heuristic_map.kind is not need:
                raise KindMismatchError(
                    f"{self.variant.value} requires a {need.name} map, "
                    f"got {self.heuristic_map.kind.name}")
        elif self.heuristic_map is not None:
            raise KindMismatchError(f"{self.variant.value} takes no heuristic map")
        if self.variant in (Variant.WASTAR, Variant.FOCAL) and self.w < 1.0:
            raise ValueError(f"w must be >= 1, got {self.w}")
        if self.expansion_limit is not None and self.expansion_limit < 1:
            raise ValueError("expansion_limit must be positive")


@dataclass(frozen=True)
class SearchResult:
    path: Optional[list]          # list of Cell, start..goal
    cost: Optional[ExactCost]
    expansions: int               # nodes inserted into CLOSED (goal included)
    generated: int                # accepted successor insertions/updates
    f_min_final: float            # see solve(); inf when OPEN emptied
    status: Status
    reopened: int = 0             # closed nodes re-entering OPEN (0 for A*)

    def to_json_dict(self) -> dict:
        return {
            "status": self.status.value,
            "path": [[c.row, c.col] for c in self.path] if self.path is not None else None,
            "cost": self.cost.as_dict() if self.cost is not None else None,
            "expansions": self.expansions,
            "generated": self.generated,
            "reopened": self.reopened,
            "f_min_final": self.f_min_final if math.isfinite(self.f_min_final) else None,
        }


def path_cost(grid: GridMap, path: list, policy: MovePolicy) -> ExactCost:
    """Exact cost of a path, validating adjacency, freeness and the policy."""
    assert path, "empty path"
    total_c = total_d = 0
    for k, cell in enumerate(path):
        if not grid.is_free(cell):
            raise ValueError(f"path visits blocked/out-of-bounds cell {cell}")
        if k == 0:
            continue
        prev = path[k - 1]
        moves = {nb: kind for nb, kind in neighbors(grid, Cell(*prev), policy)}
        kind = moves.get(Cell(*cell))
        if kind is None:
            raise ValueError(f"illegal move {prev} -> {cell}")
        if kind.value == "diagonal":
            total_d += 1
        else:
            total_c += 1
    return ExactCost(total_c, total_d)


def _octile_field(h: int, w: int, goal: Cell) -> np.ndarray:
    """Float octile distance from every cell to the goal, shape (h, w)."""
    dr = np.abs(np.arange(h) - goal.row)[:, None]
    dc = np.abs(np.arange(w) - goal.col)[None, :]
    hi = np.maximum(dr, dc)
    lo = np.minimum(dr, dc)
    return (hi - lo) + lo * SQRT2


def _key_heuristic(task: PTask, config: SearchConfig, h_oct: np.ndarray) -> np.ndarray:
    """Per-cell heuristic term added to g to form the ordering key f."""
    v = config.variant
    if v is Variant.ASTAR or v is Variant.FOCAL or v is Variant.GBFS_PPM:
        return h_oct
    if v is Variant.WASTAR:
        return config.w * h_oct
    if v is Variant.ASTAR_HL:
        return np.asarray(config.heuristic_map.values, dtype=np.float64)
    # WASTAR_CF: divide by the per-node factor, clamping tiny/zero factors to
    # a large finite sentinel so unreachable-labelled cells are deprioritized
    # but never dropped.
    cf = np.asarray(config.heuristic_map.values, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        adj = np.where(cf > CF_EPSILON, h_oct / np.maximum(cf, CF_EPSILON), H_SENTINEL)
    return np.minimum(adj, H_SENTINEL)


def solve(task: PTask, config: SearchConfig) -> SearchResult:
    """Run the configured search variant on a task.

    ``f_min_final`` reports the f = g + h(octile) key of the last expanded
    node for single-queue variants (the goal's f on success), and the final
    minimum f over OPEN for Focal Search; it is +inf when OPEN was exhausted.
    """
    grid = task.grid
    h, w = grid.height, grid.width
    hm = config.heuristic_map
    if hm is not None and (hm.height != h or hm.width != w):
        raise DimensionError(
            f"heuristic map is {hm.height}x{hm.width}, grid is {h}x{w}")

    h_oct = _octile_field(h, w, task.goal)
    hkey = _key_heuristic(task, config, h_oct).reshape(-1).tolist()
    if config.variant in (Variant.FOCAL, Variant.GBFS_PPM):
        pp = np.asarray(hm.values, dtype=np.float64).reshape(-1).tolist()
    else:
        pp = None

    if config.variant is Variant.FOCAL:
        return _solve_focal(task, config, hkey, pp)
    return _solve_best_first(task, config, hkey, pp)


def _reconstruct(parent, width, goal_idx) -> list:
    out = []
    i = goal_idx
    while i >= 0:
        out.append(Cell(i // width, i % width))
        i = parent[i]
    out.reverse()
    return out


def _solve_best_first(task: PTask, config: SearchConfig, hkey, pp) -> SearchResult:
    grid = task.grid
    w = grid.width
    n = grid.height * w
    adj = grid.adjacency(config.policy)
    ok, offs, diag = adj.ok, adj.offsets, adj.diagonal
    start = task.start.row * w + task.start.col
    goal = task.goal.row * w + task.goal.col
    high_g = config.tie_break is TieBreak.HIGH_G
    limit = config.expansion_limit
    greedy = config.variant is Variant.GBFS_PPM
    astar = config.variant is Variant.ASTAR

    g_c = [-1] * n   # -1 marks unset
    g_d = [0] * n
    version = [0] * n
    closed_v = [-1] * n
    parent = [-1] * n
    expansions = generated = reopened = 0
    f_last = math.inf

    g_c[start] = 0
    version[start] = 1
    f0 = hkey[start]
    if greedy:
        heap = [(-pp[start], f0, 0.0, start, 1)]
    else:
        heap = [(f0, 0.0, start, 1)]

    while heap:
        entry = heappop(heap)
        if greedy:
            f, tb, i, ver = entry[1], entry[2], entry[3], entry[4]
        else:
            f, tb, i, ver = entry
        if version[i] != ver or closed_v[i] == ver:
            continue  # superseded by a later g improvement, or already closed
        if limit is not None and expansions >= limit:
            return SearchResult(None, None, expansions, generated, f_last,
                                Status.LIMIT_EXCEEDED, reopened)
        if closed_v[i] != -1:
            reopened += 1
            if astar:
                raise AssertionError("A* with a consistent heuristic re-expanded a cell")
        closed_v[i] = ver
        expansions += 1
        f_last = f
        if i == goal:
            path = _reconstruct(parent, w, goal)
            return SearchResult(path, ExactCost(g_c[i], g_d[i]), expansions,
                                generated, f_last, Status.FOUND, reopened)
        gci = g_c[i]
        gdi = g_d[i]
        for k in range(8):
            if not ok[k][i]:
                continue
            j = i + offs[k]
            if diag[k]:
                cc, cd = gci, gdi + 1
            else:
                cc, cd = gci + 1, gdi
            jc = g_c[j]
            if jc >= 0:
                # exact comparison of cc + cd*sqrt2 < jc + jd*sqrt2
                dc = cc - jc
                dd = cd - g_d[j]
                if dc >= 0 and dd >= 0:
                    continue
                if dc > 0:        # dd < 0
                    if dc * dc >= 2 * dd * dd:
                        continue
                elif dd > 0:      # dc < 0
                    if 2 * dd * dd >= dc * dc:
                        continue
            g_c[j] = cc
            g_d[j] = cd
            parent[j] = i
            version[j] += 1
            generated += 1
            gf = cc + cd * SQRT2
            fj = gf + hkey[j]
            tbj = -gf if high_g else gf
            if greedy:
                heappush(heap, (-pp[j], fj, tbj, j, version[j]))
            else:
                heappush(heap, (fj, tbj, j, version[j]))

    return SearchResult(None, None, expansions, generated, math.inf,
                        Status.NO_PATH, reopened)


def _solve_focal(task: PTask, config: SearchConfig, hkey, pp) -> SearchResult:
    """Focal Search: OPEN ordered by f = g + h, FOCAL = {f <= w * f_min}
    ordered by the secondary path-probability heuristic (highest first)."""
    grid = task.grid
    w_grid = grid.width
    n = grid.height * w_grid
    adj = grid.adjacency(config.policy)
    ok, offs, diag = adj.ok, adj.offsets, adj.diagonal
    start = task.start.row * w_grid + task.start.col
    goal = task.goal.row * w_grid + task.goal.col
    high_g = config.tie_break is TieBreak.HIGH_G
    limit = config.expansion_limit
    w = config.w
    check = config.check_invariants

    g_c = [-1] * n
    g_d = [0] * n
    version = [0] * n
    closed_v = [-1] * n
    parent = [-1] * n
    expansions = generated = reopened = 0
    f_min = math.inf

    g_c[start] = 0
    version[start] = 1
    f0 = hkey[start]
    open_f = [(f0, 0.0, start, 1)]    # all of OPEN, ordered by f (lazy deletes)
    pending = [(f0, 0.0, start, 1)]   # OPEN entries not yet admitted to FOCAL
    focal = []                        # (-pp, f, tb, idx, version)

    def active(idx, ver):
        return version[idx] == ver and closed_v[idx] != ver

    while True:
        while open_f and not active(open_f[0][2], open_f[0][3]):
            heappop(open_f)
        if not open_f:
            return SearchResult(None, None, expansions, generated, math.inf,
                                Status.NO_PATH, reopened)
        f_min = open_f[0][0]
        bound = w * f_min
        # bring FOCAL back to {n in OPEN : f(n) <= w * f_min}; f_min never
        # decreases under the consistent octile primary, so earlier members
        # still qualify
        while pending and pending[0][0] <= bound:
            fe, tbe, ie, ve = heappop(pending)
            if active(ie, ve):
                heappush(focal, (-pp[ie], fe, tbe, ie, ve))
        while focal and not active(focal[0][3], focal[0][4]):
            heappop(focal)
        assert focal, "FOCAL empty while OPEN is not"
        _, f_s, tb_s, i, ver = heappop(focal)
        if check:
            assert f_s <= bound + 1e-9, f"FOCAL selection {f_s} above bound {bound}"
        if limit is not None and expansions >= limit:
            return SearchResult(None, None, expansions, generated, f_min,
                                Status.LIMIT_EXCEEDED, reopened)
        if closed_v[i] != -1:
            reopened += 1
        closed_v[i] = ver
        expansions += 1
        if i == goal:
            path = _reconstruct(parent, w_grid, goal)
            return SearchResult(path, ExactCost(g_c[i], g_d[i]), expansions,
                                generated, f_min, Status.FOUND, reopened)
        gci = g_c[i]
        gdi = g_d[i]
        for k in range(8):
            if not ok[k][i]:
                continue
            j = i + offs[k]
            if diag[k]:
                cc, cd = gci, gdi + 1
            else:
                cc, cd = gci + 1, gdi
            jc = g_c[j]
            if jc >= 0:
                dc = cc - jc
                dd = cd - g_d[j]
                if dc >= 0 and dd >= 0:
                    continue
                if dc > 0:
                    if dc * dc >= 2 * dd * dd:
                        continue
                elif dd > 0:
                    if 2 * dd * dd >= dc * dc:
                        continue
            g_c[j] = cc
            g_d[j] = cd
            parent[j] = i
            version[j] += 1
            generated += 1
            gf = cc + cd * SQRT2
            fj = gf + hkey[j]
            tbj = -gf if high_g else gf
            entry = (fj, tbj, j, version[j])
            heappush(open_f, entry)
            if fj <= bound:
                heappush(focal, (-pp[j], fj, tbj, j, version[j]))
            else:
                heappush(pending, entry)
