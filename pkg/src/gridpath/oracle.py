"""Ground-truth generation: exact distance maps, correction-factor maps,
any-angle reference paths, and path-probability maps.

Distance maps keep the (cardinal, diagonal) move counts of the true shortest
path to every reachable cell, so downstream ratios can decide exact equality
(is this cell on *some* shortest path?) without a float tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Optional

import numpy as np

from .costs import SQRT2, ExactCost
from .errors import ContractViolation, NoPathError
from .grid import Cell, GridMap, MovePolicy
from .heuristics import HeuristicMap, HmapKind
from .search import PTask, H_SENTINEL

PP_THRESHOLD = 0.95


@dataclass(frozen=True)
class DistanceMap:
    """Exact shortest-path cost from ``source`` to every reachable cell."""

    source: Cell
    cards: np.ndarray = field(repr=False)      # int32 (h, w)
    diags: np.ndarray = field(repr=False)      # int32 (h, w)
    reachable: np.ndarray = field(repr=False)  # bool (h, w)

    @property
    def height(self) -> int:
        return self.cards.shape[0]

    @property
    def width(self) -> int:
        return self.cards.shape[1]

    def cost(self, cell: Cell) -> Optional[ExactCost]:
        if not self.reachable[cell[0], cell[1]]:
            return None
        return ExactCost(int(self.cards[cell[0], cell[1]]),
                         int(self.diags[cell[0], cell[1]]))

    def float_values(self) -> np.ndarray:
        """Float distances with +inf at unreachable cells."""
        vals = self.cards.astype(np.float64) + self.diags.astype(np.float64) * SQRT2
        return np.where(self.reachable, vals, np.inf)


def dijkstra_map(grid: GridMap, source: Cell, policy: MovePolicy) -> DistanceMap:
    """Exact single-source shortest paths over the whole grid."""
    assert grid.is_free(source), f"dijkstra source {source} is blocked/out of bounds"
    h, w = grid.height, grid.width
    n = h * w
    adjacency = grid.adjacency(policy)
    ok, offs, diag = adjacency.ok, adjacency.offsets, adjacency.diagonal

    g_c = [-1] * n
    g_d = [0] * n
    done = bytearray(n)
    s = source.row * w + source.col
    g_c[s] = 0
    heap = [(0.0, s)]
    while heap:
        _, i = heappop(heap)
        if done[i]:
            continue
        done[i] = 1
        gci = g_c[i]
        gdi = g_d[i]
        for k in range(8):
            if not ok[k][i]:
                continue
            j = i + offs[k]
            if done[j]:
                continue
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
            heappush(heap, (cc + cd * SQRT2, j))

    cards = np.array(g_c, dtype=np.int32).reshape(h, w)
    diags = np.array(g_d, dtype=np.int32).reshape(h, w)
    reachable = cards >= 0
    cards = np.where(reachable, cards, 0).astype(np.int32)
    return DistanceMap(source, cards, diags.astype(np.int32), reachable)


def _octile_counts(h: int, w: int, goal: Cell):
    dr = np.abs(np.arange(h) - goal.row)[:, None]
    dc = np.abs(np.arange(w) - goal.col)[None, :]
    hi = np.maximum(dr, dc)
    lo = np.minimum(dr, dc)
    return (hi - lo).astype(np.int64), lo.astype(np.int64)


def cf_map(grid: GridMap, goal: Cell, policy: MovePolicy) -> HeuristicMap:
    """Correction factors octile/h* per cell; 1 at the goal, 0 at blocked and
    unreachable cells."""
    dist = dijkstra_map(grid, goal, policy)
    oc, od = _octile_counts(grid.height, grid.width, goal)
    h_f = oc + od * SQRT2
    hstar_f = dist.cards.astype(np.float64) + dist.diags.astype(np.float64) * SQRT2
    with np.errstate(divide="ignore", invalid="ignore"):
        cf = np.where(hstar_f > 0.0, h_f / np.where(hstar_f > 0.0, hstar_f, 1.0), 1.0)
    cf = np.where(dist.reachable, cf, 0.0)
    cf[goal.row, goal.col] = 1.0  # 0/0 convention
    return HeuristicMap(HmapKind.CF, cf)


def hstar_map(grid: GridMap, goal: Cell, policy: MovePolicy) -> HeuristicMap:
    """Perfect cost-to-go as floats; sentinel at unreachable free cells, 0 at
    blocked cells.  This is the training target for absolute-heuristic
    predictors."""
    dist = dijkstra_map(grid, goal, policy)
    vals = dist.cards.astype(np.float64) + dist.diags.astype(np.float64) * SQRT2
    vals = np.where(dist.reachable, vals, H_SENTINEL)
    vals = np.where(grid.blocked, 0.0, vals)
    return HeuristicMap(HmapKind.ABS, vals)


# --- segment traversal (shared by line-of-sight and rasterization) ----------

def _walk_segment(a: Cell, b: Cell):
    """Cells whose interior the open segment between the centers of ``a`` and
    ``b`` intersects, plus the pairs of side cells at exact corner crossings.

    All arithmetic is integer: boundary crossings along the segment happen at
    parameters (1+2i)/(2*|dc|) horizontally and (1+2j)/(2*|dr|) vertically,
    compared by cross-multiplication.
    """
    r, c = a
    r1, c1 = b
    dr = r1 - r
    dc = c1 - c
    cells = [(r, c)]
    corners = []
    if dr == 0 and dc == 0:
        return cells, corners
    sr = 1 if dr > 0 else -1
    sc = 1 if dc > 0 else -1
    adr = abs(dr)
    adc = abs(dc)
    i = j = 0  # crossings consumed: i columns, j rows
    while i < adc or j < adr:
        # next column crossing at t=(1+2i)/(2 adc); next row at (1+2j)/(2 adr)
        tv = (1 + 2 * i) * adr if i < adc else None
        th = (1 + 2 * j) * adc if j < adr else None
        if th is None or (tv is not None and tv < th):
            c += sc
            i += 1
        elif tv is None or th < tv:
            r += sr
            j += 1
        else:  # exact corner crossing: step diagonally, note the side cells
            corners.append(((r, c + sc), (r + sr, c)))
            r += sr
            c += sc
            i += 1
            j += 1
        cells.append((r, c))
    return cells, corners


def line_of_sight(grid: GridMap, a: Cell, b: Cell) -> bool:
    """True iff the center-to-center segment crosses no blocked cell interior
    and threads no corner shared by two diagonally-blocked cells."""
    assert grid.is_free(a) and grid.is_free(b)
    blocked = grid.blocked
    cells, corners = _walk_segment(a, b)
    for r, c in cells:
        if blocked[r, c]:
            return False
    for (r1, c1), (r2, c2) in corners:
        if blocked[r1, c1] and blocked[r2, c2]:
            return False
    return True


@dataclass(frozen=True)
class AnyAnglePath:
    waypoints: list          # of Cell, first = start, last = goal
    cost: float              # sum of Euclidean segment lengths

    def __post_init__(self):
        assert self.waypoints, "empty any-angle path"


def rasterize(path: AnyAnglePath) -> set:
    """All cells whose interior some path segment intersects (waypoints
    included)."""
    out = set()
    pts = path.waypoints
    out.add(Cell(*pts[0]))
    for a, b in zip(pts, pts[1:]):
        cells, _ = _walk_segment(a, b)
        for r, c in cells:
            out.add(Cell(r, c))
    return out


def theta_star(task: PTask, policy: MovePolicy = MovePolicy.PERMISSIVE) -> AnyAnglePath:
    """Basic any-angle search: grid A* over Euclidean edge costs where a
    successor's parent is lifted to its grandparent whenever line of sight
    holds.  Returns corner-hugging waypoints; cost never exceeds the grid
    shortest-path cost."""
    grid = task.grid
    h, w = grid.height, grid.width
    n = h * w
    adjacency = grid.adjacency(policy)
    ok, offs, diag = adjacency.ok, adjacency.offsets, adjacency.diagonal
    blocked = grid.blocked

    start = task.start.row * w + task.start.col
    goal = task.goal.row * w + task.goal.col
    gr, gc_ = task.goal

    g = [math.inf] * n
    parent = [-1] * n
    done = bytearray(n)
    g[start] = 0.0
    parent[start] = start

    def heur(i):
        return math.hypot(i // w - gr, i % w - gc_)

    def sight(i, j):
        cells, corners = _walk_segment(Cell(i // w, i % w), Cell(j // w, j % w))
        for r, c in cells:
            if blocked[r, c]:
                return False
        for (r1, c1), (r2, c2) in corners:
            if blocked[r1, c1] and blocked[r2, c2]:
                return False
        return True

    heap = [(heur(start), start)]
    while heap:
        _, i = heappop(heap)
        if done[i]:
            continue
        done[i] = 1
        if i == goal:
            break
        par = parent[i]
        for k in range(8):
            if not ok[k][i]:
                continue
            j = i + offs[k]
            if done[j]:
                continue
            # lift to the grandparent when it can see the successor; the
            # direct segment from the parent is never longer (triangle
            # inequality), so trying it alone is safe
            if sight(par, j):
                cand_parent = par
            else:
                cand_parent = i
            dj = math.hypot(j // w - cand_parent // w, j % w - cand_parent % w)
            cand_g = g[cand_parent] + dj
            if cand_g < g[j]:
                g[j] = cand_g
                parent[j] = cand_parent
                heappush(heap, (cand_g + heur(j), j))

    if not done[goal]:
        raise NoPathError(f"goal {task.goal} unreachable from {task.start}")

    chain = []
    i = goal
    while True:
        chain.append(Cell(i // w, i % w))
        if i == start:
            break
        i = parent[i]
    chain.reverse()

    # collapse collinear runs (same direction, zero cross product) when the
    # merged segment keeps line of sight; grid steps through pinch corners
    # are legal moves but have no sight, so they must stay as-is
    pts = [chain[0]]
    for p in chain[1:]:
        if len(pts) >= 2:
            r0, c0 = pts[-2]
            r1, c1 = pts[-1]
            cross = (r1 - r0) * (p.col - c1) - (c1 - c0) * (p.row - r1)
            dot = (r1 - r0) * (p.row - r1) + (c1 - c0) * (p.col - c1)
            if cross == 0 and dot >= 0 and sight(r0 * w + c0, p.row * w + p.col):
                pts[-1] = p
                continue
        if p != pts[-1]:
            pts.append(p)
    cost = sum(math.hypot(b.row - a.row, b.col - a.col) for a, b in zip(pts, pts[1:]))
    return AnyAnglePath(pts, cost)


class PpmNumerator:
    GRID_OPTIMAL = "grid"
    THETA_COST = "theta"


def build_ppm(task: PTask, d_start: DistanceMap, d_goal: DistanceMap,
              theta_cells: set, numerator: str = PpmNumerator.GRID_OPTIMAL,
              theta_cost: Optional[float] = None) -> HeuristicMap:
    """Path-probability map: 1 on the any-angle reference path, the detour
    ratio C / (d_start + d_goal) where it reaches 0.95, and 0 elsewhere.

    Cells whose exact d_start + d_goal equals the optimal cost C* score
    exactly 1 (they lie on some shortest path).  With the THETA_COST
    numerator, ``theta_cost`` supplies C instead of C*.
    """
    grid = task.grid
    h, w = grid.height, grid.width
    for name, dm, src in (("d_start", d_start, task.start), ("d_goal", d_goal, task.goal)):
        if dm.height != h or dm.width != w:
            raise ContractViolation(f"{name} is {dm.height}x{dm.width}, grid is {h}x{w}")
        if dm.source != src:
            raise ContractViolation(f"{name} source {dm.source} != task endpoint {src}")
    opt = d_goal.cost(task.start)
    if opt is None:
        raise ContractViolation("task is not solvable")

    both = d_start.reachable & d_goal.reachable & ~grid.blocked
    sum_c = d_start.cards.astype(np.int64) + d_goal.cards.astype(np.int64)
    sum_d = d_start.diags.astype(np.int64) + d_goal.diags.astype(np.int64)
    on_shortest = both & (sum_c == opt.cardinals) & (sum_d == opt.diagonals)

    if numerator == PpmNumerator.GRID_OPTIMAL:
        num = opt.to_float()
    elif numerator == PpmNumerator.THETA_COST:
        if theta_cost is None:
            raise ContractViolation("THETA_COST numerator requires theta_cost")
        num = float(theta_cost)
    else:
        raise ValueError(f"unknown numerator {numerator!r}")

    denom = d_start.float_values() + d_goal.float_values()
    with np.errstate(invalid="ignore"):
        ratio = np.where(both & (denom > 0.0), num / np.where(denom > 0.0, denom, 1.0), 0.0)
    pp = np.where(ratio >= PP_THRESHOLD, np.minimum(ratio, 1.0), 0.0)
    pp = np.where(on_shortest, 1.0, pp)
    pp = np.where(both, pp, 0.0)
    for cell in theta_cells:
        pp[cell[0], cell[1]] = 1.0
    return HeuristicMap(HmapKind.PP, pp)


def make_ppm(task: PTask, policy: MovePolicy = MovePolicy.PERMISSIVE,
             numerator: str = PpmNumerator.GRID_OPTIMAL) -> HeuristicMap:
    """Full path-probability pipeline for one task: two distance maps, the
    any-angle reference path, then the ratio map."""
    d_start = dijkstra_map(task.grid, task.start, policy)
    d_goal = dijkstra_map(task.grid, task.goal, policy)
    path = theta_star(task, policy)
    cells = rasterize(path)
    return build_ppm(task, d_start, d_goal, cells, numerator=numerator,
                     theta_cost=path.cost)
