"""Independent brute-force oracles used to derive expected test values.

These deliberately avoid the production code paths: distances come from a
vectorized Bellman relaxation over exact (cardinal, diagonal) move counts,
and segment/cell geometry is decided with rational arithmetic (fractions)
rather than the integer crossing walk used by the package.
"""

from fractions import Fraction

import numpy as np

from gridpath.grid import Cell, GridMap, MovePolicy

_DIRS = (
    (-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0),
    (-1, -1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, 1),
)


def _shift(arr, dr, dc, fill):
    out = np.full_like(arr, fill)
    h, w = arr.shape
    rs = slice(max(0, dr), h + min(0, dr))
    cs = slice(max(0, dc), w + min(0, dc))
    rs_src = slice(max(0, -dr), h - max(0, dr))
    cs_src = slice(max(0, -dc), w - max(0, dc))
    out[rs, cs] = arr[rs_src, cs_src]
    return out


def _pair_less(c1, d1, c2, d2):
    """Vectorized exact comparison c1 + d1*sqrt2 < c2 + d2*sqrt2."""
    dc = c1.astype(np.int64) - c2.astype(np.int64)
    dd = d1.astype(np.int64) - d2.astype(np.int64)
    both_le = (dc <= 0) & (dd <= 0) & ((dc < 0) | (dd < 0))
    mixed_neg = (dc < 0) & (dd > 0) & (2 * dd * dd < dc * dc)
    mixed_pos = (dc > 0) & (dd < 0) & (dc * dc < 2 * dd * dd)
    return both_le | mixed_neg | mixed_pos


def bellman_distances(grid: GridMap, source: Cell, policy: MovePolicy):
    """Exact all-cells shortest paths by relaxation to a fixed point.

    Returns (cards, diags, reachable) as numpy arrays.
    """
    free = ~grid.blocked
    h, w = free.shape
    cards = np.zeros((h, w), dtype=np.int64)
    diags = np.zeros((h, w), dtype=np.int64)
    reach = np.zeros((h, w), dtype=bool)
    assert free[source.row, source.col]
    reach[source.row, source.col] = True

    while True:
        changed = False
        for dr, dc, diag in _DIRS:
            # relax edges nb -> cell where nb = cell shifted by (-dr, -dc)
            nb_free = _shift(free, dr, dc, False)
            nb_reach = _shift(reach, dr, dc, False)
            legal = free & nb_free & nb_reach
            if diag and policy is MovePolicy.NO_CORNER_CUTTING:
                legal &= _shift(free, dr, 0, False) & _shift(free, 0, dc, False)
            cand_c = _shift(cards, dr, dc, 0) + (0 if diag else 1)
            cand_d = _shift(diags, dr, dc, 0) + (1 if diag else 0)
            better = legal & (~reach | _pair_less(cand_c, cand_d, cards, diags))
            if better.any():
                changed = True
                cards = np.where(better, cand_c, cards)
                diags = np.where(better, cand_d, diags)
                reach |= better
        if not changed:
            return cards, diags, reach


def segment_cells_oracle(a: Cell, b: Cell) -> set:
    """Cells whose open interior the center-to-center segment intersects,
    decided per cell with exact rational interval intersection."""
    ay = Fraction(2 * a.row + 1, 2)
    ax = Fraction(2 * a.col + 1, 2)
    dy = Fraction(b.row - a.row)
    dx = Fraction(b.col - a.col)
    out = set()
    r_lo, r_hi = sorted((a.row, b.row))
    c_lo, c_hi = sorted((a.col, b.col))
    for r in range(r_lo, r_hi + 1):
        for c in range(c_lo, c_hi + 1):
            lo, hi = Fraction(0), Fraction(1)
            ok = True
            for pos, d, low, high in ((ay, dy, r, r + 1), (ax, dx, c, c + 1)):
                if d == 0:
                    if not (low < pos < high):
                        ok = False
                        break
                else:
                    t1 = (Fraction(low) - pos) / d
                    t2 = (Fraction(high) - pos) / d
                    if t1 > t2:
                        t1, t2 = t2, t1
                    lo = max(lo, t1)
                    hi = min(hi, t2)
            if ok and lo < hi:  # strict: interiors are open
                out.add(Cell(r, c))
    return out


def corner_crossings_oracle(a: Cell, b: Cell):
    """Exact interior lattice corners the segment passes through, with the
    pair of side cells (the two cells at the corner that the segment does
    not enter)."""
    ay = Fraction(2 * a.row + 1, 2)
    ax = Fraction(2 * a.col + 1, 2)
    dy = Fraction(b.row - a.row)
    dx = Fraction(b.col - a.col)
    pairs = []
    if dx == 0 or dy == 0:
        return pairs
    c_lo, c_hi = sorted((a.col, b.col))
    for x_int in range(c_lo + 1, c_hi + 1):
        t = (Fraction(x_int) - ax) / dx
        if not (0 < t < 1):
            continue
        y = ay + t * dy
        if y.denominator != 1:
            continue
        y_int = int(y)
        before = (ay + (t - Fraction(1, 10 ** 9)) * dy,
                  ax + (t - Fraction(1, 10 ** 9)) * dx)
        after = (ay + (t + Fraction(1, 10 ** 9)) * dy,
                 ax + (t + Fraction(1, 10 ** 9)) * dx)
        cell_before = Cell(int(before[0]), int(before[1]))
        cell_after = Cell(int(after[0]), int(after[1]))
        four = {Cell(y_int - 1, x_int - 1), Cell(y_int - 1, x_int),
                Cell(y_int, x_int - 1), Cell(y_int, x_int)}
        side = four - {cell_before, cell_after}
        pairs.append(tuple(sorted(side)))
    return pairs


def los_oracle(grid: GridMap, a: Cell, b: Cell) -> bool:
    blocked = grid.blocked
    for r, c in segment_cells_oracle(a, b):
        if blocked[r, c]:
            return False
    for pair in corner_crossings_oracle(a, b):
        if len(pair) == 2 and blocked[pair[0]] and blocked[pair[1]]:
            return False
    return True


def random_grid(rng, h, w, density, ensure_free=()):
    blocked = rng.random((h, w)) < density
    for cell in ensure_free:
        blocked[cell[0], cell[1]] = False
    return GridMap(blocked)
