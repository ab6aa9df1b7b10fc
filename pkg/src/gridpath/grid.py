"""Grid representation, movement rules and map text formats.

Cells are addressed (row, col) with row 0 at the top.  Occupancy is stored as
a read-only numpy bool array (True = blocked); a GridMap never changes after
construction, so it can be shared freely between concurrent workers.
"""

from __future__ import annotations

import enum
import io
from typing import NamedTuple

import numpy as np

from .errors import ParseError


class Cell(NamedTuple):
    row: int
    col: int


class MoveKind(enum.Enum):
    CARDINAL = "cardinal"
    DIAGONAL = "diagonal"


class MovePolicy(enum.Enum):
    # PERMISSIVE allows a diagonal move whenever the target cell is free;
    # NO_CORNER_CUTTING additionally requires both shared cardinal cells free.
    PERMISSIVE = "permissive"
    NO_CORNER_CUTTING = "no-corner-cutting"


# Clockwise from north: (dr, dc, is_diagonal).
_DIRECTIONS = (
    (-1, 0, False),
    (-1, 1, True),
    (0, 1, False),
    (1, 1, True),
    (1, 0, False),
    (1, -1, True),
    (0, -1, False),
    (-1, -1, True),
)


class GridMap:
    """Immutable occupancy grid of free/blocked cells."""

    __slots__ = ("_blocked", "_adjacency")

    def __init__(self, blocked):
        arr = np.asarray(blocked, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"occupancy must be a 2-D non-empty array, got shape {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        self._blocked = arr
        self._adjacency = {}  # per-MovePolicy cache, built lazily

    @property
    def height(self) -> int:
        return self._blocked.shape[0]

    @property
    def width(self) -> int:
        return self._blocked.shape[1]

    @property
    def blocked(self) -> np.ndarray:
        """Read-only (height, width) bool array, True where blocked."""
        return self._blocked

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and not self._blocked[cell[0], cell[1]]

    def free_cells(self) -> list[Cell]:
        rows, cols = np.nonzero(~self._blocked)
        return [Cell(int(r), int(c)) for r, c in zip(rows, cols)]

    def __eq__(self, other):
        return isinstance(other, GridMap) and np.array_equal(self._blocked, other._blocked)

    def __hash__(self):
        return hash((self.height, self.width, self._blocked.tobytes()))

    def __repr__(self):
        return f"GridMap({self.height}x{self.width}, {int(self._blocked.sum())} blocked)"

    def adjacency(self, policy: MovePolicy) -> "Adjacency":
        """Vectorized neighbor structure, cached per policy."""
        adj = self._adjacency.get(policy)
        if adj is None:
            adj = Adjacency(self, policy)
            self._adjacency[policy] = adj
        return adj


class Adjacency:
    """Per-direction validity masks for fast successor generation.

    ``ok[k]`` is a bytes view of a (height*width) bool mask: mask[i] is true
    iff the move in direction k from flat cell i is legal (source free, target
    in-bounds and free, corner rule satisfied).  ``offsets[k]`` is the flat
    index delta of direction k; ``diagonal[k]`` tells the move kind.
    """

    __slots__ = ("ok", "offsets", "diagonal")

    def __init__(self, grid: GridMap, policy: MovePolicy):
        blocked = grid.blocked
        h, w = blocked.shape
        free = ~blocked
        self.ok = []
        self.offsets = []
        self.diagonal = []
        for dr, dc, diag in _DIRECTIONS:
            mask = np.zeros((h, w), dtype=bool)
            rs = slice(max(0, -dr), h - max(0, dr))
            cs = slice(max(0, -dc), w - max(0, dc))
            rt = slice(max(0, dr), h + min(0, dr))
            ct = slice(max(0, dc), w + min(0, dc))
            legal = free[rs, cs] & free[rt, ct]
            if diag and policy is MovePolicy.NO_CORNER_CUTTING:
                legal &= free[rs, ct] & free[rt, cs]
            mask[rs, cs] = legal
            self.ok.append(mask.reshape(-1).tobytes())
            self.offsets.append(dr * w + dc)
            self.diagonal.append(diag)


def neighbors(grid: GridMap, cell: Cell, policy: MovePolicy) -> list[tuple[Cell, MoveKind]]:
    """Legal moves from a free cell, clockwise from north.

    Under PERMISSIVE a diagonal move only needs its target free; under
    NO_CORNER_CUTTING both cardinal cells flanking the diagonal must be free
    as well.
    """
    assert grid.is_free(cell), f"neighbors() queried at blocked/out-of-bounds cell {cell}"
    r, c = cell
    out = []
    for dr, dc, diag in _DIRECTIONS:
        nr, nc = r + dr, c + dc
        if not (0 <= nr < grid.height and 0 <= nc < grid.width):
            continue
        if grid.blocked[nr, nc]:
            continue
        if diag and policy is MovePolicy.NO_CORNER_CUTTING:
            if grid.blocked[r, nc] or grid.blocked[nr, c]:
                continue
        out.append((Cell(nr, nc), MoveKind.DIAGONAL if diag else MoveKind.CARDINAL))
    return out


# --- MovingAI .map format ---------------------------------------------------

_MOVINGAI_FREE = frozenset(".G")
_MOVINGAI_BLOCKED = frozenset("@OTWS")


def load_movingai(text) -> GridMap:
    """Parse MovingAI benchmark .map text.

    Expected layout: ``type octile`` / ``height N`` / ``width M`` / ``map``
    followed by exactly N rows of M symbols.  ``.`` and ``G`` are free;
    ``@ O T W S`` are blocked.
    """
    if isinstance(text, (io.TextIOBase,)):
        text = text.read()
    lines = text.splitlines()
    if len(lines) < 4:
        raise ParseError("truncated header (need 4 header lines)", line=len(lines) or 1)

    def header(idx, key):
        parts = lines[idx].strip().split()
        if not parts or parts[0].lower() != key:
            raise ParseError(f"expected '{key} ...'", line=idx + 1)
        return parts

    ptype = header(0, "type")
    if len(ptype) != 2 or ptype[1].lower() != "octile":
        raise ParseError(f"unsupported map type {lines[0].strip()!r}", line=1)
    try:
        height = int(header(1, "height")[1])
        width = int(header(2, "width")[1])
    except (IndexError, ValueError):
        raise ParseError("height/width must be integers", line=2) from None
    if height < 1 or width < 1:
        raise ParseError(f"non-positive dimensions {height}x{width}", line=2)
    if lines[3].strip().lower() != "map":
        raise ParseError("expected 'map'", line=4)

    rows = [ln for ln in lines[4:] if ln.strip() != ""]
    if len(rows) != height:
        raise ParseError(f"declared height {height} but found {len(rows)} map rows",
                         line=5 + min(len(rows), height))
    blocked = np.zeros((height, width), dtype=bool)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"row has {len(row)} symbols, expected {width}", line=5 + r)
        for c, ch in enumerate(row):
            if ch in _MOVINGAI_BLOCKED:
                blocked[r, c] = True
            elif ch not in _MOVINGAI_FREE:
                raise ParseError(f"unknown symbol {ch!r}", line=5 + r)
    return GridMap(blocked)


def to_movingai(grid: GridMap) -> str:
    rows = ["".join("@" if b else "." for b in row) for row in grid.blocked]
    return "\n".join(["type octile", f"height {grid.height}", f"width {grid.width}", "map", *rows]) + "\n"


# --- internal map format: "H W" then H rows of ./# --------------------------

def load_internal(text) -> GridMap:
    if isinstance(text, (io.TextIOBase,)):
        text = text.read()
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise ParseError("empty map text", line=1)
    try:
        h, w = (int(t) for t in lines[0].split())
    except ValueError:
        raise ParseError("first line must be 'H W'", line=1) from None
    if len(lines) - 1 != h:
        raise ParseError(f"declared height {h} but found {len(lines) - 1} rows", line=len(lines))
    blocked = np.zeros((h, w), dtype=bool)
    for r, row in enumerate(lines[1:]):
        if len(row) != w:
            raise ParseError(f"row has {len(row)} symbols, expected {w}", line=r + 2)
        for c, ch in enumerate(row):
            if ch == "#":
                blocked[r, c] = True
            elif ch != ".":
                raise ParseError(f"unknown symbol {ch!r}", line=r + 2)
    return GridMap(blocked)


def to_internal(grid: GridMap) -> str:
    rows = ["".join("#" if b else "." for b in row) for row in grid.blocked]
    return "\n".join([f"{grid.height} {grid.width}", *rows]) + "\n"


def load_map_file(path) -> GridMap:
    """Load a map by extension: .map is MovingAI, anything else internal."""
    text = open(path, "r", encoding="ascii").read()
    if str(path).endswith(".map"):
        return load_movingai(text)
    return load_internal(text)


def rescale(grid: GridMap, target_h: int, target_w: int) -> GridMap:
    """Block-wise rescale; an output cell is blocked iff >= half of its
    source block is blocked (ties blocked)."""
    if target_h < 1 or target_w < 1:
        raise ValueError("target dimensions must be >= 1")
    src = grid.blocked
    h, w = src.shape
    out = np.zeros((target_h, target_w), dtype=bool)
    for i in range(target_h):
        r0 = (i * h) // target_h
        r1 = max(((i + 1) * h) // target_h, r0 + 1)
        for j in range(target_w):
            c0 = (j * w) // target_w
            c1 = max(((j + 1) * w) // target_w, c0 + 1)
            block = src[r0:r1, c0:c1]
            # integer comparison keeps the >= 0.5 tie rule exact
            out[i, j] = 2 * int(block.sum()) >= block.size
    return GridMap(out)
