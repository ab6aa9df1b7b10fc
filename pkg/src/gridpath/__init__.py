"""Grid pathfinding workbench.

Exact-cost search over 8-connected grids (A*, weighted A*, correction-factor
weighted A*, Focal Search, PPM-greedy search), the oracle pipeline producing
ground-truth correction-factor and path-probability maps, procedural dataset
generation, and a benchmark harness.
"""

from .costs import ExactCost, compare, to_float
from .grid import (Cell, GridMap, MoveKind, MovePolicy, load_movingai,
                   neighbors, rescale, to_movingai)
from .heuristics import HeuristicMap, HmapKind, chebyshev, euclidean, octile
from .hmap_io import read_hmap, write_hmap
from .oracle import (AnyAnglePath, DistanceMap, build_ppm, cf_map,
                     dijkstra_map, hstar_map, line_of_sight, rasterize,
                     theta_star)
from .search import (PTask, SearchConfig, SearchResult, Status, TieBreak,
                     Variant, solve)

__version__ = "0.1.0"

__all__ = [
    "AnyAnglePath", "Cell", "DistanceMap", "ExactCost", "GridMap",
    "HeuristicMap", "HmapKind", "MoveKind", "MovePolicy", "PTask",
    "SearchConfig", "SearchResult", "Status", "TieBreak", "Variant",
    "build_ppm", "cf_map", "chebyshev", "compare", "dijkstra_map",
    "euclidean", "hstar_map", "line_of_sight", "load_movingai", "neighbors",
    "octile", "rasterize", "read_hmap", "rescale", "solve", "theta_star",
    "to_float", "to_movingai", "write_hmap",
]
