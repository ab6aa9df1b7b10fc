"""Regenerate the MovingAI-format fixture maps under tests/data/movingai/.

The three maps mirror the topology families of the standard out-of-distribution
benchmark (a street-grid city, a wide-corridor maze, a terrain map with woods
and water) and exercise the full symbol table: . G free, @ O T W S blocked.
Deterministic; run from the repo root.
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "movingai"


def header(h, w):
    return f"type octile\nheight {h}\nwidth {w}\nmap\n"


def city_map(size=256, seed=1):
    rng = np.random.default_rng(seed)
    grid = np.full((size, size), ".", dtype="U1")
    # irregular street grid: building blocks separated by streets
    r = 2
    while r < size - 2:
        block_h = int(rng.integers(12, 28))
        c = 2
        while c < size - 2:
            block_w = int(rng.integers(12, 28))
            if rng.random() < 0.92:
                rr = min(r + block_h, size - 2)
                cc = min(c + block_w, size - 2)
                grid[r:rr, c:cc] = "@"
                # occasional inner courtyard
                if rng.random() < 0.25 and rr - r > 8 and cc - c > 8:
                    grid[r + 3:rr - 3, c + 3:cc - 3] = "."
            c += block_w + int(rng.integers(3, 7))
        r += block_h + int(rng.integers(3, 7))
    # a river with bridges
    col = size // 3
    for row in range(size):
        col = int(np.clip(col + rng.integers(-1, 2), 4, size - 10))
        grid[row, col:col + 5] = "W"
        if row % 48 == 24:
            grid[row, col:col + 5] = "."
    return grid


def maze_map(size=512, seed=2, corridor=16):
    rng = np.random.default_rng(seed)
    cells = size // (2 * corridor)
    grid = np.full((size, size), "@", dtype="U1")
    visited = np.zeros((cells, cells), dtype=bool)
    stack = [(0, 0)]
    visited[0, 0] = True

    def carve(cr, cc):
        r0 = cr * 2 * corridor
        c0 = cc * 2 * corridor
        grid[r0:r0 + corridor, c0:c0 + corridor] = "."

    carve(0, 0)
    while stack:
        r, c = stack[-1]
        options = [(r + dr, c + dc, dr, dc)
                   for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1))
                   if 0 <= r + dr < cells and 0 <= c + dc < cells
                   and not visited[r + dr, c + dc]]
        if not options:
            stack.pop()
            continue
        nr, nc, dr, dc = options[rng.integers(0, len(options))]
        visited[nr, nc] = True
        carve(nr, nc)
        # knock out the wall between the two corridor cells
        r0 = min(r, nr) * 2 * corridor
        c0 = min(c, nc) * 2 * corridor
        if dr:
            grid[r0 + corridor:r0 + 2 * corridor, c0:c0 + corridor] = "."
        else:
            grid[r0:r0 + corridor, c0 + corridor:c0 + 2 * corridor] = "."
        stack.append((nr, nc))
    return grid


def game_map(size=256, seed=3):
    rng = np.random.default_rng(seed)
    grid = np.full((size, size), "G", dtype="U1")  # grass is passable
    yy, xx = np.mgrid[0:size, 0:size]
    # lakes
    for _ in range(6):
        cy, cx = rng.integers(20, size - 20, 2)
        ry, rx = rng.integers(10, 34, 2)
        lake = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 < 1.0
        grid[lake] = "W"
        rim = (((yy - cy) / (ry + 3.0)) ** 2 + ((xx - cx) / (rx + 3.0)) ** 2 < 1.0) & ~lake
        grid[rim & (rng.random((size, size)) < 0.5)] = "S"
    # forests: random walks of tree clusters
    for _ in range(40):
        r, c = rng.integers(4, size - 4, 2)
        for _ in range(120):
            grid[max(r - 1, 0):r + 2, max(c - 1, 0):c + 2] = "T"
            r = int(np.clip(r + rng.integers(-2, 3), 2, size - 3))
            c = int(np.clip(c + rng.integers(-2, 3), 2, size - 3))
    # rocky outcrops
    for _ in range(25):
        r, c = rng.integers(2, size - 10, 2)
        h, w = rng.integers(2, 8, 2)
        grid[r:r + h, c:c + w] = "O"
    # cleared paths keep the map mostly connected
    for band in range(0, size, 64):
        grid[band:band + 6, :] = np.where(grid[band:band + 6, :] == "W",
                                          grid[band:band + 6, :], ".")
        grid[:, band:band + 6] = np.where(grid[:, band:band + 6] == "W",
                                          grid[:, band:band + 6], ".")
    return grid


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, grid in (("city_256.map", city_map()),
                       ("maze_512.map", maze_map()),
                       ("game_256.map", game_map())):
        h, w = grid.shape
        text = header(h, w) + "\n".join("".join(row) for row in grid) + "\n"
        (OUT / name).write_text(text)
        blocked = np.isin(grid, list("@OTWS")).mean()
        print(f"{name}: {h}x{w}, {blocked:.1%} blocked")


if __name__ == "__main__":
    main()
