"""Bad-window marking, grid graphs and interface paths.

Cells are 1-indexed (row, col) as in pictures.  Grid-graph vertices are
gridline intersections (i, j) with 0 <= i, j <= extent; vertex (i, j) is the
top-left corner of cell (i + 1, j + 1).

A bad window is marked at its upper-right cell.  An edge separates when it
borders two cells of which exactly one is marked; edges on the outer border
border a single cell and never separate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InputError, ParseError
from .grid import Picture, window_codes

Cell = tuple[int, int]
Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]

STEP = {(1, 0): "down", (-1, 0): "up", (0, 1): "right", (0, -1): "left"}


@dataclass(frozen=True)
class MarkedGrid:
    rows: int
    cols: int
    marks: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError("marked grid needs a positive extent")
        marks = frozenset(self.marks)
        for r, c in marks:
            if not (1 <= r <= self.rows and 1 <= c <= self.cols):
                raise InputError(f"mark ({r}, {c}) outside a {self.rows}x{self.cols} grid")
        object.__setattr__(self, "marks", marks)

    @property
    def extent(self) -> tuple[int, int]:
        return self.rows, self.cols

    def marked(self, cell: Cell) -> bool:
        return cell in self.marks


def mark_bad_windows(truth: Picture, output: Picture, k: int) -> MarkedGrid:
    if truth.n != output.n:
        raise InputError(f"extent mismatch: {truth.n} vs {output.n}")
    n = truth.n
    if not 1 <= k <= n:
        raise InputError(f"window side k={k} outside 1..{n}")
    span = n - k + 1
    a, b = window_codes(truth, k), window_codes(output, k)
    marks = {(i // span + 1, i % span + k) for i in range(len(a)) if a[i] != b[i]}
    return MarkedGrid(n, n, frozenset(marks))


def dump_marks(m: MarkedGrid) -> str:
    lines = [f"MARKS {m.rows}x{m.cols}"]
    for r in range(1, m.rows + 1):
        lines.append("".join("X" if (r, c) in m.marks else "." for c in range(1, m.cols + 1)))
    return "\n".join(lines) + "\n"


def load_marks(text: str) -> MarkedGrid:
    lines = text.rstrip("\n").split("\n")
    head = lines[0].split()
    try:
        if len(head) != 2 or head[0] != "MARKS":
            raise ValueError
        rows, cols = (int(x) for x in head[1].split("x"))
    except ValueError:
        raise ParseError("header must read 'MARKS <rows>x<cols>'", 1) from None
    if len(lines) - 1 != rows:
        raise ParseError(f"expected {rows} rows, got {len(lines) - 1}", 1)
    marks = set()
    for r, line in enumerate(lines[1:], start=1):
        if len(line) != cols or set(line) - {".", "X"}:
            raise ParseError(f"row must be {cols} characters of '.' and 'X'", r + 1)
        marks.update((r, c) for c, ch in enumerate(line, start=1) if ch == "X")
    return MarkedGrid(rows, cols, frozenset(marks))


# --- grid graph ---------------------------------------------------------------

@dataclass(frozen=True)
class GridGraph:
    rows: int
    cols: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    incidence: dict  # edge -> tuple of bordering cells

    def cells_of(self, u: Vertex, v: Vertex) -> tuple[Cell, ...]:
        return self.incidence[(u, v) if u <= v else (v, u)]


def edge_cells(u: Vertex, v: Vertex, rows: int, cols: int) -> tuple[Cell, ...]:
    """Cells bordering the unit edge uv (one on the border, else two)."""
    (i, j), (i2, j2) = sorted((u, v))
    if i == i2:  # horizontal edge on gridline i between columns j and j+1
        out = [(i, j + 1)] if i >= 1 else []
        if i < rows:
            out.append((i + 1, j + 1))
    else:  # vertical edge on gridline j between rows i and i+1
        out = [(i + 1, j)] if j >= 1 else []
        if j < cols:
            out.append((i + 1, j + 1))
    return tuple(out)


def grid_graph(extent: int | tuple[int, int]) -> GridGraph:
    rows, cols = (extent, extent) if isinstance(extent, int) else extent
    if rows < 1 or cols < 1:
        raise InputError("grid graph needs a positive extent")
    vertices = tuple((i, j) for i in range(rows + 1) for j in range(cols + 1))
    edges = []
    for i, j in vertices:
        if j < cols:
            edges.append(((i, j), (i, j + 1)))
        if i < rows:
            edges.append(((i, j), (i + 1, j)))
    incidence = {e: edge_cells(*e, rows, cols) for e in edges}
    return GridGraph(rows, cols, vertices, tuple(edges), incidence)


def separating_edges(m: MarkedGrid) -> list[Edge]:
    """Edges with one marked and one unmarked bordering cell."""
    out = []
    for r, c in m.marks:
        i, j = r - 1, c - 1
        # the four sides of the marked cell
        for u, v, other in (((i, j), (i, j + 1), (r - 1, c)),
                            ((i + 1, j), (i + 1, j + 1), (r + 1, c)),
                            ((i, j), (i + 1, j), (r, c - 1)),
                            ((i, j + 1), (i + 1, j + 1), (r, c + 1))):
            if 1 <= other[0] <= m.rows and 1 <= other[1] <= m.cols and other not in m.marks:
                out.append((u, v))
    return sorted(out)


# --- interface paths ----------------------------------------------------------

@dataclass(frozen=True)
class InterfacePath:
    vertices: tuple[Vertex, ...]
    # degree-4 vertices where the path turned to stay on the same marked cell
    branches: tuple[Vertex, ...] = ()

    @property
    def steps(self) -> tuple[str, ...]:
        vs = self.vertices
        return tuple(STEP[(b[0] - a[0], b[1] - a[1])] for a, b in zip(vs, vs[1:]))

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def closed(self) -> bool:
        return len(self.vertices) > 1 and self.vertices[0] == self.vertices[-1]


def _key(u: Vertex, v: Vertex) -> Edge:
    return (u, v) if u <= v else (v, u)


class _Walker:
    def __init__(self, m: MarkedGrid):
        self.m = m
        self.adj: dict[Vertex, list[Vertex]] = {}
        self.unused: set[Edge] = set()
        for u, v in separating_edges(m):
            self.adj.setdefault(u, []).append(v)
            self.adj.setdefault(v, []).append(u)
            self.unused.add((u, v))

    def marked_side(self, u: Vertex, v: Vertex) -> Cell:
        for cell in edge_cells(u, v, self.m.rows, self.m.cols):
            if cell in self.m.marks:
                return cell
        raise AssertionError("separating edge without a marked cell")  # pragma: no cover

    def walk(self, start: Vertex, first: Vertex | None = None) -> InterfacePath:
        path = [start]
        branches = []
        prev, cur = None, start
        while True:
            options = [w for w in self.adj.get(cur, ()) if _key(cur, w) in self.unused]
            if not options:
                break
            if prev is None:
                nxt = first if first in options else min(options)
            elif len(options) == 1:
                nxt = options[0]
            else:
                cell = self.marked_side(prev, cur)
                hug = [w for w in options if cell in edge_cells(cur, w, self.m.rows, self.m.cols)]
                nxt = hug[0] if hug else min(options)
                branches.append(cur)
            self.unused.discard(_key(cur, nxt))
            path.append(nxt)
            prev, cur = cur, nxt
        return InterfacePath(tuple(path), tuple(branches))


def extract_interfaces(m: MarkedGrid) -> list[InterfacePath]:
    """All separating edges assembled into maximal paths.

    Open paths start at their lexicographically least endpoint; closed
    interfaces start at their least vertex and head right first.  At a
    vertex where four separating edges meet, the walk turns so as to keep
    following the same marked cell.
    """
    w = _Walker(m)
    paths = []
    ends = sorted(v for v, nb in w.adj.items() if len(nb) % 2 == 1)
    for v in ends:
        if any(_key(v, x) in w.unused for x in w.adj[v]):
            paths.append(w.walk(v))
    while w.unused:
        u, v = min(w.unused)
        paths.append(w.walk(u, (u[0], u[1] + 1)))
    return paths


def trace_from(m: MarkedGrid, start: Vertex) -> InterfacePath | None:
    """The interface path with initial vertex `start`, if one begins there."""
    w = _Walker(m)
    if start not in w.adj:
        return None
    return w.walk(start)


@dataclass(frozen=True)
class StepCounts:
    up: int
    down: int
    left: int
    right: int
    contributing: int


_CONTRIBUTES = {"down": ("right", "down"), "right": ("right",), "left": ("down", "left")}


def classify_steps(p: InterfacePath | Sequence[str]) -> StepCounts:
    steps = p.steps if isinstance(p, InterfacePath) else tuple(p)
    for s in steps:
        if s not in ("up", "down", "left", "right"):
            raise InputError(f"unknown step {s!r}")
    contributing = sum(1 for a, b in zip(steps, steps[1:]) if a in _CONTRIBUTES.get(b, ()))
    return StepCounts(steps.count("up"), steps.count("down"), steps.count("left"),
                      steps.count("right"), contributing)


def left_right_separation_ok(p: InterfacePath, k: int) -> bool:
    """A left-step followed later by a right-step in the same column must be
    at least k cells apart."""
    lefts: dict[int, list[int]] = {}
    vs = p.vertices
    for a, b in zip(vs, vs[1:]):
        if a[0] != b[0]:
            continue
        col = min(a[1], b[1])
        if b[1] < a[1]:
            lefts.setdefault(col, []).append(a[0])
        else:
            for row in lefts.get(col, ()):
                if abs(a[0] - row) < k:
                    return False
    return True


# --- first-mistake corner events ---------------------------------------------

@dataclass(frozen=True)
class CornerReport:
    """Interface analysis of a bad corner placement, in the canonical frame.

    The canonical frame is that of a rightward extension at the top corner:
    rows run laterally away from the corner, columns outward, and columns
    1..k-1 are droplet.
    """

    k: int
    marks: MarkedGrid
    wrong: frozenset
    path: InterfacePath | None
    no_up_steps: bool
    separation_ok: bool
    length_ok: bool

    @property
    def ok(self) -> bool:
        return self.path is not None and self.no_up_steps and self.separation_ok \
            and self.length_ok


def to_canonical(direction: str, corner: str, rect: tuple[int, int, int, int],
                 k: int, r: int, c: int) -> Cell:
    """Canvas cell -> 0-based (lateral, outward) inside a corner block."""
    top, bottom, left, right = rect
    if direction in ("right", "left"):
        lat = r - top if corner == "first" else bottom - r
        out = c - (right - k + 2) if direction == "right" else (left + k - 2) - c
    else:
        lat = c - left if corner == "first" else right - c
        out = r - (bottom - k + 2) if direction == "down" else (top + k - 2) - r
    return lat, out


def block_cells(block: Iterable[tuple[int, int, int]], k: int) -> dict[Cell, int]:
    cells: dict[Cell, int] = {}
    kk = k * k
    for r, c, code in block:
        for i in range(k):
            for j in range(k):
                cells[(r + i, c + j)] = (code >> (kk - 1 - i * k - j)) & 1
    return cells


def corner_marks(wrong: Iterable[Cell], k: int) -> MarkedGrid:
    """Marks of the block's windows given its wrong cells (0-based, canonical)."""
    marks = set()
    for l, o in wrong:
        for top in range(max(0, l - k + 1), min(l, k - 1) + 1):
            for ur in range(max(o, k - 1), min(o + k - 1, 2 * k - 2) + 1):
                marks.add((top + 1, ur + 1))
    return MarkedGrid(2 * k - 1, 2 * k - 1, frozenset(marks))


def analyse_corner(truth: Picture, alignment: tuple[int, int], k: int, direction: str,
                   corner: str, rect: tuple[int, int, int, int],
                   block: Iterable[tuple[int, int, int]]) -> CornerReport:
    """Mark the lookahead block of a corner placement against the truth.

    `alignment` (R, C) maps canvas cell (r, c) to truth cell (R + r, C + c);
    cells falling outside the truth count as wrong.
    """
    R, C = alignment
    n = truth.n
    grid = truth.cells()
    wrong = set()
    for (r, c), bit in block_cells(block, k).items():
        tr, tc = R + r, C + c
        if not (1 <= tr <= n and 1 <= tc <= n) or grid[tr - 1][tc - 1] != bit:
            wrong.add(to_canonical(direction, corner, rect, k, r, c))
    marks = corner_marks(wrong, k)
    path = trace_from(marks, (0, k - 1))
    if path is None:
        return CornerReport(k, marks, frozenset(wrong), None, False, False, False)
    counts = classify_steps(path)
    return CornerReport(k, marks, frozenset(wrong), path, counts.up == 0,
                        left_right_separation_ok(path, k), path.length <= 6 * k)
