"""Pictures, k x k windows and decks.

Cells are addressed 1-indexed as (row, column) with row 1 at the top.  Rows
are packed into Python ints most-significant-bit first, so that the binary
string of a row reads left to right.  A window is packed the same way over
its k*k cells in row-major order; sorting window codes numerically therefore
sorts their 01-strings lexicographically.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import InputError, MalformedDeckError, ParseError

MAX_K = 16

# Part of the reproducibility contract: changing either invalidates seeds.
GENERATOR_NAME = "numpy.PCG64"
GENERATOR_VERSION = 1


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_K:
        raise InputError(f"window side k={k} outside 1..{MAX_K}")


@dataclass(frozen=True)
class Picture:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"picture side must be positive, got {self.n}")
        if len(self.rows) != self.n:
            raise InputError(f"expected {self.n} rows, got {len(self.rows)}")
        limit = 1 << self.n
        for row in self.rows:
            if not 0 <= row < limit:
                raise InputError(f"row value {row} does not fit in {self.n} columns")

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[int]]) -> "Picture":
        n = len(cells)
        rows = []
        for i, line in enumerate(cells):
            if len(line) != n:
                raise InputError(f"row {i + 1} has {len(line)} cells, expected {n}")
            value = 0
            for bit in line:
                if bit not in (0, 1):
                    raise InputError(f"cell value {bit!r} is not 0 or 1")
                value = (value << 1) | bit
            rows.append(value)
        return cls(n, tuple(rows))

    def cell(self, r: int, c: int) -> int:
        if not (1 <= r <= self.n and 1 <= c <= self.n):
            raise InputError(f"cell ({r}, {c}) outside a picture of size {self.n}")
        return (self.rows[r - 1] >> (self.n - c)) & 1

    def cells(self) -> list[list[int]]:
        n = self.n
        return [[(row >> (n - 1 - j)) & 1 for j in range(n)] for row in self.rows]

    def to_array(self) -> np.ndarray:
        return np.array(self.cells(), dtype=np.uint8).reshape(self.n, self.n)

    def __str__(self) -> str:
        return "\n".join(format(row, f"0{self.n}b") for row in self.rows)


@dataclass(frozen=True)
class KGrid:
    """A k x k window identified by its row-major k*k-bit code."""

    k: int
    code: int

    def __post_init__(self):
        _check_k(self.k)
        if not 0 <= self.code < (1 << (self.k * self.k)):
            raise InputError(f"code {self.code} does not fit a {self.k}x{self.k} grid")

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[int]]) -> "KGrid":
        k = len(cells)
        code = 0
        for line in cells:
            if len(line) != k:
                raise InputError("window must be square")
            for bit in line:
                if bit not in (0, 1):
                    raise InputError(f"cell value {bit!r} is not 0 or 1")
                code = (code << 1) | bit
        return cls(k, code)

    @classmethod
    def from_string(cls, text: str, k: int) -> "KGrid":
        if len(text) != k * k or set(text) - {"0", "1"}:
            raise InputError(f"{text!r} is not a {k * k}-character 01 string")
        return cls(k, int(text, 2))

    def cells(self) -> list[list[int]]:
        return code_to_cells(self.code, self.k)

    def encoding(self) -> str:
        return format(self.code, f"0{self.k * self.k}b")

    def __str__(self) -> str:
        s = self.encoding()
        return "\n".join(s[i:i + self.k] for i in range(0, len(s), self.k))


def code_to_cells(code: int, k: int) -> list[list[int]]:
    kk = k * k
    return [[(code >> (kk - 1 - (i * k + j))) & 1 for j in range(k)] for i in range(k)]


@dataclass(frozen=True)
class Deck:
    """Multiset of k x k windows keyed by code."""

    k: int
    counts: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        _check_k(self.k)
        limit = 1 << (self.k * self.k)
        clean = {}
        for code, mult in self.counts.items():
            if not 0 <= code < limit:
                raise InputError(f"code {code} does not fit a {self.k}x{self.k} grid")
            if mult < 1:
                raise InputError(f"multiplicity {mult} of code {code} must be >= 1")
            clean[code] = mult
        object.__setattr__(self, "counts", clean)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, grid: KGrid) -> bool:
        return grid.k == self.k and grid.code in self.counts

    def multiplicity(self, grid: KGrid) -> int:
        return self.counts.get(grid.code, 0) if grid.k == self.k else 0

    def grids(self) -> Iterator[tuple[KGrid, int]]:
        for code in sorted(self.counts):
            yield KGrid(self.k, code), self.counts[code]

    def canonical(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.counts.items()))

    @classmethod
    def from_grids(cls, k: int, grids: Iterable[KGrid | int]) -> "Deck":
        codes = (g.code if isinstance(g, KGrid) else g for g in grids)
        return cls(k, dict(Counter(codes)))


def subgrid(p: Picture, r: int, c: int, k: int) -> KGrid:
    _check_k(k)
    last = p.n - k + 1
    if not (1 <= r <= last and 1 <= c <= last):
        raise InputError(f"window ({r}, {c}) with k={k} outside a picture of size {p.n}")
    shift = p.n - c - k + 1
    mask = (1 << k) - 1
    code = 0
    for row in p.rows[r - 1:r - 1 + k]:
        code = (code << k) | ((row >> shift) & mask)
    return KGrid(k, code)


def window_codes(p: Picture, k: int) -> list[int]:
    """All window codes of `p`, row-major over top-left positions."""
    n = p.n
    mask = (1 << k) - 1
    span = n - k + 1
    # slices[r][c] = k-bit slice of row r starting at column c (0-based)
    slices = [[(row >> (n - c - k)) & mask for c in range(span)] for row in p.rows]
    codes = []
    for r in range(span):
        block = slices[r:r + k]
        for c in range(span):
            code = 0
            for line in block:
                code = (code << k) | line[c]
            codes.append(code)
    return codes


def deck(p: Picture, k: int) -> Deck:
    _check_k(k)
    if k > p.n:
        raise InputError(f"window side k={k} exceeds picture size {p.n}")
    return Deck(k, dict(Counter(window_codes(p, k))))


def infer_n(d: Deck) -> int:
    total = d.total
    root = math.isqrt(total)
    if root * root != total or total == 0:
        raise MalformedDeckError(f"deck total {total} is not a positive perfect square")
    return root + d.k - 1


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_picture(n: int, seed: int) -> Picture:
    if n < 1:
        raise InputError(f"picture side must be positive, got {n}")
    bits = rng_for(seed).integers(0, 2, size=(n, n), dtype=np.uint8)
    weights = [1 << (n - 1 - j) for j in range(n)]
    rows = tuple(sum(w for w, b in zip(weights, line) if b) for line in bits.tolist())
    return Picture(n, rows)


def derive_seed(master: int, *key: int) -> int:
    """Hash (master, *key) into an independent 64-bit seed."""
    seq = np.random.SeedSequence(master, spawn_key=tuple(key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


# --- text forms -----------------------------------------------------------

def encode_picture(p: Picture) -> str:
    return str(p) + "\n"


def decode_picture(text: str) -> Picture:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty picture file")
    n = len(lines)
    rows = []
    for i, line in enumerate(lines, start=1):
        line = line.rstrip("\r")
        bad = set(line) - {"0", "1"}
        if bad:
            raise ParseError(f"illegal character {sorted(bad)[0]!r}", i)
        if len(line) != n:
            raise ParseError(f"row has {len(line)} characters, expected {n}", i)
        rows.append(int(line, 2))
    return Picture(n, tuple(rows))


def encode_deck(d: Deck) -> str:
    width = d.k * d.k
    out = [f"DECK k={d.k} total={d.total}"]
    for code, mult in sorted(d.counts.items()):
        out.append(f"{format(code, f'0{width}b')} {mult}")
    return "\n".join(out) + "\n"


def decode_deck(text: str) -> Deck:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty deck file", 1)
    header = lines[0].rstrip("\r").split()
    try:
        if len(header) != 3 or header[0] != "DECK":
            raise ValueError
        k = int(header[1].removeprefix("k=")) if header[1].startswith("k=") else None
        total = int(header[2].removeprefix("total=")) if header[2].startswith("total=") else None
        if k is None or total is None:
            raise ValueError
    except ValueError:
        raise ParseError("header must read 'DECK k=<k> total=<total>'", 1) from None
    if not 1 <= k <= MAX_K:
        raise ParseError(f"k={k} outside 1..{MAX_K}", 1)
    width = k * k
    counts: dict[int, int] = {}
    previous = None
    for i, line in enumerate(lines[1:], start=2):
        parts = line.rstrip("\r").split(" ")
        if len(parts) != 2:
            raise ParseError("expected '<grid> <multiplicity>'", i)
        grid, mult = parts
        bad = set(grid) - {"0", "1"}
        if bad:
            raise ParseError(f"illegal character {sorted(bad)[0]!r}", i)
        if len(grid) != width:
            raise ParseError(f"grid has {len(grid)} characters, k={k} needs {width}", i)
        if not mult.isdigit() or int(mult) < 1:
            raise ParseError(f"multiplicity {mult!r} is not a positive integer", i)
        if previous is not None and grid <= previous:
            raise ParseError("grids must be distinct and sorted ascending", i)
        previous = grid
        counts[int(grid, 2)] = int(mult)
    found = sum(counts.values())
    if found != total:
        raise ParseError(f"header total={total} but multiplicities sum to {found}", 1)
    return Deck(k, counts)
