"""Droplet-growth reconstruction of a picture from its k-deck.

The droplet lives on an unbounded canvas addressed by absolute (row, col)
integers; the first deck element is placed with its top-left cell at (0, 0).
Canvas rows are Python ints holding cell values and a parallel int holding
the "known" mask, with column c stored at bit ``P - c`` so that slicing k
consecutive columns yields a window row most-significant-bit first.

Every placement goes through one primitive: a depth-first search for an
assembly of deck elements at a planned list of window positions, each
required to agree with every cell already known (droplet cells and cells
fixed by earlier windows of the same assembly).  Naive, internal and corner
extensions are plans of 1, k and k*k windows.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .deck_index import DeckIndex, build_index
from .errors import InputError, UnsupportedError
from .grid import Deck, KGrid, Picture, infer_n

# direction -> overlap side of the incoming window
KEY_SIDE = {"right": "left", "left": "right", "down": "top", "up": "bottom"}
HORIZONTAL = ("right", "left")

if sys.getrecursionlimit() < 2000:
    sys.setrecursionlimit(2000)


@dataclass(frozen=True)
class Placement:
    """One committed window, reported to observers."""

    kind: str  # initial | naive | internal | corner | boundary_naive | boundary_internal
    direction: str | None
    row: int
    col: int
    code: int
    corner: str | None = None
    # the lookahead assembly that justified the placement, as (row, col, code)
    block: tuple[tuple[int, int, int], ...] = ()
    # droplet rectangle (top, bottom, left, right) before the placement's line
    rect: tuple[int, int, int, int] = (0, 0, 0, 0)


@dataclass
class Stats:
    placements: Counter = field(default_factory=Counter)
    leftovers: int = 0
    boundary_steps: int = 0
    rollbacks: int = 0
    searches: int = 0

    def as_dict(self) -> dict:
        out = {f"placed_{k}": v for k, v in sorted(self.placements.items())}
        out.update(leftovers=self.leftovers, boundary_steps=self.boundary_steps,
                   rollbacks=self.rollbacks, searches=self.searches)
        return out


@dataclass
class ReconstructionResult:
    outcome: str  # "success" | "abort"
    picture: Picture | None = None
    stage: str | None = None  # initial | column | row | leftover
    reason: str = ""
    stats: Stats = field(default_factory=Stats)
    remaining: int = 0

    @property
    def success(self) -> bool:
        return self.outcome == "success"


class Aborted(Exception):
    def __init__(self, stage: str, reason: str):
        super().__init__(f"{stage}: {reason}")
        self.stage = stage
        self.reason = reason


class Droplet:
    """The partially reconstructed region.

    ``top..bottom`` x ``left..right`` (inclusive) is the completed rectangle.
    Cells outside it may be known while a line is being added.
    """

    def __init__(self, k: int, span: int):
        self.k = k
        self.P = span  # columns must stay <= P
        self.vals: dict[int, int] = {}
        self.known: dict[int, int] = {}
        self.kmask = (1 << k) - 1
        self.top = self.left = 0
        self.bottom = self.right = -1

    @classmethod
    def from_picture(cls, p: Picture, k: int, top: int, left: int,
                     height: int, width: int) -> "Droplet":
        """Droplet holding a rectangle of `p`; canvas coords are picture coords."""
        if not (1 <= top and top + height - 1 <= p.n and 1 <= left and left + width - 1 <= p.n):
            raise InputError("droplet rectangle outside the picture")
        d = cls(k, 2 * p.n + 4 * k)
        cells = p.cells()
        for r in range(top, top + height):
            for c in range(left, left + width):
                d.set_cell(r, c, cells[r - 1][c - 1])
        d.top, d.bottom, d.left, d.right = top, top + height - 1, left, left + width - 1
        return d

    # extents
    @property
    def height(self) -> int:
        return self.bottom - self.top + 1

    @property
    def width(self) -> int:
        return self.right - self.left + 1

    @property
    def rect(self) -> tuple[int, int, int, int]:
        return (self.top, self.bottom, self.left, self.right)

    # cells
    def set_cell(self, r: int, c: int, bit: int) -> None:
        pos = 1 << (self.P - c)
        self.known[r] = self.known.get(r, 0) | pos
        v = self.vals.get(r, 0) & ~pos
        self.vals[r] = v | pos if bit else v

    def cell(self, r: int, c: int) -> int | None:
        pos = self.P - c
        if not (self.known.get(r, 0) >> pos) & 1:
            return None
        return (self.vals.get(r, 0) >> pos) & 1

    def pattern(self, r: int, c: int) -> tuple[int, int]:
        """(values, known-mask) of the k x k window with top-left (r, c)."""
        k, km = self.k, self.kmask
        shift = self.P - c - k + 1
        vals, known = self.vals, self.known
        val = mask = 0
        for i in range(r, r + k):
            val = (val << k) | ((vals.get(i, 0) >> shift) & km)
            mask = (mask << k) | ((known.get(i, 0) >> shift) & km)
        return val, mask

    def write(self, r: int, c: int, code: int) -> list[tuple[int, int, int]]:
        """Write a window consistent with known cells; return an undo record."""
        k, km = self.k, self.kmask
        shift = self.P - c - k + 1
        vals, known = self.vals, self.known
        undo = []
        for i in range(k):
            row = r + i
            line = (code >> (k * (k - 1 - i))) & km
            old_v, old_k = vals.get(row, 0), known.get(row, 0)
            undo.append((row, old_v, old_k))
            vals[row] = old_v | (line << shift)
            known[row] = old_k | (km << shift)
        return undo

    def undo(self, record: list[tuple[int, int, int]]) -> None:
        vals, known = self.vals, self.known
        for row, v, kn in reversed(record):
            vals[row] = v
            known[row] = kn

    def snapshot_rows(self, rows) -> dict[int, tuple[int, int]]:
        return {r: (self.vals.get(r, 0), self.known.get(r, 0)) for r in rows}

    def restore_rows(self, snap: dict[int, tuple[int, int]]) -> None:
        for r, (v, kn) in snap.items():
            self.vals[r] = v
            self.known[r] = kn

    def rectangle_cells(self) -> list[list[int]]:
        out = []
        for r in range(self.top, self.bottom + 1):
            v = self.vals.get(r, 0)
            out.append([(v >> (self.P - c)) & 1 for c in range(self.left, self.right + 1)])
        return out

    def to_picture(self) -> Picture:
        return Picture.from_cells(self.rectangle_cells())

    # geometry of lines
    def lateral(self, direction: str) -> tuple[int, int]:
        if direction in HORIZONTAL:
            return self.top, self.bottom
        return self.left, self.right

    def window_at(self, direction: str, p: int, offset: int) -> tuple[int, int]:
        """Top-left of the window at lateral start `p` holding `offset`+1 new lines."""
        k = self.k
        if direction == "right":
            return p, self.right - k + 2 + offset
        if direction == "left":
            return p, self.left - 1 - offset
        if direction == "down":
            return self.bottom - k + 2 + offset, p
        if direction == "up":
            return self.top - 1 - offset, p
        raise InputError(f"unknown direction {direction!r}")

    def line_rows(self, direction: str) -> range:
        """Canvas rows touched when adding one line in `direction`."""
        if direction in HORIZONTAL:
            return range(self.top, self.bottom + 1)
        return range(self.bottom + 1, self.bottom + 2) if direction == "down" \
            else range(self.top - 1, self.top)

    def grow(self, direction: str) -> None:
        if direction == "right":
            self.right += 1
        elif direction == "left":
            self.left -= 1
        elif direction == "down":
            self.bottom += 1
        else:
            self.top -= 1


def fits(direction: str, band: Sequence[Sequence[int]], t: KGrid) -> bool:
    """Whether `t` extends `band` one line in `direction`.

    `band` is the k rows (for left/right) or k columns (for up/down) at the
    droplet edge, given as a row-major list of cell rows.
    """
    k = t.k
    cells = t.cells()
    rows = [list(r) for r in band]
    if direction in HORIZONTAL:
        if len(rows) != k or any(len(r) < k - 1 for r in rows):
            raise InputError("band must have k rows and at least k-1 columns")
        if direction == "right":
            return all(rows[i][len(rows[i]) - (k - 1):] == cells[i][:k - 1] for i in range(k)) \
                if k > 1 else True
        return all(rows[i][:k - 1] == cells[i][1:] for i in range(k))
    if direction in ("up", "down"):
        if any(len(r) != k for r in rows) or len(rows) < k - 1:
            raise InputError("band must have k columns and at least k-1 rows")
        if k == 1:
            return True
        if direction == "down":
            return rows[len(rows) - (k - 1):] == cells[:k - 1]
        return rows[:k - 1] == cells[1:]
    raise InputError(f"unknown direction {direction!r}")


def extend(direction: str, band: Sequence[Sequence[int]], t: KGrid) -> list[list[int]]:
    """The band with `t`'s outer line appended (assumes `fits`)."""
    cells = t.cells()
    rows = [list(r) for r in band]
    if direction == "right":
        return [rows[i] + [cells[i][-1]] for i in range(t.k)]
    if direction == "left":
        return [[cells[i][0]] + rows[i] for i in range(t.k)]
    if direction == "down":
        return rows + [cells[-1]]
    return [cells[0]] + rows


class Reconstructor:
    """Runs the growth phases over one droplet and one deck index.

    `n` caps the droplet: a line that would push an extent past n can only
    lead to an abort, so it aborts at once.
    """

    def __init__(self, ix: DeckIndex, n: int, droplet: Droplet | None = None,
                 observer: Callable[[Placement], None] | None = None):
        self.ix = ix
        self.k = ix.k
        self.n = n
        self.droplet = droplet if droplet is not None else Droplet(ix.k, n + 4 * ix.k)
        self.observer = observer
        self.stats = Stats()
        # windows committed while adding the current line; a lookahead that
        # reaches one of them treats it as droplet, not as a deck element
        self.line_placed: dict[tuple[int, int], int] = {}

    # --- primitive ----------------------------------------------------------

    def assemble(self, plan: Sequence[tuple[int, int]], side: str) -> tuple[int, ...] | None:
        """First assembly (DFS over plan order, candidates in deck order).

        Every window's `side` block must be fully known when it is visited.
        Reservations and canvas writes are undone before returning.
        """
        drop, ix = self.droplet, self.ix
        placed = self.line_placed
        if placed and any(pos in placed for pos in plan):
            fixed = [placed.get(pos) for pos in plan]
            free = [pos for pos in plan if pos not in placed]
            got = self.assemble(free, side) if free else ()
            if got is None:
                return None
            it = iter(got)
            return tuple(code if code is not None else next(it) for code in fixed)
        side_mask = ix.masks[side]
        bucket = ix.buckets[side]
        remaining, reserved = ix.remaining, ix.reserved
        chosen: list[int] = []
        found: list[tuple[int, ...]] = []
        last = len(plan)
        self.stats.searches += 1

        def dfs(j: int) -> bool:
            r, c = plan[j]
            val, mask = drop.pattern(r, c)
            for code in bucket.get(val & side_mask, ()):
                if (code & mask) != val:
                    continue
                used = reserved.get(code, 0)
                if remaining.get(code, 0) <= used:
                    continue
                if j + 1 == last:
                    chosen.append(code)
                    found.append(tuple(chosen))
                    chosen.pop()
                    return True
                reserved[code] = used + 1
                record = drop.write(r, c, code)
                chosen.append(code)
                ok = dfs(j + 1)
                chosen.pop()
                drop.undo(record)
                if used:
                    reserved[code] = used
                else:
                    del reserved[code]
                if ok:
                    return True
            return False

        if not plan or not dfs(0):
            return None
        return found[0]

    def line_assemblies(self, direction: str, starts: Sequence[int], offset: int = 0):
        """Yield every assembly of windows adding new line `offset`, in DFS order.

        Window j has lateral start ``starts[j]`` and reaches `offset`+1 lines
        past the droplet edge, so it is its overlap block (droplet plus lines
        already written) followed by k cells of the new line.  The search only
        tracks that line in local integers.  Yields (codes, line values) with
        the line packed first-lateral-cell most significant; reservations are
        held while the consumer runs and released when the generator ends.
        """
        drop, ix, k = self.droplet, self.ix, self.k
        side = KEY_SIDE[direction]
        smask = ix.masks[side]
        bucket, far = ix.buckets[side], ix.far[side]
        remaining, reserved = ix.remaining, ix.reserved
        placed = self.line_placed
        km = drop.kmask
        count = len(starts)
        lo = min(starts)
        hi = max(starts) + k - 1
        span = hi - lo + 1
        if placed:
            fixed = [placed.get(drop.window_at(direction, q, offset)) for q in starts]
        else:
            fixed = [None] * count
        shifts = [hi - q - k + 1 for q in starts]
        r0, c0 = drop.window_at(direction, lo, offset)

        vals, known, P = drop.vals, drop.known, drop.P
        by_start = [0] * (span - k + 1)  # key of the window starting at lo + index
        if direction in HORIZONTAL:
            col = c0 + (k - 1 if direction == "right" else 0)
            sh = P - col
            wsh = P - c0 - k + 1
            full = (1 << (k * k)) - 1
            lval = lknown = cur = 0
            for t, r in enumerate(range(lo, hi + 1)):
                v = vals.get(r, 0)
                lval = (lval << 1) | ((v >> sh) & 1)
                lknown = (lknown << 1) | ((known.get(r, 0) >> sh) & 1)
                cur = ((cur << k) | ((v >> wsh) & km)) & full
                if t >= k - 1:
                    by_start[t - k + 1] = cur & smask
        else:
            row = r0 + (k - 1 if direction == "down" else 0)
            sh = P - hi
            lmask = (1 << span) - 1
            lval = (vals.get(row, 0) >> sh) & lmask
            lknown = (known.get(row, 0) >> sh) & lmask
            rows = range(r0, r0 + k - 1) if direction == "down" else range(r0 + 1, r0 + k)
            wide = [(vals.get(r, 0) >> sh) & lmask for r in rows]
            lift = k if direction == "down" else 0
            for q in starts:
                wsh = hi - q - k + 1
                key = 0
                for w in wide:
                    key = (key << k) | ((w >> wsh) & km)
                by_start[q - lo] = key << lift
        cands = [bucket.get(by_start[q - lo], ()) for q in starts]
        self.stats.searches += 1

        chosen = [0] * count
        idx = [0] * count
        lvs = [lval] * (count + 1)
        lks = [lknown] * (count + 1)
        held: list[int] = []
        j = 0
        back = False
        try:
            while j >= 0:
                if j == count:
                    yield tuple(chosen), lvs[count]
                    j -= 1
                    back = True
                    continue
                code = fixed[j]
                if code is not None:
                    if not back and idx[j] == 0:
                        idx[j] = 1
                        shift = shifts[j]
                        kn = (lks[j] >> shift) & km
                        if (far[code] & kn) == (lvs[j] >> shift) & km:
                            chosen[j] = code
                            lvs[j + 1] = lvs[j] | (far[code] << shift)
                            lks[j + 1] = lks[j] | (km << shift)
                            j += 1
                            if j < count:
                                idx[j] = 0
                            continue
                    idx[j] = 0
                    j -= 1
                    back = True
                    continue
                if back:
                    c = held.pop()
                    left = reserved[c] - 1
                    if left:
                        reserved[c] = left
                    else:
                        del reserved[c]
                    back = False
                shift = shifts[j]
                kn = (lks[j] >> shift) & km
                lv = (lvs[j] >> shift) & km
                lst = cands[j]
                i = idx[j]
                end = len(lst)
                while i < end:
                    code = lst[i]
                    i += 1
                    o = far[code]
                    if (o & kn) != lv:
                        continue
                    used = reserved.get(code, 0)
                    if remaining.get(code, 0) <= used:
                        continue
                    reserved[code] = used + 1
                    held.append(code)
                    chosen[j] = code
                    lvs[j + 1] = lvs[j] | (o << shift)
                    lks[j + 1] = lks[j] | (km << shift)
                    break
                else:
                    idx[j] = 0
                    j -= 1
                    back = True
                    continue
                idx[j] = i
                j += 1
                if j < count:
                    idx[j] = 0
        finally:
            for c in held:
                left = reserved[c] - 1
                if left:
                    reserved[c] = left
                else:
                    del reserved[c]

    def assemble_line(self, direction: str, p: int, count: int,
                      offset: int = 0) -> tuple[int, ...] | None:
        """First assembly of `count` windows at lateral starts p, p+1, ..."""
        if count < 1:
            return None
        gen = self.line_assemblies(direction, range(p, p + count), offset)
        try:
            for codes, _ in gen:
                return codes
        finally:
            gen.close()
        return None

    def _write_line(self, direction: str, lo: int, span: int, offset: int, lval: int):
        """Write new line `offset` over lateral lo..lo+span-1; returns undo rows."""
        drop = self.droplet
        vals, known, P = drop.vals, drop.known, drop.P
        if direction in HORIZONTAL:
            col = drop.right + 1 + offset if direction == "right" else drop.left - 1 - offset
            pos = 1 << (P - col)
            record = []
            for t in range(span):
                r = lo + t
                v, kn = vals.get(r, 0), known.get(r, 0)
                record.append((r, v, kn))
                vals[r] = v | pos if (lval >> (span - 1 - t)) & 1 else v
                known[r] = kn | pos
            return record
        row = drop.bottom + 1 + offset if direction == "down" else drop.top - 1 - offset
        sh = P - (lo + span - 1)
        v, kn = vals.get(row, 0), known.get(row, 0)
        vals[row] = v | (lval << sh)
        known[row] = kn | (((1 << span) - 1) << sh)
        return [(row, v, kn)]

    def corner_assembly(self, direction: str, starts: Sequence[int],
                        offset: int = 0) -> tuple[int, ...] | None:
        """First (2k-1, 2k-1) assembly, lines outward and windows in `starts` order."""
        k = self.k
        lo = min(starts)
        span = max(starts) + k - lo
        gen = self.line_assemblies(direction, starts, offset)
        try:
            for codes, lval in gen:
                if offset == k - 1:
                    return codes
                record = self._write_line(direction, lo, span, offset, lval)
                rest = self.corner_assembly(direction, starts, offset + 1)
                self.droplet.undo(record)
                if rest is not None:
                    return codes + rest
        finally:
            gen.close()
        return None

    def _commit(self, kind: str, direction: str | None, r: int, c: int, code: int,
                corner: str | None = None, plan=(), assembly=()) -> None:
        if not self.ix.remove(code):  # pragma: no cover - assemble checked availability
            raise AssertionError("placed a window with no copies left")
        rect = self.droplet.rect
        self.droplet.write(r, c, code)
        self.line_placed[(r, c)] = code
        self.stats.placements[kind] += 1
        if self.observer is not None:
            block = tuple((pr, pc, a) for (pr, pc), a in zip(plan, assembly))
            self.observer(Placement(kind, direction, r, c, code, corner, block, rect))

    # --- extensions -----------------------------------------------------------

    def naive_extend(self, direction: str, corner: str = "first",
                     kind: str = "naive") -> int | None:
        """Place the first element that extends the droplet edge at `corner`."""
        drop = self.droplet
        lo, hi = drop.lateral(direction)
        p = lo if corner == "first" else hi - self.k + 1
        plan = [drop.window_at(direction, p, 0)]
        got = self.assemble_line(direction, p, 1)
        if got is None:
            return None
        self._commit(kind, direction, *plan[0], got[0], corner, plan, got)
        return got[0]

    def internal_extend(self, direction: str, i: int, kind: str = "internal") -> int | None:
        """(2k-1, k) lookahead at lateral window position i (1-based)."""
        drop, k = self.droplet, self.k
        lo, hi = drop.lateral(direction)
        if i < 1 or lo + i - 1 + 2 * k - 2 > hi:
            raise InputError(f"internal extension at {i} does not fit the droplet")
        p = lo + i - 1
        got = self.assemble_line(direction, p, k)
        if got is None:
            return None
        plan = [drop.window_at(direction, p + j, 0) for j in range(k)] \
            if self.observer is not None else [drop.window_at(direction, p, 0)]
        self._commit(kind, direction, *plan[0], got[0], None, plan, got)
        return got[0]

    def corner_extend(self, direction: str, corner: str) -> int | None:
        """(2k-1, 2k-1) lookahead at the first or last lateral corner."""
        drop, k = self.droplet, self.k
        lo, hi = drop.lateral(direction)
        if hi - lo + 1 < 2 * k - 1:
            raise InputError("droplet too narrow for a corner block")
        if corner == "first":
            starts = [lo + j for j in range(k)]
        else:
            starts = [hi - k + 1 - j for j in range(k)]
        plan = [drop.window_at(direction, q, c) for c in range(k) for q in starts]
        got = self.corner_assembly(direction, starts)
        if got is None:
            return None
        self._commit("corner", direction, *plan[0], got[0], corner, plan, got)
        return got[0]

    def _leftovers(self, direction: str) -> bool:
        """Delete the already determined windows between internal and corner."""
        drop, k = self.droplet, self.k
        lo, hi = drop.lateral(direction)
        length = hi - lo + 1
        last = length - k + 1
        for q in range(length - 2 * k + 3, last):
            r, c = drop.window_at(direction, lo + q - 1, 0)
            val, _ = drop.pattern(r, c)
            if not self.ix.remove(val):
                return False
            self.stats.leftovers += 1
        return True

    def _internal_range(self, direction: str) -> range:
        lo, hi = self.droplet.lateral(direction)
        length = hi - lo + 1
        return range(2, min(length - 2 * self.k + 2, length - self.k) + 1)

    def _line(self, direction: str, boundary: bool) -> str | None:
        """Add one full line; returns None on success or the failing part.

        Removals and canvas writes of a failed line are NOT undone here.
        """
        if boundary:
            if self.naive_extend(direction, "first", "boundary_naive") is None:
                return "corner"
            if self.naive_extend(direction, "last", "boundary_naive") is None:
                return "corner"
        else:
            if self.corner_extend(direction, "first") is None:
                return "corner"
            if self.corner_extend(direction, "last") is None:
                return "corner"
        kind = "boundary_internal" if boundary else "internal"
        for i in self._internal_range(direction):
            if self.internal_extend(direction, i, kind) is None:
                return "internal"
        if not self._leftovers(direction):
            return "leftover"
        return None

    def single_line_extend(self, direction: str, boundary: bool = False) -> str | None:
        """One column (right/left) or row (up/down); rolled back on failure.

        Returns None on success, else the failure kind: corner, internal or
        leftover.
        """
        drop, ix = self.droplet, self.ix
        token = ix.checkpoint()
        snap = drop.snapshot_rows(drop.line_rows(direction))
        self.line_placed = {}
        failed = self._line(direction, boundary)
        self.line_placed = {}
        if failed is None:
            ix.commit(token)
            drop.grow(direction)
            return None
        ix.rollback(token)
        drop.restore_rows(snap)
        self.stats.rollbacks += 1
        return failed

    def single_column_extend(self, direction: str) -> str | None:
        if direction not in HORIZONTAL:
            raise InputError("columns extend right or left")
        if self.droplet.height != 3 * self.k:
            raise InputError("column extension needs a droplet of height 3k")
        return self.single_line_extend(direction)

    def single_row_extend(self, direction: str) -> str | None:
        if direction in HORIZONTAL:
            raise InputError("rows extend up or down")
        if self.droplet.width != self.n:
            raise InputError("row extension needs a droplet of full width")
        return self.single_line_extend(direction)

    def boundary_lines(self, direction: str) -> int:
        """Boundary steps until one fails, at most k-1; returns lines added."""
        added = 0
        for _ in range(self.k - 1):
            self.stats.boundary_steps += 1
            if self.single_line_extend(direction, boundary=True) is not None:
                break
            added += 1
            self._check_extent(direction)
        return added

    boundary_columns = boundary_lines

    def _check_extent(self, direction: str) -> None:
        drop = self.droplet
        if direction in HORIZONTAL and drop.width > self.n:
            raise Aborted("column", f"droplet wider than n={self.n}")
        if direction not in HORIZONTAL and drop.height > self.n:
            raise Aborted("row", f"droplet taller than n={self.n}")

    def sweep(self, direction: str) -> None:
        """Lookahead lines until one fails, then the boundary handling."""
        while True:
            failed = self.single_line_extend(direction)
            if failed is None:
                self._check_extent(direction)
                continue
            if failed == "leftover":
                raise Aborted("leftover", f"leftover window missing while extending {direction}")
            if failed == "corner":
                self.boundary_lines(direction)
            return

    # --- phases -----------------------------------------------------------------

    def seed_droplet(self) -> None:
        """Step 1: the first element of the random order."""
        code = self.ix.first()
        self.ix.remove(code)
        drop = self.droplet
        drop.write(0, 0, code)
        drop.top = drop.left = 0
        drop.bottom = drop.right = self.k - 1
        self.stats.placements["initial"] += 1
        if self.observer is not None:
            self.observer(Placement("initial", None, 0, 0, code, rect=drop.rect))

    def grow_initial(self) -> None:
        """Step 2: naive growth to 3k rows, downward first."""
        target = 3 * self.k
        for direction in ("down", "up"):
            while self.droplet.height < target:
                if self.naive_extend(direction) is None:
                    break
                self.droplet.grow(direction)
        if self.droplet.height < target:
            raise Aborted("initial", f"naive growth stalled at {self.droplet.height} rows")

    def run(self) -> ReconstructionResult:
        try:
            self.seed_droplet()
            self.grow_initial()
            self.sweep("right")
            self.sweep("left")
            if self.droplet.width != self.n:
                raise Aborted("column", f"width {self.droplet.width} != n={self.n}")
            self.sweep("up")
            self.sweep("down")
            if self.droplet.height != self.n:
                raise Aborted("row", f"height {self.droplet.height} != n={self.n}")
        except Aborted as exc:
            return ReconstructionResult("abort", None, exc.stage, exc.reason, self.stats,
                                        self.ix.remaining_total)
        return ReconstructionResult("success", self.droplet.to_picture(), None, "",
                                    self.stats, self.ix.remaining_total)


def reconstruct(d: Deck, seed: int,
                observer: Callable[[Placement], None] | None = None) -> ReconstructionResult:
    n = infer_n(d)
    k = d.k
    if n == k:
        (code,) = d.counts
        stats = Stats()
        stats.placements["initial"] = 1
        return ReconstructionResult("success", Picture.from_cells(KGrid(k, code).cells()),
                                    stats=stats, remaining=0)
    if n < 3 * k:
        raise UnsupportedError(f"reconstruction needs n >= 3k (n={n}, k={k})")
    ix = build_index(d, seed)
    return Reconstructor(ix, n, observer=observer).run()
