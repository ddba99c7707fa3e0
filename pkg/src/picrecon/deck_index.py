"""A consumable, randomly ordered deck with overlap indexes.

Every distinct window is filed under four overlap keys: the bits of its
leading/trailing k-1 columns ("left"/"right") and leading/trailing k-1 rows
("top"/"bottom").  Extending a droplet to the right asks for windows whose
"left" block equals the droplet's trailing columns, and so on.

Candidate lists follow the random slot order chosen at build time; a
distinct window is ranked by the slot of its first copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import InputError, StaleCheckpointError
from .grid import Deck, KGrid, rng_for

SIDES = ("left", "right", "top", "bottom")


@dataclass(frozen=True)
class OverlapKey:
    side: str
    bits: int


def side_masks(k: int) -> tuple[int, int]:
    """Masks selecting the first/last k-1 columns of every row of a code."""
    lead = tail = 0
    row_lead = ((1 << (k - 1)) - 1) << 1
    row_tail = (1 << (k - 1)) - 1
    for i in range(k):
        lead |= row_lead << (i * k)
        tail |= row_tail << (i * k)
    return lead, tail


def overlap_masks(k: int) -> dict[str, int]:
    lead, tail = side_masks(k)
    rows = (1 << (k * (k - 1))) - 1
    return {"left": lead, "right": tail, "top": rows << k, "bottom": rows}


def overlap_bits(code: int, k: int, side: str) -> int:
    """The overlap block of `code` on `side`, kept in place within the code.

    Keeping the block at its own bit positions makes it a canonical packing
    that is a single AND away from either a window code or a partially
    known droplet pattern.
    """
    try:
        return code & overlap_masks(k)[side]
    except KeyError:
        raise InputError(f"unknown side {side!r}") from None


def far_line(code: int, k: int, side: str) -> int:
    """The line of `code` opposite its `side` overlap, as k bits.

    Columns read top to bottom and rows left to right, first cell in the
    most significant bit.
    """
    km = (1 << k) - 1
    if side == "top":
        return code & km
    if side == "bottom":
        return code >> (k * (k - 1))
    bit = 0 if side == "left" else k - 1
    out = 0
    for i in range(k - 1, -1, -1):
        out = (out << 1) | ((code >> (i * k + bit)) & 1)
    return out


def overlap_key(side: str, block, k: int) -> OverlapKey:
    """Key for an explicit block: k rows x (k-1) columns, or (k-1) x k."""
    if side in ("left", "right"):
        lines = [list(row) + [0] if side == "left" else [0] + list(row) for row in block]
    elif side == "top":
        lines = [list(row) for row in block] + [[0] * k]
    else:
        lines = [[0] * k] + [list(row) for row in block]
    code = 0
    for row in lines:
        if len(row) != k:
            raise InputError("overlap block has the wrong shape")
        for bit in row:
            code = (code << 1) | bit
    if len(lines) != k:
        raise InputError("overlap block has the wrong shape")
    return OverlapKey(side, code)


class DeckIndex:
    def __init__(self, d: Deck, seed: int):
        if d.total == 0:
            raise InputError("cannot index an empty deck")
        self.k = k = d.k
        slots = [code for code, mult in sorted(d.counts.items()) for _ in range(mult)]
        perm = rng_for(seed).permutation(len(slots))
        self.order: tuple[int, ...] = tuple(slots[i] for i in perm.tolist())

        self.rank: dict[int, int] = {}
        for pos, code in enumerate(self.order):
            self.rank.setdefault(code, pos)
        self.initial = dict(d.counts)
        self.remaining = dict(d.counts)
        self.reserved: dict[int, int] = {}

        self.masks = overlap_masks(k)
        self.buckets: dict[str, dict[int, list[int]]] = {s: {} for s in SIDES}
        for code in self.rank:  # rank order == first-copy slot order
            for side, mask in self.masks.items():
                self.buckets[side].setdefault(code & mask, []).append(code)
        self.far: dict[str, dict[int, int]] = {
            side: {code: far_line(code, k, side) for code in self.rank} for side in SIDES
        }

        self._log: list[int] = []
        self._checkpoints: list[tuple[int, int]] = []
        self._next_token = 0

    # --- queries ------------------------------------------------------------

    def available(self, code: int) -> int:
        return self.remaining.get(code, 0) - self.reserved.get(code, 0)

    def bucket(self, side: str, bits: int) -> list[int]:
        """Raw candidate codes for an overlap, in order, unfiltered."""
        return self.buckets[side].get(bits, [])

    def candidates(self, key: OverlapKey) -> list[tuple[KGrid, int]]:
        out = []
        for code in self.bucket(key.side, key.bits):
            left = self.available(code)
            if left > 0:
                out.append((KGrid(self.k, code), left))
        return out

    def first(self) -> int:
        return self.order[0]

    @property
    def remaining_total(self) -> int:
        return sum(self.remaining.values())

    def remaining_deck(self) -> Deck:
        return Deck(self.k, {c: m for c, m in self.remaining.items() if m > 0})

    def removed(self) -> Iterator[int]:
        return iter(self._log)

    # --- mutation -------------------------------------------------------------

    def remove(self, g: KGrid | int) -> bool:
        """Consume one copy; False when none remain."""
        code = g.code if isinstance(g, KGrid) else g
        if self.remaining.get(code, 0) <= 0:
            return False
        self.remaining[code] -= 1
        self._log.append(code)
        return True

    def reserve(self, code: int) -> bool:
        if self.available(code) <= 0:
            return False
        self.reserved[code] = self.reserved.get(code, 0) + 1
        return True

    def release(self, code: int) -> None:
        left = self.reserved[code] - 1
        if left:
            self.reserved[code] = left
        else:
            del self.reserved[code]

    def checkpoint(self) -> int:
        token = self._next_token
        self._next_token += 1
        self._checkpoints.append((token, len(self._log)))
        return token

    def _find(self, token: int) -> int:
        for i in range(len(self._checkpoints) - 1, -1, -1):
            if self._checkpoints[i][0] == token:
                return i
        raise StaleCheckpointError(f"checkpoint {token} is not active")

    def rollback(self, token: int) -> None:
        """Undo every removal since `token`; newer checkpoints are discarded."""
        i = self._find(token)
        mark = self._checkpoints[i][1]
        del self._checkpoints[i:]
        log = self._log
        while len(log) > mark:
            code = log.pop()
            self.remaining[code] += 1

    def commit(self, token: int) -> None:
        """Forget `token` (and newer checkpoints) keeping the removals."""
        del self._checkpoints[self._find(token):]


def build_index(d: Deck, seed: int) -> DeckIndex:
    return DeckIndex(d, seed)
