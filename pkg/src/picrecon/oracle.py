"""Ground truth: exhaustive reconstructibility for tiny pictures and the
instrumented single-trial harness."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from .diagnostics import CornerReport, analyse_corner
from .errors import InputError, ResourceError
from .grid import Deck, Picture, deck, derive_seed, random_picture, window_codes
from .reconstruct import Placement, reconstruct

MAX_EXHAUSTIVE_N = 4


def deck_equal(a: Deck, b: Deck) -> bool:
    if a.k != b.k:
        raise InputError(f"decks have different window sides ({a.k} vs {b.k})")
    return a.counts == b.counts


def _check_size(n: int, k: int, allow_n5: bool) -> None:
    if not 1 <= k <= n:
        raise InputError(f"window side k={k} outside 1..{n}")
    limit = 5 if allow_n5 else MAX_EXHAUSTIVE_N
    if n > limit:
        hint = "" if allow_n5 or n > 5 else " (n=5 needs an explicit opt-in)"
        raise ResourceError(f"exhaustive search over 2^{n * n} pictures refused{hint}")


def picture_from_index(n: int, index: int) -> Picture:
    """Picture whose row-major cell string is the n*n-bit binary of `index`."""
    mask = (1 << n) - 1
    return Picture(n, tuple((index >> (n * (n - 1 - r))) & mask for r in range(n)))


def picture_index(p: Picture) -> int:
    out = 0
    for row in p.rows:
        out = (out << p.n) | row
    return out


def canonical_key(d: Deck) -> bytes:
    """Canonical encoding of a deck: sorted (code, multiplicity) pairs."""
    width = (d.k * d.k + 7) // 8
    return b"".join(code.to_bytes(width, "big") + mult.to_bytes(4, "big")
                    for code, mult in d.canonical())


def deck_hash(d: Deck) -> bytes:
    return hashlib.blake2b(canonical_key(d), digest_size=16).digest()


@dataclass(frozen=True)
class Verdict:
    reconstructible: bool
    witness: Picture | None = None

    def __str__(self) -> str:
        return "yes" if self.reconstructible else "no"


def is_reconstructible_exhaustive(p: Picture, k: int, allow_n5: bool = False) -> Verdict:
    n = p.n
    _check_size(n, k, allow_n5)
    target = deck(p, k)
    me = picture_index(p)
    for index in range(1 << (n * n)):
        if index == me:
            continue
        q = picture_from_index(n, index)
        if deck_equal(deck(q, k), target):
            return Verdict(False, q)
    return Verdict(True)


@dataclass(frozen=True)
class Classification:
    n: int
    k: int
    total: int
    reconstructible: int
    # the least-index pair of distinct pictures sharing a deck, if any
    example: tuple[Picture, Picture] | None = None
    singletons: frozenset = field(default_factory=frozenset, repr=False)


def _bucket_range(n: int, k: int, lo: int, hi: int) -> dict:
    """hash -> list of [canonical key, count, first index, second index]."""
    buckets: dict[bytes, list[list]] = {}
    for index in range(lo, hi):
        d = deck(picture_from_index(n, index), k)
        key = canonical_key(d)
        h = hashlib.blake2b(key, digest_size=16).digest()
        entries = buckets.setdefault(h, [])
        for e in entries:
            if e[0] == key:  # full comparison guards against hash collisions
                e[1] += 1
                if e[3] is None:
                    e[3] = index
                break
        else:
            entries.append([key, 1, index, None])
    return buckets


def _merge(into: dict, part: dict) -> None:
    for h, entries in part.items():
        mine = into.setdefault(h, [])
        for e in entries:
            for m in mine:
                if m[0] == e[0]:
                    ordered = sorted(i for i in (m[2], m[3], e[2], e[3]) if i is not None)
                    m[1] += e[1]
                    m[2] = ordered[0]
                    m[3] = ordered[1] if len(ordered) > 1 else None
                    break
            else:
                mine.append(list(e))


def classify_all(n: int, k: int, allow_n5: bool = False, workers: int = 1) -> Classification:
    _check_size(n, k, allow_n5)
    total = 1 << (n * n)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        step = -(-total // workers)
        ranges = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
        buckets: dict = {}
        with ProcessPoolExecutor(workers) as pool:
            for part in pool.map(_bucket_range, [n] * len(ranges), [k] * len(ranges),
                                 [a for a, _ in ranges], [b for _, b in ranges]):
                _merge(buckets, part)
    else:
        buckets = _bucket_range(n, k, 0, total)
    singles = set()
    example = None
    for entries in buckets.values():
        for _, count, first, second in entries:
            if count == 1:
                singles.add(first)
            elif example is None or first < example[0]:
                example = (first, second)
    pair = None
    if example is not None:
        pair = (picture_from_index(n, example[0]), picture_from_index(n, example[1]))
    return Classification(n, k, total, len(singles), pair, frozenset(singles))


# --- trials -------------------------------------------------------------------

@dataclass
class FirstMistake:
    placement: Placement
    alignment: tuple[int, int]
    corner: CornerReport | None = None


class MistakeTracer:
    """Follows placements against the source picture.

    The droplet is correct while some alignment of the canvas with the
    source makes every placed window equal to the source window under it.
    The first placement that leaves no such alignment is the first mistake.
    """

    def __init__(self, truth: Picture, k: int, analyse_corners: bool = True):
        self.truth = truth
        self.k = k
        self.span = truth.n - k + 1
        self.codes = window_codes(truth, k)
        self.alignments: list[tuple[int, int]] = []
        self.first: FirstMistake | None = None
        self.placements = 0
        self.analyse_corners = analyse_corners

    def _code_at(self, R: int, C: int) -> int | None:
        if 1 <= R <= self.span and 1 <= C <= self.span:
            return self.codes[(R - 1) * self.span + C - 1]
        return None

    def __call__(self, pl: Placement) -> None:
        self.placements += 1
        if self.first is not None:
            return
        if pl.kind == "initial":
            span = self.span
            self.alignments = [(i // span + 1 - pl.row, i % span + 1 - pl.col)
                               for i, code in enumerate(self.codes) if code == pl.code]
            return
        keep = [a for a in self.alignments
                if self._code_at(a[0] + pl.row, a[1] + pl.col) == pl.code]
        if keep:
            self.alignments = keep
            return
        alignment = min(self.alignments)
        report = None
        if pl.kind == "corner" and self.analyse_corners:
            report = analyse_corner(self.truth, alignment, self.k, pl.direction, pl.corner,
                                    pl.rect, pl.block)
        self.first = FirstMistake(pl, alignment, report)

    @property
    def mistake_free(self) -> bool:
        return self.first is None


@dataclass
class TrialOutcome:
    n: int
    k: int
    seed: int
    result: str  # success | wrong_output | abort
    stage: str | None = None
    wall_ms: float = 0.0
    stats: dict = field(default_factory=dict)
    remaining: int = 0
    first_mistake: FirstMistake | None = None
    placements: int = 0

    @property
    def success(self) -> bool:
        return self.result == "success"

    @property
    def label(self) -> str:
        return f"abort_{self.stage}" if self.result == "abort" else self.result


def run_trial(n: int, k: int, seed: int, instrument: bool = False) -> TrialOutcome:
    """Draw the picture from `seed`, reconstruct from its deck, compare.

    The reconstruction order uses a seed derived from `seed`, so the picture
    and the order are independent streams.
    """
    truth = random_picture(n, seed)
    d = deck(truth, k)
    tracer = MistakeTracer(truth, k) if instrument else None
    start = time.perf_counter()
    res = reconstruct(d, derive_seed(seed, 1), observer=tracer)
    wall = (time.perf_counter() - start) * 1000.0
    if res.success:
        result = "success" if res.picture == truth else "wrong_output"
        if result == "success" and not deck_equal(deck(res.picture, k), d):  # pragma: no cover
            raise AssertionError("successful output has a different deck")
    else:
        result = "abort"
    return TrialOutcome(n, k, seed, result, res.stage, wall, res.stats.as_dict(),
                        res.remaining, tracer.first if tracer else None,
                        tracer.placements if tracer else 0)
