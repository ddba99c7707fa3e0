"""Threshold and bound calculators, and the Monte Carlo experiment sweep."""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath

from .errors import InputError
from .grid import derive_seed
from .oracle import run_trial

STAGES = ("initial", "column", "row", "leftover")
CSV_HEADER = ("n,k,trials,successes,wrong,abort_initial,abort_column,abort_row,"
              "abort_leftover,seed,kc,ratio0,ratio1,mean_ms")
MAX_BOUND_K2 = 63


def kc(n: int) -> int:
    """The integer m with sqrt(2 log2 n) in [m - 3/4, m + 1/4).

    Squaring and scaling by 16 turns the condition into
    (4m - 3)^2 <= 32 log2 n < (4m + 1)^2, i.e. 2^((4m-3)^2) <= n^32 < 2^((4m+1)^2),
    which integers decide exactly.
    """
    if not isinstance(n, int) or n < 2:
        raise InputError(f"kc needs an integer n >= 2, got {n!r}")
    p = n ** 32
    m = 1
    while p >= 1 << ((4 * m + 1) ** 2):
        m += 1
    return m


def kc_float(n: int, dps: int = 40) -> int:
    """kc by direct high-precision evaluation; used to cross-check `kc`."""
    if n < 2:
        raise InputError(f"kc needs n >= 2, got {n}")
    with mpmath.workdps(dps):
        x = mpmath.sqrt(2 * mpmath.log(n, 2))
        return int(mpmath.floor(x + mpmath.mpf(3) / 4))


@dataclass(frozen=True)
class ZeroBound:
    binomial_log2: float
    simplified_log2: float


def zero_statement_log2_bound(n: int, k: int) -> ZeroBound:
    """log2 of C((n-k+1)^2 + 2^(k^2) - 1, 2^(k^2) - 1) * 2^(-n^2), and of the
    simplified form (10 n^2 / 2^(k^2))^(2^(k^2)) * 2^(-n^2)."""
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got n={n}, k={k}")
    if k * k > MAX_BOUND_K2:
        raise InputError(f"k^2={k * k} exceeds {MAX_BOUND_K2}; bound not supported")
    m = (n - k + 1) ** 2
    t = 2 ** (k * k)
    # log-gamma differences cancel heavily for large t; 30 digits beyond the
    # magnitude of the terms keeps the result exact to well below 1e-9
    digits = 30 + len(str(m + t))
    with mpmath.workdps(digits):
        ln_binom = mpmath.loggamma(m + t) - mpmath.loggamma(t) - mpmath.loggamma(m + 1)
        binom = float(ln_binom / mpmath.log(2)) - n * n
        simple = float(t * (mpmath.log(10 * n * n, 2) - k * k)) - n * n
    return ZeroBound(binom, simple)


def ratio0(n: int, k: int) -> float:
    return n * n / 2.0 ** (k * k)


def ratio1(n: int, k: int) -> float:
    return k * n * n / 2.0 ** (k * k - k)


# --- experiments -----------------------------------------------------------------

@dataclass
class ExperimentRow:
    n: int
    k: int
    trials: int
    successes: int = 0
    wrong_outputs: int = 0
    aborts: dict = field(default_factory=lambda: {s: 0 for s in STAGES})
    seed: int = 0
    kc: int = 0
    ratio0: float = 0.0
    ratio1: float = 0.0
    mean_ms: float | None = None
    unsupported: bool = False

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def check(self) -> None:
        if self.successes + self.wrong_outputs + sum(self.aborts.values()) != self.trials:
            raise AssertionError(f"outcome counts of ({self.n}, {self.k}) do not sum")

    def csv_line(self) -> str:
        ms = "" if self.mean_ms is None else f"{self.mean_ms:.6g}"
        a = self.aborts
        return (f"{self.n},{self.k},{self.trials},{self.successes},{self.wrong_outputs},"
                f"{a['initial']},{a['column']},{a['row']},{a['leftover']},{self.seed},"
                f"{self.kc},{self.ratio0:.6g},{self.ratio1:.6g},{ms}")


def trial_seed(master: int, n: int, k: int, i: int) -> int:
    return derive_seed(master, n, k, i)


def _one(task: tuple[int, int, int]) -> tuple[str, float]:
    n, k, seed = task
    out = run_trial(n, k, seed)
    return out.label, out.wall_ms


def run_experiment(ns: Sequence[int], ks: Sequence[int], trials: int, master_seed: int,
                   workers: int = 1, timing: bool = False) -> list[ExperimentRow]:
    """One row per (n, k), in the order given.

    Outcomes depend only on (master_seed, n, k, trial index), so rows are
    identical for any worker count.  Wall-clock means are not reproducible
    and are only filled in when `timing` is set.
    """
    if trials < 0:
        raise InputError("trials must be >= 0")
    if workers < 1:
        raise InputError("workers must be >= 1")
    rows = []
    tasks = []
    for n in ns:
        for k in ks:
            if n < 2 or not 1 <= k <= n:
                raise InputError(f"invalid pair n={n}, k={k}")
            row = ExperimentRow(n, k, trials, seed=master_seed, kc=kc(n),
                                ratio0=ratio0(n, k), ratio1=ratio1(n, k))
            if k < n < 3 * k:
                row.trials = 0
                row.unsupported = True
            else:
                tasks.extend((len(rows), (n, k, trial_seed(master_seed, n, k, i)))
                             for i in range(trials))
            rows.append(row)
    if not trials:
        return []
    payload = [t for _, t in tasks]
    if workers == 1:
        results: Iterable = map(_one, payload)
        pool = None
    else:
        pool = ProcessPoolExecutor(workers)
        results = pool.map(_one, payload, chunksize=max(1, len(payload) // (workers * 8)))
    times: dict[int, float] = {}
    try:
        for (index, _), (label, ms) in zip(tasks, results):
            row = rows[index]
            if label == "success":
                row.successes += 1
            elif label == "wrong_output":
                row.wrong_outputs += 1
            else:
                row.aborts[label.removeprefix("abort_")] += 1
            times[index] = times.get(index, 0.0) + ms
    finally:
        if pool is not None:
            pool.shutdown()
    for index, row in enumerate(rows):
        row.check()
        if timing and row.trials:
            row.mean_ms = times[index] / row.trials
    return rows


def experiment_csv(rows: Iterable[ExperimentRow]) -> str:
    buf = io.StringIO(newline="")
    buf.write(CSV_HEADER + "\n")
    for row in rows:
        buf.write(row.csv_line() + "\n")
    return buf.getvalue()


def standard_error(p: float, trials: int) -> float:
    return math.sqrt(p * (1 - p) / trials) if trials else 0.0
