"""Command-line entry point.

Exit codes: 0 success, 1 reconstruction failure or oracle "no", 2 usage,
parse or resource errors.  Data goes to files or stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, diagnostics, oracle
from .errors import PicreconError
from .grid import (decode_deck, decode_picture, deck, encode_deck, encode_picture,
                   random_picture)
from .reconstruct import reconstruct


class UsageError(Exception):
    pass


def int_list(text: str) -> list[int]:
    """'48,64' -> [48, 64]; 'a..b' is an inclusive range."""
    out: list[int] = []
    try:
        for part in text.split(","):
            if ".." in part:
                a, b = part.split("..")
                lo, hi = int(a), int(b)
                if lo > hi:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list like 48,64 or 4..7, got {text!r}")
    return out


def nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def positive(text: str) -> int:
    value = nonneg(text)
    if value == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="picrecon",
                                 description="Reconstruct random binary pictures from k-decks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random picture")
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--seed", type=nonneg, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("deck", help="write the k-deck of a picture")
    p.add_argument("--k", type=positive, required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("reconstruct", help="reconstruct a picture from a deck")
    p.add_argument("--deck", required=True)
    p.add_argument("--seed", type=nonneg, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="exit 0 only if the output equals this picture")

    p = sub.add_parser("trial", help="one seeded trial; prints a JSON outcome")
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--k", type=positive, required=True)
    p.add_argument("--seed", type=nonneg, required=True)

    p = sub.add_parser("experiment", help="Monte Carlo sweep to CSV")
    p.add_argument("--n", type=int_list, required=True)
    p.add_argument("--k", type=int_list, required=True)
    p.add_argument("--trials", type=nonneg, required=True)
    p.add_argument("--seed", type=nonneg, required=True)
    p.add_argument("--threads", type=positive, default=1)
    p.add_argument("--csv", required=True)
    p.add_argument("--timing", action="store_true",
                   help="fill mean_ms (makes the CSV machine dependent)")

    p = sub.add_parser("oracle", help="exhaustive reconstructibility for tiny pictures")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    q = osub.add_parser("classify")
    q.add_argument("--n", type=positive, required=True)
    q.add_argument("--k", type=positive, required=True)
    q.add_argument("--allow-n5", action="store_true")
    q = osub.add_parser("check")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--k", type=positive, required=True)
    q.add_argument("--allow-n5", action="store_true")
    q.add_argument("--witness", help="write a colliding picture here on 'no'")

    p = sub.add_parser("bounds", help="threshold and zero-statement bound")
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--k", type=positive, required=True)

    p = sub.add_parser("diagnose", help="bad-window marks and interface paths")
    p.add_argument("--truth", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=positive, required=True)
    p.add_argument("--marks", help="write the mark map here")
    return ap


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _check_out(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError(f"output directory {parent} does not exist")


def cmd_gen(a) -> int:
    _check_out(a.out)
    _write(a.out, encode_picture(random_picture(a.n, a.seed)))
    return 0


def cmd_deck(a) -> int:
    _check_out(a.out)
    p = decode_picture(_read(a.inp))
    _write(a.out, encode_deck(deck(p, a.k)))
    return 0


def cmd_reconstruct(a) -> int:
    _check_out(a.out)
    d = decode_deck(_read(a.deck))
    truth = decode_picture(_read(a.truth)) if a.truth else None
    res = reconstruct(d, a.seed)
    if not res.success:
        print(f"abort ({res.stage}): {res.reason}", file=sys.stderr)
        return 1
    _write(a.out, encode_picture(res.picture))
    if truth is not None and res.picture != truth:
        print("output differs from --truth", file=sys.stderr)
        return 1
    return 0


def cmd_trial(a) -> int:
    out = oracle.run_trial(a.n, a.k, a.seed)
    record = {"n": out.n, "k": out.k, "seed": out.seed, "result": out.result,
              "stage": out.stage, "remaining": out.remaining, "stats": out.stats}
    print(json.dumps(record, sort_keys=True))
    return 0 if out.success else 1


def cmd_experiment(a) -> int:
    _check_out(a.csv)
    for n in a.n:
        for k in a.k:
            if n < 2 or not 1 <= k <= n:
                raise UsageError(f"invalid pair n={n}, k={k}")
    rows = analysis.run_experiment(a.n, a.k, a.trials, a.seed, a.threads, a.timing)
    for row in rows:
        if row.unsupported:
            print(f"n={row.n}, k={row.k}: unsupported (k < n < 3k), no trials run",
                  file=sys.stderr)
    _write(a.csv, analysis.experiment_csv(rows))
    return 0


def cmd_oracle(a) -> int:
    if a.oracle_command == "classify":
        c = oracle.classify_all(a.n, a.k, allow_n5=a.allow_n5)
        print(f"total={c.total} reconstructible={c.reconstructible}")
        if c.example is not None:
            p, q = c.example
            print("collision:")
            print(encode_picture(p), end="")
            print("--")
            print(encode_picture(q), end="")
        return 0
    if a.witness:
        _check_out(a.witness)
    p = decode_picture(_read(a.inp))
    v = oracle.is_reconstructible_exhaustive(p, a.k, allow_n5=a.allow_n5)
    print(v)
    if not v.reconstructible and a.witness:
        _write(a.witness, encode_picture(v.witness))
    return 0 if v.reconstructible else 1


def cmd_bounds(a) -> int:
    b = analysis.zero_statement_log2_bound(a.n, a.k)
    print(f"kc={analysis.kc(a.n)}")
    print(f"ratio0={analysis.ratio0(a.n, a.k):.6g}")
    print(f"ratio1={analysis.ratio1(a.n, a.k):.6g}")
    print(f"log2_bound_binomial={b.binomial_log2:.10g}")
    print(f"log2_bound_simplified={b.simplified_log2:.10g}")
    return 0


def cmd_diagnose(a) -> int:
    if a.marks:
        _check_out(a.marks)
    truth = decode_picture(_read(a.truth))
    output = decode_picture(_read(a.output))
    m = diagnostics.mark_bad_windows(truth, output, a.k)
    paths = diagnostics.extract_interfaces(m)
    print(f"marks={len(m.marks)} interfaces={len(paths)}")
    for path in paths:
        c = diagnostics.classify_steps(path)
        start = path.vertices[0]
        print(f"start={start[0]},{start[1]} length={path.length} up={c.up} down={c.down} "
              f"left={c.left} right={c.right} contributing={c.contributing} "
              f"steps={''.join(s[0] for s in path.steps)}")
    if a.marks:
        _write(a.marks, diagnostics.dump_marks(m))
    return 0


COMMANDS = {"gen": cmd_gen, "deck": cmd_deck, "reconstruct": cmd_reconstruct,
            "trial": cmd_trial, "experiment": cmd_experiment, "oracle": cmd_oracle,
            "bounds": cmd_bounds, "diagnose": cmd_diagnose}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, PicreconError, OSError, UnicodeDecodeError) as exc:
        print(f"picrecon: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
