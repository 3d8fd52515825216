"""Command-line entry points: generate, verify, show, stats.

Exit codes: 0 success, 1 verification or lookup failure, 2 usage error.
KNOTFORGE_THREADS overrides --threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .canonical import DEFAULT_CAP, canonical_key
from .census import KnotStore, generate
from .classify import classify
from .diagram import (
    format_dt_code,
    format_group_code,
    format_signed_gauss,
    format_unsigned_gauss,
    parse_unsigned_gauss,
    realize_unsigned_gauss,
    to_dt_code,
    to_group_code,
    to_signed_gauss,
)
from .errors import CapExceeded, KnotforgeError, StoreError
from .tangles import compute_orbit, find_groups


def _threads_default():
    env = os.environ.get("KNOTFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def cmd_generate(args) -> int:
    if args.max_crossings < 5:
        print("error: max-crossings must be >= 5", file=sys.stderr)
        return 2
    store = KnotStore(args.out)
    rows = []

    def progress(s):
        print(f"n={s.n}: {s.total} knots "
              f"(step1 {s.step1}, fraction {s.step1_fraction:.4f}, "
              f"{s.seconds:.1f}s)", flush=True)

    try:
        stats = generate(
            args.max_crossings,
            store,
            threads=args.threads,
            flype_cap=args.flype_cap,
            progress=progress,
        )
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, StoreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps([s.as_dict() for s in stats.levels]))
    else:
        print(", ".join(f"{s.n}: {s.total}" for s in stats.levels))
    return 0


def cmd_verify(args) -> int:
    try:
        with open(args.expect) as fh:
            expect = {int(k): int(v) for k, v in json.load(fh).items()}
    except (OSError, ValueError, AttributeError) as exc:
        print(f"error: bad expect file: {exc}", file=sys.stderr)
        return 2
    try:
        store = KnotStore(args.db)
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    counts = store.counts()
    ok = True
    for n in sorted(expect):
        got = counts.get(n)
        good = got == expect[n]
        ok = ok and good
        print(f"n={n}: expected {expect[n]}, found {got}: "
              f"{'PASS' if good else 'FAIL'}")
    return 0 if ok else 1


def _resolve_diagram(args):
    if args.key:
        store = KnotStore(args.db) if args.db else None
        if store is None:
            print("error: --key needs --db", file=sys.stderr)
            return None, 2
        try:
            key = bytes.fromhex(args.key)
        except ValueError:
            print("error: key is not hex", file=sys.stderr)
            return None, 2
        hit = store.find_key(key)
        if hit is None:
            print("key not found", file=sys.stderr)
            return None, 1
        return hit[1], 0
    seq = parse_unsigned_gauss(args.gauss)
    shadows = realize_unsigned_gauss(seq)
    if not shadows:
        print("gauss sequence has no planar realization", file=sys.stderr)
        return None, 1
    return shadows[0], 0


def cmd_show(args) -> int:
    try:
        d, rc = _resolve_diagram(args)
    except KnotforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if d is None:
        return rc
    fmt = args.format
    if fmt == "gauss":
        code = to_signed_gauss(d, 0)
        print(format_unsigned_gauss(code))
        print(format_signed_gauss(code))
    elif fmt == "group":
        print(format_group_code(to_group_code(d)))
    elif fmt == "dt":
        print(format_dt_code(to_dt_code(d)))
    elif fmt == "orbit":
        for g in find_groups(d):
            orbit = compute_orbit(d, g)
            marks = []
            for kind, val in orbit.positions:
                if kind == "group":
                    marks.append("G" + "".join(f"x{c}" for c in val))
                else:
                    marks.append(f"e{val[0]}/e{val[1]}")
            tangles = ["{" + ",".join(map(str, sorted(t))) + "}"
                       for t in orbit.min_tangles]
            print(f"group {g.crossings} sign {g.sign:+d}: "
                  f"positions [{', '.join(marks)}] "
                  f"min-tangles [{', '.join(tangles)}]")
    elif fmt == "class":
        label = classify(d)
        wit = ""
        if label.witnesses:
            kind, val = label.witnesses[0]
            wit = f" ({kind} {val})"
        print(f"{label.value}{wit}")
    else:
        print(f"error: unknown format {fmt}", file=sys.stderr)
        return 2
    if args.with_key:
        print(f"key: {canonical_key(d).hex()}")
    return 0


def cmd_stats(args) -> int:
    try:
        store = KnotStore(args.db)
        rows = store.read_stats()
    except (StoreError, OSError) as exc:
        print(f"no stats: {exc}", file=sys.stderr)
        return 1
    if not rows:
        print("no stats", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(rows))
        return 0
    print("n\ttotal\tstep1\tstep2\tstep1_fraction\tseconds")
    for r in rows:
        print(f"{r['n']}\t{r['total']}\t{r['step1']}\t{r['step2']}"
              f"\t{r['step1_fraction']:.4f}\t{r['seconds']:.2f}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="knotforge",
        description="Generate and inspect the prime alternating knot census.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="run the two-step census")
    g.add_argument("--max-crossings", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--threads", type=int, default=_threads_default())
    g.add_argument("--flype-cap", type=int, default=DEFAULT_CAP)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="compare store counts to expectations")
    v.add_argument("--db", required=True)
    v.add_argument("--expect", required=True,
                   help="JSON file mapping crossing number to count")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("show", help="print representations of one knot")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--key", help="hex canonical key (with --db)")
    src.add_argument("--gauss", help="comma-separated unsigned Gauss sequence")
    s.add_argument("--db")
    s.add_argument("--format", default="gauss",
                   choices=["gauss", "group", "dt", "orbit", "class"])
    s.add_argument("--with-key", action="store_true")
    s.set_defaults(func=cmd_show)

    t = sub.add_parser("stats", help="print per-level generation statistics")
    t.add_argument("--db", required=True)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
