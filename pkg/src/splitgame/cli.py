"""Command-line driver.

Exit codes: 0 success, 1 property violation, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .adversaries import KINDS, AdversaryConfig, informal_pattern_run, no_shortcut_sequence
from .composer import Session, assemble_global, branch_report
from .decomposition import FiniteMartingale, boundedness_check, make_positive, product_mismatches, random_martingale, split
from .game import InvalidHeight, check_height
from .play import play_finite
from .rational import fmt, q
from .trace import read_jsonl, verify, write_jsonl

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(s: str) -> Fraction:
    try:
        return q(s)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {s!r}") from exc


def _show(x: Fraction, decimal: bool) -> str:
    out = fmt(x)
    if decimal:
        out += f" (decimal, display only: {float(x):.6f})"
    return out


def _trace_path(base: str | None, seed: int, many: bool) -> Path | None:
    if base is None:
        return None
    p = Path(base)
    return p.with_name(f"{p.stem}-{seed}{p.suffix}") if many else p


def _adversary(args, seed: int) -> AdversaryConfig:
    return AdversaryConfig(
        kind=args.adversary,
        seed=seed,
        budget=args.budget,
        delta=args.delta,
        target=args.target,
        role=args.role,
        grid=args.grid,
    )


def _seeds(args) -> list[int]:
    return [args.seed + i for i in range(args.seeds)]


def _fan_out(fn, jobs: list, n_jobs: int) -> list:
    if n_jobs <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, jobs))


# --------------------------------------------------------------------------
# play-finite


def _play_one(job) -> tuple[int, str, bool, str]:
    args, seed, path = job
    run = play_finite(args.h, _adversary(args, seed), root_parity=args.root_parity)
    checked = ""
    if path is not None:
        write_jsonl(run.records, path)
    if args.verify:
        checked = str(verify(run.records))
    return seed, str(run.verdict), run.verdict.m_wins, checked


def cmd_play_finite(args) -> int:
    check_height(args.h)
    seeds = _seeds(args)
    jobs = [(args, s, _trace_path(args.trace, s, len(seeds) > 1)) for s in seeds]
    code = EXIT_OK
    for seed, verdict, won, checked in _fan_out(_play_one, jobs, args.jobs):
        line = f"seed {seed}: {verdict}"
        if checked:
            line += f"  [{checked}]"
            if checked != "trace ok":
                code = EXIT_VIOLATION
        print(line)
        if not won:
            code = EXIT_VIOLATION
    return code


# --------------------------------------------------------------------------
# compose


def _compose_one(job):
    args, seed, path = job
    s = Session(args.initial_h, _adversary(args, seed), args.stages).run(args.max_steps)
    assemble_global(s)
    report = branch_report(s)
    records = s.emit()
    if path is not None:
        write_jsonl(records, path)
    checked = str(verify(records)) if args.verify else ""
    return seed, report, checked


def cmd_compose(args) -> int:
    check_height(args.initial_h)
    if args.stages < 0:
        raise UsageError("--stages must be nonnegative")
    seeds = _seeds(args)
    jobs = [(args, s, _trace_path(args.trace, s, len(seeds) > 1)) for s in seeds]
    code = EXIT_OK
    for seed, r, checked in _fan_out(_compose_one, jobs, args.jobs):
        print(f"seed {seed}: omega prefix {r.omega_prefix or '(empty)'}")
        print(f"  heights {r.heights}  labels {r.stage_labels}")
        print(f"  growth {_show(r.growth, args.decimal)} >= {_show(r.threshold_product, args.decimal)}")
        print(f"  A-bound {_show(r.a_max_along, args.decimal)} <= {_show(r.allowance_product, args.decimal)}")
        if checked:
            print(f"  [{checked}]")
            if checked != "trace ok":
                code = EXIT_VIOLATION
        if not r.ok:
            code = EXIT_VIOLATION
    return code


# --------------------------------------------------------------------------
# decompose


def _decompose_example() -> FiniteMartingale:
    F = Fraction
    return FiniteMartingale(
        2, {"": F(1), "0": F(3, 2), "1": F(1, 2), "00": F(2), "01": F(1), "10": F(1, 2), "11": F(1, 2)}
    )


def _decompose_batch(job) -> list[str]:
    seed, count, max_depth, c = job
    rng = random.Random(seed)
    bad = []
    for i in range(count):
        t = make_positive(random_martingale(rng, rng.randint(0, max_depth)), c)
        t0, t1 = split(t)
        problems = t0.validate() + t1.validate()
        mism = product_mismatches(t, t0, t1)
        if problems or mism:
            bad.append(f"seed {seed} case {i}: {problems[:2]} {mism[:2]}")
        leaf = "".join(rng.choice("01") for _ in range(t.depth))
        if not boundedness_check(t, t0, t1, leaf).ok:
            bad.append(f"seed {seed} case {i}: boundedness fails on {leaf}")
    return bad


def cmd_decompose(args) -> int:
    if args.c <= 0:
        raise UsageError("--c must be positive")
    if args.example:
        t = _decompose_example()
        t0, t1 = split(t)
        for x in sorted(t.values, key=lambda x: (len(x), x)):
            print(f"{x or 'root':>4}  t {fmt(t[x]):>5}  t0 {fmt(t0.get(x)):>5}  t1 {fmt(t1.get(x)):>5}")
        rep = boundedness_check(t, t0, t1, "00")
        print(f"along 00: max t {fmt(rep.max_t)} <= {fmt(rep.max_t0)} * {fmt(rep.max_t1)}")
        return EXIT_OK if rep.ok and not product_mismatches(t, t0, t1) else EXIT_VIOLATION
    if not 0 <= args.depth <= 16:
        raise UsageError("--depth must be in 0..16")
    seeds = _seeds(args)
    jobs = [(s, args.count, args.depth, args.c) for s in seeds]
    bad = [b for batch in _fan_out(_decompose_batch, jobs, args.jobs) for b in batch]
    for b in bad:
        print(b)
    print(f"{len(seeds) * args.count} martingales, {len(bad)} failures")
    return EXIT_VIOLATION if bad else EXIT_OK


# --------------------------------------------------------------------------
# pattern-seq


def cmd_pattern_seq(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    print("".join(str(no_shortcut_sequence(k)) for k in range(1, args.n + 1)))
    if args.play_h is None:
        return EXIT_OK
    check_height(args.play_h)
    run = informal_pattern_run(args.play_h)
    print(f"h={run.h}: {run.steps} leaves discredited in order, {len(run.premature)} premature")
    if run.stuck_at is not None:
        print(f"  no admissible move left at leaf {run.stuck_at}")
    return EXIT_VIOLATION if run.premature else EXIT_OK


# --------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    try:
        records = read_jsonl(args.trace)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read trace: {exc}") from exc
    result = verify(records)
    print(result)
    if result.ok:
        return EXIT_OK
    if result.kind in ("EmptyTrace", "UnknownTrace", "MalformedRecord", "UnknownRecord"):
        return EXIT_USAGE
    return EXIT_VIOLATION


# --------------------------------------------------------------------------


def _add_adversary(p: argparse.ArgumentParser) -> None:
    p.add_argument("--adversary", choices=KINDS, default="passive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="run seeds seed..seed+N-1")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for independent seeds")
    p.add_argument("--budget", type=int, default=50)
    p.add_argument("--delta", type=_rational, default=Fraction(1, 8))
    p.add_argument("--target", type=int, default=1, help="A_i pushed by case-a")
    p.add_argument("--role", choices=("t0", "t1"), default="t1", help="valuation pushed by case-a")
    p.add_argument("--grid", type=_rational, default=Fraction(1, 8), help="random increment unit")
    p.add_argument("--trace", help="JSONL trace output (seed-suffixed when several seeds run)")
    p.add_argument("--verify", action="store_true", help="re-verify the emitted trace")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="splitgame", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play-finite", help="one game on a finite tree")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--root-parity", type=int, choices=(0, 1), default=0)
    _add_adversary(p)
    p.set_defaults(fn=cmd_play_finite)

    p = sub.add_parser("compose", help="stack finite games up the infinite tree")
    p.add_argument("--stages", type=int, default=3)
    p.add_argument("--initial-h", type=int, default=3)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--decimal", action="store_true")
    _add_adversary(p)
    p.set_defaults(fn=cmd_compose)

    p = sub.add_parser("decompose", help="split positive martingales into parity bettors")
    p.add_argument("--example", action="store_true", help="show the depth-2 worked example")
    p.add_argument("--depth", type=int, default=10, help="maximum depth of random martingales")
    p.add_argument("--count", type=int, default=100, help="martingales per seed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--c", type=_rational, default=Fraction(1), help="constant added by make_positive")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("pattern-seq", help="print the no-shortcut sequence")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--play-h", type=int, help="also run the left-to-right pattern game at this height")
    p.set_defaults(fn=cmd_pattern_seq)

    p = sub.add_parser("verify", help="replay a JSONL trace through the validators")
    p.add_argument("--trace", required=True)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1 or getattr(args, "seeds", 1) < 1:
        print("error: --jobs and --seeds must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, InvalidHeight, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
