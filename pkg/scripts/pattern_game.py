"""Print the no-shortcut sequence and replay the informal left-to-right game
at a few heights, listing leaves discredited before they were funded."""
import argparse

from splitgame.adversaries import informal_pattern_run, no_shortcut_sequence


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--heights", type=int, nargs="+", default=[3, 5, 7])
    args = ap.parse_args(argv)
    print("".join(str(no_shortcut_sequence(k)) for k in range(1, args.n + 1)))
    for h in args.heights:
        run = informal_pattern_run(h)
        tail = f", stuck at step {run.stuck_at}" if run.stuck_at else ""
        print(f"h={h}: {run.steps} steps, {len(run.premature)} premature{tail}")
        for k, leaf in run.premature[:5]:
            print(f"  step {k}: {leaf}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
