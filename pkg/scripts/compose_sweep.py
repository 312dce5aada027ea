"""Run composed sessions over many seeds and tabulate growth along the
selected branch against the threshold and allowance products."""
import argparse
from fractions import Fraction

from splitgame.adversaries import AdversaryConfig
from splitgame.composer import Session, assemble_global, branch_report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--adversary", default="random")
    ap.add_argument("--stages", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--budget", type=int, default=30)
    args = ap.parse_args(argv)
    failures = 0
    worst = Fraction(0)
    for seed in range(args.seeds):
        s = Session(3, AdversaryConfig(args.adversary, seed=seed, budget=args.budget), args.stages).run()
        assemble_global(s)
        r = branch_report(s)
        worst = max(worst, r.a_max_along)
        failures += not r.ok
        print(
            f"seed {seed:3d}  heights {r.heights}  growth {float(r.growth):.4f}"
            f"  >= {float(r.threshold_product):.4f}  A-max {float(r.a_max_along):.4f}"
            f"  <= {float(r.allowance_product):.4f}  {'ok' if r.ok else 'FAIL'}"
        )
    print(f"{args.seeds} sessions, {failures} failures, largest A-max {worst} (~{float(worst):.4f})")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
