"""Play every scripted adversary plus a batch of random ones at each height
and report how many games the strategy won."""
import argparse
import time
from fractions import Fraction

from splitgame.adversaries import AdversaryConfig
from splitgame.play import play_finite


def suite(h, randoms):
    cfgs = [AdversaryConfig("passive"), AdversaryConfig("pattern")]
    cfgs += [AdversaryConfig("case-a", target=i, role=r) for i in range(1, h + 1) for r in ("t0", "t1")]
    cfgs += [AdversaryConfig("case-b", delta=d) for d in (Fraction(1, 64), Fraction(1, 8), Fraction(1, 2))]
    cfgs += [AdversaryConfig("random", seed=s, budget=50) for s in range(randoms)]
    return cfgs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--heights", type=int, nargs="+", default=[3, 5, 7])
    ap.add_argument("--randoms", type=int, default=100)
    args = ap.parse_args(argv)
    lost = 0
    for h in args.heights:
        t = time.perf_counter()
        runs = [play_finite(h, cfg) for cfg in suite(h, args.randoms)]
        bad = [r for r in runs if not r.verdict.m_wins]
        lost += len(bad)
        print(f"h={h}: {len(runs) - len(bad)}/{len(runs)} won in {time.perf_counter() - t:.1f}s")
        for r in bad:
            print("  lost:", r.records[0]["adversary"])
    return 1 if lost else 0


if __name__ == "__main__":
    raise SystemExit(main())
