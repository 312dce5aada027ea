"""Split random positive martingales into two parity-restricted factors and
check the product identity and the path-maximum bound."""
import argparse
import random

from splitgame.decomposition import boundedness_check, make_positive, product_mismatches, random_martingale, split


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    failures = 0
    for _ in range(args.count):
        t = make_positive(random_martingale(rng, args.depth), 1)
        t0, t1 = split(t)
        prefix = "".join(rng.choice("01") for _ in range(args.depth))
        if product_mismatches(t, t0, t1) or t0.validate() or t1.validate():
            failures += 1
            continue
        boundedness_check(t, t0, t1, prefix)
    print(f"{args.count} martingales of depth {args.depth}, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
