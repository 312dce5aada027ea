"""Splitting a positive martingale into an even-step and an odd-step bettor.

On every step exactly one of the two copies bets, dividing its capital in
the same proportion as ``t``; the other keeps its capital.  Telescoping
gives ``t0(x) * t1(x) = t(x)`` at every node.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .rational import ONE, RationalLike, ZERO, q
from .tree import ROOT, Role, Valuation, prefixes


class NotPositive(ValueError):
    pass


@dataclass(frozen=True)
class FiniteMartingale:
    """A martingale restricted to the nodes of depth <= ``depth``."""

    depth: int
    values: Mapping[str, Fraction]

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        bad = self.violations()
        if bad:
            raise ValueError(f"not a martingale: {bad[:3]}")

    def __getitem__(self, x: str) -> Fraction:
        return self.values[x]

    def nodes(self) -> list[str]:
        return _nodes(self.depth)

    def valuation(self) -> Valuation:
        return Valuation(Role.FULL, dict(self.values), height=self.depth, martingale=True)

    def violations(self) -> list:
        missing = [x for x in self.nodes() if x not in self.values]
        if missing:
            return [("missing", x) for x in missing]
        return self.valuation().validate()

    @property
    def minimum(self) -> Fraction:
        return min(self.values.values())

    @classmethod
    def constant(cls, depth: int) -> "FiniteMartingale":
        return cls(depth, {x: ONE for x in _nodes(depth)})

    @classmethod
    def from_leaves(cls, depth: int, leaves: Mapping[str, RationalLike]) -> "FiniteMartingale":
        """Averages leaf values down to the root; the leaves are rescaled so
        that the root is 1."""
        vals = {x: q(v) for x, v in leaves.items()}
        level = dict(vals)
        for _ in range(depth):
            level = {p: (level[p + "0"] + level[p + "1"]) / 2 for p in {x[:-1] for x in level}}
            vals.update(level)
        root = vals[ROOT]
        if root <= 0:
            raise NotPositive("leaf values must have a positive mean")
        return cls(depth, {x: v / root for x, v in vals.items()})


def _nodes(depth: int) -> list[str]:
    return [format(i, f"0{d}b") if d else ROOT for d in range(depth + 1) for i in range(2**d)]


def random_martingale(rng: random.Random, depth: int, zero_prob: float = 0.1, grid: int = 8) -> FiniteMartingale:
    """Random martingale with small-denominator leaves; some leaves are 0 so
    that ``make_positive`` has work to do."""
    while True:
        leaves = {
            format(i, f"0{depth}b") if depth else ROOT: (
                ZERO if rng.random() < zero_prob else Fraction(rng.randint(1, 4 * grid), grid)
            )
            for i in range(2**depth)
        }
        if any(leaves.values()):
            return FiniteMartingale.from_leaves(depth, leaves)


def make_positive(t: FiniteMartingale, c: RationalLike = 1) -> FiniteMartingale:
    c = q(c)
    if c <= 0:
        raise ValueError("c must be positive")
    return FiniteMartingale(t.depth, {x: (v + c) / (1 + c) for x, v in t.values.items()})


def split(t: FiniteMartingale) -> tuple[Valuation, Valuation]:
    """Returns (t0, t1): t0 bets on steps from odd-length strings, t1 on steps
    from even-length strings (including the first one)."""
    if t.minimum <= 0:
        raise NotPositive("split needs a strictly positive martingale")
    t0: dict[str, Fraction] = {ROOT: ONE}
    t1: dict[str, Fraction] = {ROOT: ONE}
    for x in _nodes(t.depth - 1) if t.depth else []:
        mover, keeper = (t0, t1) if len(x) % 2 else (t1, t0)
        for b in "01":
            y = x + b
            mover[y] = mover[x] * t[y] / t[x]
            keeper[y] = keeper[x]
    mk = lambda role, vals: Valuation(role, vals, height=t.depth, martingale=True)
    return mk(Role.EVEN, t0), mk(Role.ODD, t1)


def product_mismatches(t: FiniteMartingale, t0: Valuation, t1: Valuation) -> list[str]:
    return [x for x, v in t.values.items() if t0.get(x) * t1.get(x) != v]


@dataclass(frozen=True)
class BoundednessReport:
    prefix: str
    max_t: Fraction
    max_t0: Fraction
    max_t1: Fraction

    @property
    def ok(self) -> bool:
        return self.max_t <= self.max_t0 * self.max_t1


def boundedness_check(t: FiniteMartingale, t0: Valuation, t1: Valuation, prefix: str) -> BoundednessReport:
    if len(prefix) > t.depth:
        raise ValueError("prefix longer than the martingale's depth")
    path = list(prefixes(prefix))
    rep = BoundednessReport(
        prefix,
        max(t[x] for x in path),
        max(t0.get(x) for x in path),
        max(t1.get(x) for x in path),
    )
    assert rep.ok, f"max t {rep.max_t} exceeds {rep.max_t0} * {rep.max_t1}"
    return rep
