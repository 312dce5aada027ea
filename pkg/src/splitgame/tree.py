"""Binary-tree addressing, parity roles and supermartingale valuations.

Nodes are plain strings over ``"01"``; the empty string is the root.  A
:class:`Valuation` stores finitely many values and extends them to the rest of
the tree by a default rule that is always safe: below a node where the
player does not bet the value is inherited, below a node where it bets the
value is zero.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .rational import ONE, ZERO, RationalLike, fmt, parse, q

ROOT = ""


class Role(str, Enum):
    FULL = "full"
    EVEN = "even"  # t0: fixed across the children of every even-length node
    ODD = "odd"  # t1: fixed across the children of every odd-length node


def bets_at(role: Role, global_depth: int) -> bool:
    """Whether ``role`` may move value between depth ``global_depth`` and the next."""
    if role is Role.FULL:
        return True
    if role is Role.EVEN:
        return global_depth % 2 == 1
    return global_depth % 2 == 0


# --------------------------------------------------------------------------
# node helpers


def parent(x: str) -> str:
    if not x:
        raise ValueError("the root has no parent")
    return x[:-1]


def sibling(x: str) -> str:
    if not x:
        raise ValueError("the root has no sibling")
    return x[:-1] + ("1" if x[-1] == "0" else "0")


def prefixes(x: str) -> Iterator[str]:
    """Root-to-node path, both ends included."""
    for k in range(len(x) + 1):
        yield x[:k]


def subtree(x: str, depth: int) -> Iterator[str]:
    """All nodes above ``x`` (``x`` included) up to absolute depth ``depth``."""
    for k in range(depth - len(x) + 1):
        for i in range(2**k):
            yield x + (format(i, f"0{k}b") if k else "")


def leaves_above(x: str, depth: int) -> list[str]:
    k = depth - len(x)
    if k < 0:
        return []
    if k == 0:
        return [x]
    return [x + format(i, f"0{k}b") for i in range(2**k)]


def node_key(x: str):
    return (len(x), x)


# --------------------------------------------------------------------------
# violations


class RuleViolation(ValueError):
    kind = "violation"

    def __init__(self, node: str | None, reason: str):
        self.node = node
        self.reason = reason
        where = "" if node is None else f" at {node!r}"
        super().__init__(f"{self.kind}{where}: {reason}")


class MonotonicityViolation(RuleViolation):
    kind = "MonotonicityViolation"


class StructureViolation(RuleViolation):
    kind = "StructureViolation"


@dataclass(frozen=True)
class Violation:
    node: str
    kind: str  # negative | root | depth | inequality | equality
    detail: str = ""


# --------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class Measure:
    """Measure on the tree given by conditional next-bit probabilities.

    ``table[x]`` is mu(x0)/mu(x); unlisted nodes use ``default``.
    """

    table: Mapping[str, Fraction] = field(default_factory=dict)
    default: Fraction = Fraction(1, 2)
    epsilon: Fraction | None = None

    @classmethod
    def uniform(cls) -> "Measure":
        return cls()

    @classmethod
    def bernoulli(cls, p0: RationalLike, epsilon: RationalLike | None = None) -> "Measure":
        return cls(default=q(p0), epsilon=None if epsilon is None else q(epsilon))

    def p0(self, x: str) -> Fraction:
        return self.table.get(x, self.default)

    def p1(self, x: str) -> Fraction:
        return ONE - self.p0(x)

    def mu(self, x: str) -> Fraction:
        m = ONE
        for k, bit in enumerate(x):
            m *= self.p0(x[:k]) if bit == "0" else self.p1(x[:k])
        return m

    @property
    def is_uniform(self) -> bool:
        return self.default == Fraction(1, 2) and all(
            v == Fraction(1, 2) for v in self.table.values()
        )

    def invalid_nodes(self) -> list[str]:
        bad = [x for x, p in self.table.items() if not 0 < p < 1]
        if not 0 < self.default < 1:
            bad.append("*")
        return sorted(bad, key=node_key)

    def separation_violations(self, depth: int, epsilon: RationalLike | None = None) -> list[str]:
        """Nodes of length < ``depth`` (plus tabled nodes) with a conditional
        probability <= epsilon."""
        eps = self.epsilon if epsilon is None else q(epsilon)
        if eps is None:
            return []
        flagged = set()
        if self.default <= eps or ONE - self.default <= eps:
            # the default applies to every untabled node; report the first one
            for x in subtree(ROOT, max(depth - 1, 0)):
                if x not in self.table:
                    flagged.add(x)
                    break
        for x, p in self.table.items():
            if p <= eps or ONE - p <= eps:
                flagged.add(x)
        return sorted(flagged, key=node_key)


UNIFORM = Measure()


# --------------------------------------------------------------------------
# valuations


@dataclass(frozen=True)
class Valuation:
    """Immutable snapshot of one player's supermartingale.

    ``offset`` is the global depth of the local root (parity of embedded
    subgames); ``height`` is None in sparse infinite-tree mode.  With
    ``pinned_root`` the root is exactly 1 and never writable; otherwise the
    root may be raised up to 1.  ``martingale`` demands equality at betting
    nodes.
    """

    role: Role
    values: Mapping[str, Fraction]
    offset: int = 0
    height: int | None = None
    pinned_root: bool = True
    martingale: bool = False

    @classmethod
    def fresh(
        cls,
        role: Role,
        offset: int = 0,
        height: int | None = None,
        pinned_root: bool = True,
        root: RationalLike = 1,
        martingale: bool = False,
    ) -> "Valuation":
        return cls(role, {ROOT: q(root)}, offset, height, pinned_root, martingale)

    def bets(self, x: str) -> bool:
        return bets_at(self.role, self.offset + len(x))

    def is_leaf(self, x: str) -> bool:
        return self.height is not None and len(x) >= self.height

    def get(self, x: str) -> Fraction:
        while True:
            v = self.values.get(x)
            if v is not None:
                return v
            if not x:
                return ZERO
            x = x[:-1]
            if self.bets(x):
                return ZERO

    def __getitem__(self, x: str) -> Fraction:
        return self.get(x)

    def items(self) -> list[tuple[str, Fraction]]:
        return sorted(self.values.items(), key=lambda kv: node_key(kv[0]))

    def check_node(self, x: str, mu: Measure = UNIFORM) -> Violation | None:
        """Constraint linking ``x`` with its two children."""
        if self.is_leaf(x):
            return None
        v, a, b = self.get(x), self.get(x + "0"), self.get(x + "1")
        if self.bets(x):
            if mu is UNIFORM:
                rhs = (a + b) / 2
            else:
                rhs = a * mu.p0(x) + b * mu.p1(x)
            if self.martingale and v != rhs:
                return Violation(x, "equality", f"{fmt(v)} != {fmt(rhs)}")
            if v < rhs:
                return Violation(x, "inequality", f"{fmt(v)} < {fmt(rhs)}")
        elif a != v or b != v:
            return Violation(x, "equality", f"children {fmt(a)}, {fmt(b)} differ from {fmt(v)}")
        return None

    def validate(self, mu: Measure = UNIFORM) -> list[Violation]:
        out: list[Violation] = []
        root = self.values.get(ROOT)
        if root is None:
            out.append(Violation(ROOT, "root", "root value not stored"))
        elif self.pinned_root and root != 1:
            out.append(Violation(ROOT, "root", f"root is {fmt(root)}, must be 1"))
        elif not self.pinned_root and root > 1:
            out.append(Violation(ROOT, "root", f"root is {fmt(root)} > 1"))
        scope = set()
        for x, v in self.values.items():
            if v < 0:
                out.append(Violation(x, "negative", fmt(v)))
            if self.height is not None and len(x) > self.height:
                out.append(Violation(x, "depth", f"beyond height {self.height}"))
                continue
            scope.add(x)
            if x:
                scope.add(x[:-1])
        for x in sorted(scope, key=node_key):
            bad = self.check_node(x, mu)
            if bad is not None:
                out.append(bad)
        return out

    def apply_increase(
        self, assignments: Mapping[str, RationalLike], mu: Measure = UNIFORM
    ) -> "Valuation":
        """Return a new snapshot with the given values raised.

        Assumes ``self`` is valid; then checking the touched nodes and their
        parents is equivalent to a full validation.
        """
        if not assignments:
            return self
        updates: dict[str, Fraction] = {}
        for x, raw in sorted(assignments.items(), key=lambda kv: node_key(kv[0])):
            val = q(raw)
            if self.height is not None and len(x) > self.height:
                raise StructureViolation(x, f"beyond height {self.height}")
            if x == ROOT:
                if self.pinned_root and val != 1:
                    raise StructureViolation(x, "root value is pinned at 1")
                if not self.pinned_root and val > 1:
                    raise StructureViolation(x, "root value may not exceed 1")
            cur = self.get(x)
            if val < cur:
                raise MonotonicityViolation(x, f"{fmt(val)} < current {fmt(cur)}")
            updates[x] = val
        values = dict(self.values)
        values.update(updates)
        new = replace(self, values=values)
        touched = set(updates)
        touched.update(x[:-1] for x in updates if x)
        for x in sorted(touched, key=node_key):
            bad = new.check_node(x, mu)
            if bad is not None:
                raise StructureViolation(x, f"{bad.kind}: {bad.detail}")
        return new

    def to_records(self) -> list[list[str]]:
        return [[x, fmt(v)] for x, v in self.items()]

    @classmethod
    def from_records(cls, records: Iterable[Iterable[str]], role: Role, **kw) -> "Valuation":
        values = {x: parse(v) for x, v in records}
        return cls(role, values, **kw)


def get_value(v: Valuation, x: str) -> Fraction:
    return v.get(x)


def validate(v: Valuation, mu: Measure = UNIFORM) -> list[Violation]:
    return v.validate(mu)


def apply_increase(v: Valuation, assignments: Mapping[str, RationalLike], mu: Measure = UNIFORM) -> Valuation:
    return v.apply_increase(assignments, mu)


def raise_minimal(
    v: Valuation, targets: Mapping[str, RationalLike], mu: Measure = UNIFORM
) -> dict[str, Fraction]:
    """Least extra mass that lifts ``targets`` and keeps ``v`` a supermartingale.

    Betting ancestors are raised to the (weighted) average of their
    children, non-betting ones to equality with both children.  The root may
    appear in the result; whether that is admissible is for the caller
    (``apply_increase``) to decide.
    """
    new: dict[str, Fraction] = {}
    heap: list[tuple[int, str]] = []

    def cur(x: str) -> Fraction:
        return new[x] if x in new else v.get(x)

    def put(x: str, val: Fraction) -> None:
        if val > cur(x):
            new[x] = val
            heapq.heappush(heap, (-len(x), x))

    for x, val in targets.items():
        put(x, q(val))
    while heap:
        _, x = heapq.heappop(heap)
        val = cur(x)
        if not v.bets(x) and not v.is_leaf(x):
            put(x + "0", val)
            put(x + "1", val)
        if not x:
            continue
        p = x[:-1]
        a, b = cur(p + "0"), cur(p + "1")
        if v.bets(p):
            put(p, (a + b) / 2 if mu is UNIFORM else a * mu.p0(p) + b * mu.p1(p))
        else:
            m = max(cur(p), a, b)
            put(p, m)
            put(p + "0", m)
            put(p + "1", m)
    return new


def min_nonincreasing_path(t0: Valuation, t1: Valuation, frm: str, to_depth: int) -> str:
    """Walk up from ``frm`` always stepping to the child where the betting
    player is smaller (ties go to ``0``); the non-betting player is constant
    across the two children, so neither value ever rises above its value at
    ``frm``."""
    x = frm
    while len(x) < to_depth:
        betting = [v for v in (t0, t1) if v.bets(x)]
        if betting:
            a = max(v.get(x + "0") for v in betting)
            b = max(v.get(x + "1") for v in betting)
            x += "1" if b < a else "0"
        else:
            x += "0"
    return x
