"""Mathematician's strategy for the finite-tree game.

The strategy makes at most two moves.  The opening puts ``c = 2^h/(2^h-1)``
on every leaf above B_3, B_5, ..., B_h.  If A later pushes one of its
supermartingales above 1 on the selected path (case A), every leaf but the
last one on the path gets ``c``.  If instead every opening leaf is
discredited (case B), the half above B_1 gets 3/2 with label 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .game import GameState, Move, Phase, leaf_status, thresholds
from .rational import ONE, ZERO
from .tree import leaves_above, min_nonincreasing_path

THREE_HALVES = Fraction(3, 2)


@dataclass(frozen=True)
class SelectedPath:
    """Spine A_0..A_h of the strategy; B_j is the brother of A_j."""

    h: int
    leaf: str

    @classmethod
    def all_left(cls, h: int) -> "SelectedPath":
        return cls(h, "0" * h)

    def A(self, j: int) -> str:
        return self.leaf[:j]

    def B(self, j: int) -> str:
        if not 1 <= j <= self.h:
            raise IndexError(j)
        flip = "1" if self.leaf[j - 1] == "0" else "0"
        return self.leaf[: j - 1] + flip

    @property
    def nodes(self) -> list[str]:
        return [self.A(j) for j in range(self.h + 1)]

    @property
    def brothers(self) -> list[str]:
        return [self.B(j) for j in range(1, self.h + 1)]


@dataclass(frozen=True)
class Case:
    kind: str  # none | A | B
    index: int | None = None


NO_CASE = Case("none")


def _sel(h: int, sel: SelectedPath | None) -> SelectedPath:
    return sel if sel is not None else SelectedPath.all_left(h)


def opening_leaves(h: int, sel: SelectedPath | None = None) -> list[str]:
    sel = _sel(h, sel)
    out: list[str] = []
    for j in range(3, h + 1, 2):
        out.extend(leaves_above(sel.B(j), h))
    return out


def averaged(h: int, leaf_values: dict[str, Fraction]) -> tuple[dict[str, Fraction], Fraction]:
    """Every non-root node gets the mean of all leaves above it; returns
    those values and the would-be root mean."""
    out = dict(leaf_values)
    level = leaf_values
    for _ in range(h - 1):
        up: dict[str, Fraction] = {}
        for x, v in level.items():
            p = x[:-1]
            up[p] = up.get(p, ZERO) + v / 2
        out.update(up)
        level = up
    root_mean = sum(level.values(), ZERO) / 2
    return out, root_mean


def _placement(s: GameState, new_leaves: dict[str, Fraction], labels: dict[str, int], phase: Phase):
    h = s.h
    leaves = {x: v for x, v in s.t.values.items() if len(x) == h}
    for x, v in new_leaves.items():
        leaves[x] = max(leaves.get(x, ZERO), v)
    values, root_mean = averaged(h, leaves)
    assert root_mean <= 1, f"placement overspends: root mean {root_mean}"
    changed = {x: v for x, v in values.items() if v != s.t.get(x)}
    return Move.build("M", {"t": changed}, labels, phase), root_mean


def first_move(h: int, root_parity: int = 0, sel: SelectedPath | None = None) -> Move:
    s = GameState.fresh(h, root_parity)
    c = thresholds(h).c
    leaves = opening_leaves(h, sel)
    move, _ = _placement(s, {x: c for x in leaves}, {x: 1 for x in leaves}, Phase.STAGE1)
    return move


def opening_mass(h: int) -> Fraction:
    """Root mean of the opening placement."""
    c = thresholds(h).c
    return c * len(opening_leaves(h)) / 2**h


def detect_case(s: GameState, sel: SelectedPath | None = None) -> Case:
    sel = _sel(s.h, sel)
    limit = thresholds(s.h).m1
    for i in range(1, s.h + 1):
        x = sel.A(i)
        if s.t0.get(x) > limit or s.t1.get(x) > limit:
            return Case("A", i)
    opening = opening_leaves(s.h, sel)
    if all(leaf_status(s, x).kind == "discredited" for x in opening):
        bettor = s.valuation(s.root_bettor)
        for j in range(3, s.h + 1, 2):
            b = sel.B(j)
            assert bettor.get(b) > limit, (
                f"case B without the root bettor above 1 at B_{j}={b!r}: engine bug"
            )
        return Case("B")
    return NO_CASE


def case_a_move(s: GameState, sel: SelectedPath | None = None) -> Move:
    sel = _sel(s.h, sel)
    c = thresholds(s.h).c
    new = {x: c for x in s.leaves() if x != sel.leaf}
    labels = {x: 1 for x in new if x not in s.labels}
    move, root_mean = _placement(s, new, labels, Phase.DONE_A)
    assert root_mean == 1
    return move


def path_lower_bounds(h: int, root_parity: int = 0) -> tuple[list[Fraction], Fraction]:
    """Lower bounds for the root bettor along A_{h-1}, ..., A_1 when it
    exceeds 1 at every B_j (j odd >= 3), and the resulting cap at B_1.

    The root bettor bets at even local depths whatever the global parity, so
    ``root_parity`` only decides which of t0/t1 the numbers refer to.
    """
    thresholds(h)
    bound = ZERO  # at A_h
    out: list[Fraction] = []
    for j in range(h, 1, -1):
        # step from A_j down to A_{j-1}
        if (j - 1) % 2 == 0:
            bound = (bound + ONE) / 2  # averaged with B_j > 1
        out.append(bound)
    cap = 2 - bound
    return out, cap


def case_b_move(s: GameState, sel: SelectedPath | None = None) -> Move:
    sel = _sel(s.h, sel)
    upper = leaves_above(sel.B(1), s.h)
    move, root_mean = _placement(
        s, {x: THREE_HALVES for x in upper}, {x: 2 for x in upper if x not in s.labels}, Phase.DONE_B
    )
    assert root_mean <= 1
    return move


def case_a_witness(s: GameState, sel: SelectedPath | None = None) -> str:
    """Leaf reached from the root along the non-increasing path; after the
    case A move it must be a funded leaf other than the spine's end."""
    sel = _sel(s.h, sel)
    leaf = min_nonincreasing_path(s.t0, s.t1, "", s.h)
    th = thresholds(s.h)
    assert leaf != sel.leaf, "non-increasing path ran along the spine"
    assert s.labels.get(leaf) == 1 and s.t.get(leaf) >= th.M1
    assert s.path_max(leaf) <= th.m1
    return leaf


def case_b_witness(s: GameState, sel: SelectedPath | None = None) -> str:
    sel = _sel(s.h, sel)
    leaf = min_nonincreasing_path(s.t0, s.t1, sel.B(1), s.h)
    th = thresholds(s.h)
    assert s.path_max(leaf) <= th.m2, f"path max {s.path_max(leaf)} > {th.m2}"
    assert s.labels.get(leaf) == 2 and s.t.get(leaf) == th.M2
    return leaf


@dataclass(frozen=True)
class StrategyM:
    sel: SelectedPath | None = None

    def respond(self, s: GameState) -> Move | None:
        if s.phase is Phase.INIT:
            return first_move(s.h, s.root_parity, self.sel)
        if s.phase is Phase.STAGE1:
            case = detect_case(s, self.sel)
            if case.kind == "A":
                return case_a_move(s, self.sel)
            if case.kind == "B":
                return case_b_move(s, self.sel)
        return None
