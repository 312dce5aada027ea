"""The game on a finite tree of odd height: thresholds, moves, leaf labels
and the referee."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .rational import ONE, ZERO, RationalLike, fmt, parse, q
from .tree import ROOT, Role, RuleViolation, StructureViolation, Valuation, node_key, prefixes

TARGETS = ("t", "t0", "t1")


class InvalidHeight(ValueError):
    pass


class LabelViolation(RuleViolation):
    kind = "LabelViolation"


class ProtocolViolation(RuleViolation):
    """Wrong player writing a valuation, or labels attached by A."""

    kind = "ProtocolViolation"


def check_height(h) -> int:
    if not isinstance(h, int) or isinstance(h, bool) or h < 3 or h % 2 == 0:
        raise InvalidHeight(f"height must be an odd integer >= 3, got {h!r}")
    return h


@dataclass(frozen=True)
class Thresholds:
    h: int
    M1: Fraction
    m1: Fraction
    M2: Fraction
    m2: Fraction

    @property
    def c(self) -> Fraction:
        return Fraction(2**self.h, 2**self.h - 1)

    def M(self, label: int) -> Fraction:
        return self.M1 if label == 1 else self.M2

    def m(self, label: int) -> Fraction:
        return self.m1 if label == 1 else self.m2


@lru_cache(maxsize=None)
def thresholds(h: int) -> Thresholds:
    check_height(h)
    return Thresholds(
        h=h,
        M1=1 + Fraction(1, 2**h - 1),
        m1=ONE,
        M2=Fraction(3, 2),
        m2=1 + Fraction(1, 2 ** ((h - 1) // 2)),
    )


class Phase(str, Enum):
    INIT = "init"
    STAGE1 = "stage1"
    DONE_A = "done-a"
    DONE_B = "done-b"


@dataclass(frozen=True)
class LeafStatus:
    kind: str  # unlabeled | winning | pending | discredited
    label: int | None = None

    def __str__(self):
        return self.kind if self.label is None else f"{self.kind}({self.label})"


UNLABELED = LeafStatus("unlabeled")


@dataclass(frozen=True)
class Move:
    mover: str
    assignments: tuple[tuple[str, str, Fraction], ...]
    labels: tuple[tuple[str, int], ...] = ()
    phase: str | None = None

    @classmethod
    def build(cls, mover, assignments: Mapping[str, Mapping[str, RationalLike]], labels=(), phase=None):
        flat = []
        for target in TARGETS:
            for x, v in (assignments.get(target) or {}).items():
                flat.append((target, x, q(v)))
        flat.sort(key=lambda r: (TARGETS.index(r[0]), len(r[1]), r[1]))
        labs = tuple(sorted(((x, int(i)) for x, i in dict(labels).items()), key=lambda r: node_key(r[0])))
        return cls(mover, tuple(flat), labs, None if phase is None else str(getattr(phase, "value", phase)))

    def by_target(self) -> dict[str, dict[str, Fraction]]:
        out: dict[str, dict[str, Fraction]] = {}
        for target, x, v in self.assignments:
            out.setdefault(target, {})[x] = v
        return out

    def to_record(self, index: int) -> dict:
        rec = {
            "kind": "move",
            "index": index,
            "mover": self.mover,
            "assignments": [[target, x, fmt(v)] for target, x, v in self.assignments],
            "labels": [[x, i] for x, i in self.labels],
        }
        if self.phase is not None:
            rec["phase"] = self.phase
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Move":
        # keeps the recorded order so that replays see exactly what was written
        return cls(
            rec["mover"],
            tuple((t, x, parse(v)) for t, x, v in rec["assignments"]),
            tuple((x, int(i)) for x, i in rec.get("labels", [])),
            rec.get("phase"),
        )


@dataclass(frozen=True)
class GameState:
    h: int
    root_parity: int
    t: Valuation
    t0: Valuation
    t1: Valuation
    labels: Mapping[str, int] = field(default_factory=dict)
    phase: Phase = Phase.INIT
    move_log: tuple[Move, ...] = ()
    embedded: bool = False

    @classmethod
    def fresh(cls, h: int, root_parity: int = 0, embedded: bool = False) -> "GameState":
        """New game.  ``embedded`` games live inside the infinite tree: the
        adversary's local root starts at 0 and may later be raised up to 1 by
        projection of global moves."""
        check_height(h)
        root_parity %= 2
        a_root = ZERO if embedded else ONE
        mk = lambda role, root: Valuation.fresh(role, root_parity, h, pinned_root=not embedded, root=root)
        return cls(
            h,
            root_parity,
            Valuation.fresh(Role.FULL, root_parity, h),
            mk(Role.EVEN, a_root),
            mk(Role.ODD, a_root),
            embedded=embedded,
        )

    @property
    def thresholds(self) -> Thresholds:
        return thresholds(self.h)

    @property
    def root_bettor(self) -> str:
        """Which of A's supermartingales bets at this tree's root."""
        return "t1" if self.root_parity == 0 else "t0"

    def valuation(self, target: str) -> Valuation:
        return getattr(self, target)

    def path_max(self, x: str) -> Fraction:
        t0, t1 = self.t0, self.t1
        return max(max(t0.get(p), t1.get(p)) for p in prefixes(x))

    def leaves(self) -> list[str]:
        return [format(i, f"0{self.h}b") for i in range(2**self.h)]


def submit_move(
    s: GameState,
    mover: str,
    assignments: Mapping[str, Mapping[str, RationalLike]],
    labels: Mapping[str, int] | None = None,
    phase: Phase | str | None = None,
) -> GameState:
    return apply_move(s, Move.build(mover, assignments, labels or {}, phase))


def apply_move(s: GameState, move: Move) -> GameState:
    if move.mover not in ("M", "A"):
        raise ProtocolViolation(None, f"unknown mover {move.mover!r}")
    allowed = ("t",) if move.mover == "M" else ("t0", "t1")
    grouped: dict[str, dict[str, Fraction]] = {}
    for target, x, v in move.assignments:
        if target not in allowed:
            raise ProtocolViolation(x, f"{move.mover} may not write {target}")
        if x in grouped.setdefault(target, {}):
            raise StructureViolation(x, f"{target} assigned twice in one move")
        grouped[target][x] = v
    changes = {target: s.valuation(target).apply_increase(vals) for target, vals in grouped.items()}

    labels = s.labels
    if move.labels:
        if move.mover != "M":
            raise ProtocolViolation(None, "only M attaches labels")
        labels = dict(s.labels)
        for x, i in move.labels:
            if len(x) != s.h or set(x) - {"0", "1"}:
                raise LabelViolation(x, "labels go on leaves only")
            if i not in (1, 2):
                raise LabelViolation(x, f"label must be 1 or 2, got {i}")
            if x in labels:
                raise LabelViolation(x, f"leaf already carries label {labels[x]}")
            labels[x] = i

    phase = s.phase if move.phase is None or move.mover != "M" else _phase_of(move.phase, s.phase)
    return replace(s, **changes, labels=labels, phase=phase, move_log=s.move_log + (move,))


def _phase_of(tag: str, current: Phase) -> Phase:
    try:
        return Phase(tag)
    except ValueError:
        return current


def leaf_status(s: GameState, leaf: str) -> LeafStatus:
    if len(leaf) != s.h:
        raise ValueError(f"{leaf!r} is not a leaf of a height-{s.h} tree")
    label = s.labels.get(leaf)
    if label is None:
        return UNLABELED
    th = s.thresholds
    if s.path_max(leaf) > th.m(label):
        return LeafStatus("discredited", label)
    if s.t.get(leaf) >= th.M(label):
        return LeafStatus("winning", label)
    return LeafStatus("pending", label)


def current_winner(s: GameState) -> str | None:
    """Leftmost winning leaf, by a depth-first search that prunes subtrees
    where A's path maximum already exceeds every allowance or M has nothing."""
    th = s.thresholds
    cap = max(th.m1, th.m2)
    t, t0, t1, h, labels = s.t, s.t0, s.t1, s.h, s.labels
    stack = [(ROOT, ZERO)]
    while stack:
        x, pm = stack.pop()
        pm = max(pm, t0.get(x), t1.get(x))
        if pm > cap:
            continue
        if len(x) == h:
            label = labels.get(x)
            if label is not None and pm <= th.m(label) and t.get(x) >= th.M(label):
                return x
            continue
        if x and t.get(x) == 0:
            continue
        stack.append((x + "1", pm))
        stack.append((x + "0", pm))
    return None


def labeled_statuses(s: GameState) -> dict[str, LeafStatus]:
    return {x: leaf_status(s, x) for x in sorted(s.labels)}


@dataclass(frozen=True)
class Verdict:
    winner: str  # "M" or "A"
    leaf: str | None = None
    label: int | None = None

    @property
    def m_wins(self) -> bool:
        return self.winner == "M"

    def __str__(self):
        if self.m_wins:
            return f"M_wins({self.leaf!r}, {self.label})"
        return "A_wins"

    def to_record(self) -> dict:
        return {"kind": "verdict", "winner": self.winner, "leaf": self.leaf, "label": self.label}


def referee_final(s: GameState) -> Verdict:
    leaf = current_winner(s)
    if leaf is None:
        return Verdict("A")
    return Verdict("M", leaf, s.labels[leaf])


def replay(s: GameState) -> GameState:
    out = GameState.fresh(s.h, s.root_parity, s.embedded)
    for move in s.move_log:
        out = apply_move(out, move)
    return out


def full_violations(s: GameState) -> list:
    """Complete (not incremental) validation of all three valuations."""
    out = []
    for target in TARGETS:
        out.extend((target, v) for v in s.valuation(target).validate())
    return out
