"""Adversary drivers for the finite-tree game.

Every adversary emits only moves that ``apply_move`` accepts: scripted ones
compute the least mass consistent with the supermartingale rules (via
``raise_minimal``) and halt if their script is infeasible, the random one
resamples until a proposal is admissible.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from .game import GameState, Move, apply_move, leaf_status
from .rational import ONE, fmt, q
from .strategy import SelectedPath
from .tree import RuleViolation, Valuation, prefixes, raise_minimal, subtree

KINDS = ("passive", "case-a", "case-b", "random", "pattern")


@dataclass(frozen=True)
class AdversaryConfig:
    kind: str = "passive"
    seed: int = 0
    budget: int = 50
    delta: Fraction = Fraction(1, 8)
    target: int = 1  # A_i for case-a
    role: str = "t1"  # which supermartingale case-a pushes
    grid: Fraction = Fraction(1, 8)  # random increments are multiples of this

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}")
        if self.budget < 0:
            raise ValueError("budget must be finite and nonnegative")
        if q(self.delta) <= 0 or q(self.grid) <= 0:
            raise ValueError("delta and grid must be positive")
        if self.role not in ("t0", "t1"):
            raise ValueError(f"role must be t0 or t1, got {self.role!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta"] = fmt(self.delta)
        d["grid"] = fmt(self.grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AdversaryConfig":
        d = dict(d)
        for k in ("delta", "grid"):
            if k in d:
                d[k] = q(d[k])
        return cls(**d)


def no_shortcut_sequence(n: int) -> int:
    """n-th term (1-based) of 0100010101000100...: parity of the 2-adic
    valuation of n."""
    if n < 1:
        raise ValueError("n must be positive")
    return ((n & -n).bit_length() - 1) & 1


def _closure_move(s: GameState, role: str, targets: dict) -> Move | None:
    """Minimal admissible move lifting ``role`` to ``targets``, or None."""
    batch = raise_minimal(s.valuation(role), targets)
    if not batch:
        return None
    move = Move.build("A", {role: batch})
    try:
        apply_move(s, move)
    except RuleViolation:
        return None
    return move


class Adversary:
    def __init__(self, cfg: AdversaryConfig):
        self.cfg = cfg
        self.moves = 0
        self.halted = False

    def next_move(self, s: GameState) -> Move | None:
        if self.halted or self.moves >= self.cfg.budget:
            self.halted = True
            return None
        move = self._propose(s)
        if move is None:
            self.halted = True
        else:
            self.moves += 1
        return move

    def _propose(self, s: GameState) -> Move | None:
        return None


class Passive(Adversary):
    pass


class CaseAScripted(Adversary):
    """Pushes ``cfg.role`` to 1 + delta at A_target once, then halts.

    Infeasible targets (the role that does not bet at the root cannot
    exceed 1 at A_1) make it halt without moving.
    """

    def _propose(self, s):
        if self.moves:
            return None
        sel = SelectedPath.all_left(s.h)
        if not 1 <= self.cfg.target <= s.h:
            return None
        return _closure_move(s, self.cfg.role, {sel.A(self.cfg.target): ONE + self.cfg.delta})


class CaseBScripted(Adversary):
    """For j = 3, 5, ..., h puts 1 + delta on the whole subtree above B_j,
    using the supermartingale that bets at the tree root."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.j = 3

    def _propose(self, s):
        sel = SelectedPath.all_left(s.h)
        role = s.root_bettor
        level = ONE + self.cfg.delta
        while self.j <= s.h:
            b = sel.B(self.j)
            self.j += 2
            targets = {x: level for x in subtree(b, s.h)}
            batch = raise_minimal(s.valuation(role), targets)
            if not batch:
                continue
            move = Move.build("A", {role: batch})
            try:
                apply_move(s, move)
            except RuleViolation:
                return None
            return move
        return None

    @property
    def finished(self) -> bool:
        return self.halted


class RandomAdversary(Adversary):
    """Grid-valued monotone increments, resampled until admissible."""

    attempts = 64

    def __init__(self, cfg):
        super().__init__(cfg)
        self.rng = random.Random(cfg.seed)

    def _random_node(self, h: int) -> str:
        rng = self.rng
        depth = rng.randint(1, h)
        if rng.random() < 0.5:
            # near the spine: A_depth or B_depth, where the strategy looks
            return "0" * (depth - 1) + rng.choice("01")
        return "".join(rng.choice("01") for _ in range(depth))

    def _propose(self, s):
        rng = self.rng
        for _ in range(self.attempts):
            batches = {}
            for role in rng.sample(("t0", "t1"), rng.choice((1, 1, 1, 2))):
                v: Valuation = s.valuation(role)
                x = self._random_node(s.h)
                new = v.get(x) + self.cfg.grid * rng.randint(1, 4)
                if rng.random() < 0.25:
                    # occasionally a raw proposal; only survives if admissible as is
                    batch = {x: new}
                else:
                    batch = raise_minimal(v, {x: new})
                if batch:
                    batches[role] = batch
            if not batches:
                continue
            move = Move.build("A", batches)
            try:
                apply_move(s, move)
            except RuleViolation:
                continue
            return move
        return None


class PatternAdversary(Adversary):
    """Discredits M's funded leaves left to right; the k-th one is hit by the
    supermartingale betting at the leaf's parent when the k-th symbol of the
    no-shortcut sequence is 0, by the other one when it is 1."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.k = 0

    def _propose(self, s):
        for leaf in sorted(s.labels):
            if leaf_status(s, leaf).kind == "discredited":
                continue
            self.k += 1
            first = parent_bettor(s, leaf)
            other = "t0" if first == "t1" else "t1"
            order = (first, other) if no_shortcut_sequence(self.k) == 0 else (other, first)
            for role in order:
                move = _closure_move(s, role, {leaf: ONE + self.cfg.delta})
                if move is not None:
                    return move
            return None
        return None


def parent_bettor(s: GameState, leaf: str) -> str:
    return "t0" if s.t0.bets(leaf[:-1]) else "t1"


_CLASSES = {
    "passive": Passive,
    "case-a": CaseAScripted,
    "case-b": CaseBScripted,
    "random": RandomAdversary,
    "pattern": PatternAdversary,
}


def make_adversary(cfg: AdversaryConfig) -> Adversary:
    return _CLASSES[cfg.kind](cfg)


def next_move(adv: Adversary, s: GameState) -> Move | None:
    return adv.next_move(s)


# --------------------------------------------------------------------------
# the informal left-to-right game


@dataclass
class PatternRun:
    h: int
    steps: int
    premature: list[tuple[int, str]]  # (step, leaf discredited before funding)
    roles: list[str]
    stuck_at: int | None = None  # step where A had no admissible continuation


def informal_pattern_run(h: int, steps: int | None = None, delta: Fraction | None = None) -> PatternRun:
    """M funds leaves one at a time from the left; after each, A discredits
    that leaf following the no-shortcut sequence.  Records every leaf that
    got discredited before M reached it."""
    s = GameState.fresh(h)
    leaves = s.leaves()
    steps = len(leaves) if steps is None else steps
    delta = Fraction(1, 2 ** (2 * h)) if delta is None else q(delta)
    premature: list[tuple[int, str]] = []
    roles: list[str] = []
    t = {"t0": s.t0, "t1": s.t1}
    for k in range(1, steps + 1):
        leaf = leaves[k - 1]
        first = "t0" if t["t0"].bets(leaf[:-1]) else "t1"
        role = first if no_shortcut_sequence(k) == 0 else ("t0" if first == "t1" else "t1")
        try:
            t[role] = t[role].apply_increase(raise_minimal(t[role], {leaf: ONE + delta}))
        except RuleViolation:
            return PatternRun(h, k - 1, premature, roles, stuck_at=k)
        roles.append(role)
        seen = {x for _, x in premature}
        for later in leaves[k:]:
            if later in seen:
                continue
            if any(max(t["t0"].get(p), t["t1"].get(p)) > 1 for p in prefixes(later)):
                premature.append((k, later))
    return PatternRun(h, steps, premature, roles)
