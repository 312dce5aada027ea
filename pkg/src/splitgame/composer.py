"""Composition of finite games on the infinite tree.

Each stage is a finite game rooted at a node of the infinite tree.  A plays
on the infinite tree; its values are divided by the stage's A-scale to give
the stage-local picture.  M's stage-local values are multiplied by the
stage's M-scale.  A stage's winning leaf (the candidate) roots the next
stage: same height on label 1, two more on label 2.  When the candidate is
discredited everything grown from it is discarded and frozen.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .adversaries import Adversary, AdversaryConfig, make_adversary
from .game import GameState, Move, Phase, apply_move, check_height, current_winner, leaf_status, thresholds
from .rational import ONE, fmt
from .strategy import StrategyM, case_a_witness, case_b_witness
from .tree import ROOT, Role, RuleViolation, Valuation, node_key, prefixes, raise_minimal

# decimal guard above prod_{k>=1} (1 + 2^-k) = 2.38423...
ALLOWANCE_GUARD = Fraction(23843, 10000)


class SessionExhausted(RuntimeError):
    pass


@dataclass
class StageRecord:
    index: int
    root: str
    h: int
    m_scale: Fraction
    a_scale: Fraction
    game: GameState
    parent: int | None = None
    label_from_parent: int | None = None
    status: str = "active"  # active | discarded
    candidate: str | None = None
    candidate_label: int | None = None
    candidate_changes: int = 0

    @property
    def root_parity(self) -> int:
        return len(self.root) % 2

    def contains(self, y: str) -> bool:
        return y.startswith(self.root) and len(y) - len(self.root) <= self.h

    def spawn_record(self) -> dict:
        return {
            "kind": "stage-spawn",
            "index": self.index,
            "parent": self.parent,
            "root": self.root,
            "h": self.h,
            "label": self.label_from_parent,
            "m_scale": fmt(self.m_scale),
            "a_scale": fmt(self.a_scale),
        }


@dataclass
class BranchReport:
    omega_prefix: str
    t_along: list[Fraction]
    a_max_along: Fraction
    stage_labels: list[int]
    heights: list[int]
    growth: Fraction
    threshold_product: Fraction
    allowance_product: Fraction

    def to_record(self) -> dict:
        return {
            "kind": "report",
            "omega_prefix": self.omega_prefix,
            "t_along": [fmt(v) for v in self.t_along],
            "a_max_along": fmt(self.a_max_along),
            "stage_labels": list(self.stage_labels),
            "heights": list(self.heights),
            "growth": fmt(self.growth),
            "threshold_product": fmt(self.threshold_product),
            "allowance_product": fmt(self.allowance_product),
        }

    @property
    def ok(self) -> bool:
        return self.growth >= self.threshold_product and self.a_max_along <= self.allowance_product


class ComposedAdversary:
    """Runs stage-local adversaries and lifts their moves to the infinite tree.

    Scripted kinds work on the shallowest active stage whose script is not
    finished, so a parent's script completes before its subtree matters.
    The random kind picks an active stage at random and resamples until the
    lifted move is admissible globally.
    """

    attempts = 32

    def __init__(self, cfg: AdversaryConfig):
        self.cfg = cfg
        self.local: dict[int, Adversary] = {}
        self.moves = 0
        self.rng = random.Random(cfg.seed)

    def _local(self, st: StageRecord) -> Adversary:
        adv = self.local.get(st.index)
        if adv is None:
            cfg = self.cfg
            if cfg.kind == "random":
                seed = cfg.seed * 1_000_003 + st.index
                cfg = AdversaryConfig("random", seed, 10**9, cfg.delta, cfg.target, cfg.role, cfg.grid)
            adv = self.local[st.index] = make_adversary(cfg)
        return adv

    def lift(self, session: "Session", st: StageRecord, move: Move) -> dict[str, dict[str, Fraction]]:
        out = {}
        for role, vals in move.by_target().items():
            targets = {st.root + x: v * st.a_scale for x, v in vals.items()}
            out[role] = raise_minimal(session.valuation(role), targets)
        return out

    def next_batch(self, session: "Session") -> dict | None:
        kind = self.cfg.kind
        if kind == "passive" or not session.chain:
            return None
        active = [session.stages[i] for i in session.chain]
        if kind == "random":
            if self.moves >= self.cfg.budget:
                return None
            for _ in range(self.attempts):
                st = self.rng.choice(active)
                adv = self._local(st)
                move = adv._propose(st.game)
                if move is None:
                    continue
                batch = self.lift(session, st, move)
                if session.admissible(batch):
                    self.moves += 1
                    return batch
            return None
        for st in active:
            adv = self._local(st)
            move = adv.next_move(st.game)
            if move is not None:
                self.moves += 1
                return self.lift(session, st, move)
        return None


class Session:
    def __init__(
        self,
        initial_h: int = 3,
        adversary: AdversaryConfig | None = None,
        max_stages: int = 1,
        strategy: StrategyM | None = None,
        check: bool = True,
    ):
        check_height(initial_h)
        if max_stages < 0:
            raise ValueError("max_stages must be nonnegative")
        self.initial_h = initial_h
        self.max_stages = max_stages
        self.cfg = adversary or AdversaryConfig("passive")
        self.adversary = ComposedAdversary(self.cfg)
        self.strategy = strategy or StrategyM()
        self.check = check
        self.t = Valuation.fresh(Role.FULL)
        self.t0 = Valuation.fresh(Role.EVEN)
        self.t1 = Valuation.fresh(Role.ODD)
        self.stages: list[StageRecord] = []
        self.chain: list[int] = []
        self.exhausted = False
        self.steps = 0
        self.rejected = 0
        self.records: list[dict] = [
            {
                "kind": "session",
                "initial_h": initial_h,
                "max_stages": max_stages,
                "adversary": self.cfg.to_dict(),
            }
        ]
        if max_stages > 0:
            self._spawn(None, ROOT, initial_h, ONE, ONE, None)

    # -- helpers -----------------------------------------------------------

    def valuation(self, role: str) -> Valuation:
        return getattr(self, role)

    def admissible(self, batch: dict) -> bool:
        try:
            for role, vals in batch.items():
                self.valuation(role).apply_increase(vals)
        except RuleViolation:
            return False
        return True

    def _record_move(self, mover: str, batch: dict, stage: int | None = None, labels=()) -> None:
        rec = {
            "kind": "global-move",
            "index": sum(1 for r in self.records if r["kind"] == "global-move"),
            "mover": mover,
            "assignments": [
                [role, x, fmt(v)]
                for role in ("t", "t0", "t1")
                for x, v in sorted(batch.get(role, {}).items(), key=lambda kv: node_key(kv[0]))
            ],
        }
        if stage is not None:
            rec["stage"] = stage
            rec["labels"] = [[x, i] for x, i in labels]
        self.records.append(rec)

    def _projection(self, st: StageRecord, changed: dict | None) -> dict[str, dict[str, Fraction]]:
        out: dict[str, dict[str, Fraction]] = {}
        r, a = st.root, st.a_scale
        for role in ("t0", "t1"):
            g = self.valuation(role)
            loc = st.game.valuation(role)
            nodes = g.values if changed is None else changed.get(role, {})
            picked = {y for y in nodes if st.contains(y)}
            picked.add(r)
            vals = {}
            for y in picked:
                x = y[len(r):]
                val = g.get(y) / a
                if val != loc.get(x):
                    vals[x] = val
            if vals:
                out[role] = vals
        return out

    def _react(self, st: StageRecord) -> bool:
        move = self.strategy.respond(st.game)
        if move is None:
            return False
        st.game = apply_move(st.game, move)
        lifted = {st.root + x: v * st.m_scale for _, x, v in move.assignments}
        try:
            self.t = self.t.apply_increase(lifted)
        except RuleViolation as exc:  # pragma: no cover - would be an engine bug
            raise AssertionError(f"lifted M move breaks the composite: {exc}") from exc
        self._record_move("M", {"t": lifted}, st.index, move.labels)
        if self.check and st.game.phase is Phase.DONE_A and move.phase == Phase.DONE_A.value:
            case_a_witness(st.game, self.strategy.sel)
        elif self.check and st.game.phase is Phase.DONE_B and move.phase == Phase.DONE_B.value:
            case_b_witness(st.game, self.strategy.sel)
        return True

    def _spawn(self, parent: int | None, root: str, h: int, m_scale, a_scale, label) -> None:
        game = GameState.fresh(h, len(root), embedded=True)
        st = StageRecord(len(self.stages), root, h, m_scale, a_scale, game, parent, label)
        self.stages.append(st)
        self.chain.append(st.index)
        self.records.append(st.spawn_record())
        proj = self._projection(st, None)
        if proj:
            st.game = apply_move(st.game, Move.build("A", proj))
        # opening, then at most one reaction to what A already has in this subtree
        self._react(st)
        self._react(st)
        self._update_candidate(len(self.chain) - 1)

    def _drop_candidate(self, pos: int) -> None:
        st = self.stages[self.chain[pos]]
        dropped = self.chain[pos + 1:]
        for idx in dropped:
            self.stages[idx].status = "discarded"
        del self.chain[pos + 1:]
        self.records.append(
            {"kind": "candidate-lost", "stage": st.index, "leaf": st.candidate, "discarded": dropped}
        )
        self.records.extend({"kind": "stage-discard", "index": idx} for idx in dropped)
        st.candidate = st.candidate_label = None

    def _update_candidate(self, pos: int) -> None:
        st = self.stages[self.chain[pos]]
        if st.candidate is not None and leaf_status(st.game, st.candidate).kind == "discredited":
            self._drop_candidate(pos)
        if st.candidate is None:
            leaf = current_winner(st.game)
            if leaf is None:
                return
            st.candidate, st.candidate_label = leaf, st.game.labels[leaf]
            st.candidate_changes += 1
            self.records.append(
                {"kind": "candidate", "stage": st.index, "leaf": leaf, "label": st.candidate_label}
            )
        if pos == len(self.chain) - 1 and len(self.chain) < self.max_stages:
            lab = st.candidate_label
            th = thresholds(st.h)
            self._spawn(
                st.index,
                st.root + st.candidate,
                st.h if lab == 1 else st.h + 2,
                st.m_scale * th.M(lab),
                st.a_scale * th.m(lab),
                lab,
            )

    # -- public ------------------------------------------------------------

    def step(self) -> "Session":
        if self.exhausted:
            raise SessionExhausted("adversary has halted")
        batch = self.adversary.next_batch(self)
        if batch is None:
            self.exhausted = True
            self.records.append({"kind": "halt", "steps": self.steps})
            return self
        return self.submit(batch)

    def submit(self, batch: dict[str, dict[str, Fraction]]) -> "Session":
        """Apply one adversary batch given in global coordinates, then let
        every active stage react, shallowest first."""
        self.steps += 1
        if set(batch) - {"t0", "t1"}:
            raise ValueError("adversary batches may only touch t0 and t1")
        try:
            new = {role: self.valuation(role).apply_increase(vals) for role, vals in batch.items()}
        except RuleViolation as exc:
            self.rejected += 1
            self.records.append({"kind": "rejected", "step": self.steps, "reason": str(exc)})
            return self
        for role, v in new.items():
            setattr(self, role, v)
        self._record_move("A", batch)
        pos = 0
        while pos < len(self.chain):
            st = self.stages[self.chain[pos]]
            proj = self._projection(st, batch)
            if proj:
                st.game = apply_move(st.game, Move.build("A", proj))
            self._react(st)
            self._update_candidate(pos)
            pos += 1
        return self

    def run(self, max_steps: int = 10_000) -> "Session":
        for _ in range(max_steps):
            if self.exhausted:
                break
            self.step()
        return self

    def emit(self) -> list[dict]:
        return self.records + [branch_report(self).to_record()]


def new_session(initial_h: int = 3, adversary: AdversaryConfig | None = None, max_stages: int = 1) -> Session:
    return Session(initial_h, adversary, max_stages)


def step(session: Session) -> Session:
    return session.step()


def assemble_global(session: Session) -> tuple[Valuation, Valuation, Valuation]:
    """Rebuild M's composite supermartingale from the stage games and check
    it against the incrementally maintained one; all three must validate."""
    values: dict[str, Fraction] = {ROOT: ONE}
    owner: dict[str, int] = {}
    for st in session.stages:
        for x, v in st.game.t.values.items():
            if not x:
                continue
            y = st.root + x
            assert y not in owner, f"stages {owner[y]} and {st.index} overlap at {y!r}"
            owner[y] = st.index
            values[y] = v * st.m_scale
    t = Valuation(Role.FULL, values)
    assert dict(t.values) == dict(session.t.values), "stage games disagree with the composite t"
    for name, v in (("t", t), ("t0", session.t0), ("t1", session.t1)):
        bad = v.validate()
        assert not bad, f"composite {name} invalid: {bad[:3]}"
    return t, session.t0, session.t1


def branch_report(session: Session) -> BranchReport:
    chain = [session.stages[i] for i in session.chain]
    if not chain:
        return BranchReport("", [ONE], ONE, [], [], ONE, ONE, ONE)
    last = chain[-1]
    omega = last.root + (last.candidate or "")
    t_along = [session.t.get(st.root) for st in chain]
    completed = [st for st in chain if st.candidate is not None]
    if last.candidate is not None:
        t_along.append(session.t.get(omega))
    a_max = max(max(session.t0.get(p), session.t1.get(p)) for p in prefixes(omega))
    th_prod, al_prod = ONE, ONE
    for st in completed:
        th = thresholds(st.h)
        th_prod *= th.M(st.candidate_label)
        al_prod *= th.m(st.candidate_label)
    report = BranchReport(
        omega,
        t_along,
        a_max,
        [st.candidate_label for st in completed],
        [st.h for st in chain],
        t_along[-1],
        th_prod,
        al_prod,
    )
    assert all(a <= b for a, b in zip(t_along, t_along[1:])), "t decreases along the branch"
    assert a_max <= al_prod, f"A path max {a_max} above allowance product {al_prod}"
    assert a_max < ALLOWANCE_GUARD
    return report
