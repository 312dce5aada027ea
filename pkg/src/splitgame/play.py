"""Drive one finite-tree game to adversary halt and record it."""
from __future__ import annotations

from dataclasses import dataclass, field

from .adversaries import Adversary, AdversaryConfig, make_adversary
from .game import GameState, Move, Phase, Verdict, apply_move, labeled_statuses, referee_final
from .strategy import StrategyM, case_a_witness, case_b_witness


@dataclass
class GameRun:
    state: GameState
    verdict: Verdict
    records: list[dict] = field(default_factory=list)
    adversary_moves: int = 0


def play_finite(
    h: int,
    adversary: AdversaryConfig | Adversary,
    root_parity: int = 0,
    strategy: StrategyM | None = None,
    max_moves: int = 100_000,
    check: bool = True,
) -> GameRun:
    """Opening move, then alternate adversary batch / strategy reaction until
    the adversary halts.  With ``check`` the case A / case B soundness
    witnesses are asserted right after the corresponding move."""
    s = GameState.fresh(h, root_parity)
    adv = make_adversary(adversary) if isinstance(adversary, AdversaryConfig) else adversary
    strat = strategy or StrategyM()
    cfg = adv.cfg
    records: list[dict] = [
        {"kind": "game", "h": h, "root_parity": s.root_parity, "adversary": cfg.to_dict()}
    ]

    def push(state: GameState, move: Move) -> GameState:
        state = apply_move(state, move)
        records.append(move.to_record(len(state.move_log) - 1))
        return state

    s = push(s, strat.respond(s))
    n = 0
    while n < max_moves:
        move = adv.next_move(s)
        if move is None:
            break
        n += 1
        s = push(s, move)
        reply = strat.respond(s)
        if reply is not None:
            s = push(s, reply)
            if check and s.phase is Phase.DONE_A:
                case_a_witness(s, strat.sel)
            elif check and s.phase is Phase.DONE_B:
                case_b_witness(s, strat.sel)
    verdict = referee_final(s)
    for leaf, st in labeled_statuses(s).items():
        records.append({"kind": "status", "leaf": leaf, "status": st.kind, "label": st.label})
    records.append(verdict.to_record())
    return GameRun(s, verdict, records, n)
