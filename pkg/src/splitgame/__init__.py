"""Exact simulator for the game in which one player builds a supermartingale
on binary strings that wins on some sequence while two parity-restricted
opponents stay bounded there."""
from .composer import Session, assemble_global, branch_report, new_session
from .decomposition import FiniteMartingale, boundedness_check, make_positive, split
from .game import GameState, Move, Thresholds, apply_move, current_winner, leaf_status, referee_final, thresholds
from .play import play_finite
from .strategy import StrategyM
from .tree import Measure, Role, Valuation

__version__ = "0.1.0"

__all__ = [
    "FiniteMartingale",
    "GameState",
    "Measure",
    "Move",
    "Role",
    "Session",
    "StrategyM",
    "Thresholds",
    "Valuation",
    "apply_move",
    "assemble_global",
    "boundedness_check",
    "branch_report",
    "current_winner",
    "leaf_status",
    "make_positive",
    "new_session",
    "play_finite",
    "referee_final",
    "split",
    "thresholds",
]
