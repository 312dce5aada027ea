from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from oracles import PATTERN_16, and_or_sequence
from splitgame.adversaries import (
    AdversaryConfig,
    informal_pattern_run,
    make_adversary,
    no_shortcut_sequence,
)
from splitgame.game import GameState, Phase, apply_move
from splitgame.play import play_finite
from splitgame.strategy import first_move


def opened(h):
    return apply_move(GameState.fresh(h), first_move(h))


def test_sequence_prefix():
    assert "".join(str(no_shortcut_sequence(n)) for n in range(1, 17)) == PATTERN_16
    assert no_shortcut_sequence(2) == 1
    assert no_shortcut_sequence(32) == 1
    with pytest.raises(ValueError):
        no_shortcut_sequence(0)


def test_sequence_matches_and_or_oracle():
    assert and_or_sequence(64, height=8) == [no_shortcut_sequence(n) for n in range(1, 65)]
    assert and_or_sequence(63, height=6)[31] == 1


@given(st.integers(1, 10**9))
def test_sequence_recursion(n):
    # v2(2n) = v2(n) + 1 flips the symbol; odd n always gives 0
    assert no_shortcut_sequence(2 * n) == 1 - no_shortcut_sequence(n)
    assert no_shortcut_sequence(2 * n - 1) == 0


def test_case_b_script_h3():
    s = opened(3)
    adv = make_adversary(AdversaryConfig("case-b", delta=F(1, 2)))
    move = adv.next_move(s)
    s = apply_move(s, move)
    assert s.t1.get("001") == F(3, 2)
    assert s.t1.get("00") == s.t1.get("0") == F(3, 4)
    assert adv.next_move(s) is None


def test_case_a_script_h3():
    s = opened(3)
    adv = make_adversary(AdversaryConfig("case-a", target=1, role="t1"))
    s = apply_move(s, adv.next_move(s))
    assert s.t1.get("0") > 1
    assert adv.next_move(s) is None
    # t0 cannot leave 1 at the first level: the script halts without moving
    stuck = make_adversary(AdversaryConfig("case-a", target=1, role="t0"))
    assert stuck.next_move(opened(3)) is None


def test_passive_halts():
    assert make_adversary(AdversaryConfig()).next_move(opened(3)) is None


@pytest.mark.parametrize("h", [3, 5, 7])
@pytest.mark.parametrize("delta", [F(1, 8), F(1, 16), F(1, 64)])
def test_case_b_script_leads_to_case_b(h, delta):
    run = play_finite(h, AdversaryConfig("case-b", delta=delta))
    assert run.state.phase is Phase.DONE_B
    assert run.verdict.m_wins and run.verdict.label == 2


def test_large_delta_turns_into_case_a():
    # minimal propagation of 1 + 1/2 reaches the spine at h = 5
    run = play_finite(5, AdversaryConfig("case-b", delta=F(1, 2)))
    assert run.state.phase is Phase.DONE_A and run.verdict.m_wins


@pytest.mark.parametrize("h", [3, 5, 7])
def test_pattern_never_runs_ahead(h):
    run = informal_pattern_run(h)
    assert run.premature == []
    assert run.steps >= 2 ** (h - 2)


def test_pattern_first_quarter_h7():
    run = informal_pattern_run(7, steps=2**5)
    assert run.premature == [] and run.steps == 32 and run.stuck_at is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 5, 7]))
def test_random_adversary_is_seed_deterministic(seed, h):
    a = play_finite(h, AdversaryConfig("random", seed=seed, budget=15))
    b = play_finite(h, AdversaryConfig("random", seed=seed, budget=15))
    assert a.records == b.records and a.adversary_moves <= 15


def test_config_validation_and_round_trip():
    cfg = AdversaryConfig("random", seed=3, delta=F(1, 3))
    assert AdversaryConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.to_dict()["delta"] == "1/3"
    for bad in [dict(kind="nope"), dict(budget=-1), dict(delta=F(0)), dict(role="t")]:
        with pytest.raises(ValueError):
            AdversaryConfig(**bad)
