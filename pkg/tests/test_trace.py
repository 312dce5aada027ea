import copy
from fractions import Fraction as F

import pytest

from mutations import lower_value, relabel, sibling_mismatch
from splitgame.adversaries import AdversaryConfig
from splitgame.composer import Session
from splitgame.play import play_finite
from splitgame.trace import read_jsonl, verify, verify_file, write_jsonl

FINITE = [
    (3, AdversaryConfig("passive")),
    (5, AdversaryConfig("case-a", target=2, role="t0")),
    (5, AdversaryConfig("case-b")),
    (7, AdversaryConfig("case-b", delta=F(1, 2))),
    (5, AdversaryConfig("pattern")),
    (5, AdversaryConfig("random", seed=4)),
]
COMPOSE = [
    (3, AdversaryConfig("passive"), 4),
    (3, AdversaryConfig("case-b"), 3),
    (3, AdversaryConfig("pattern"), 4),
    (3, AdversaryConfig("random", seed=2, budget=30), 5),
]


def finite_records(h, cfg):
    return play_finite(h, cfg).records


def compose_records(h, cfg, n):
    return Session(h, cfg, n).run().emit()


@pytest.mark.parametrize("h,cfg", FINITE)
def test_finite_round_trip(h, cfg, tmp_path):
    recs = finite_records(h, cfg)
    assert verify(recs).ok
    path = tmp_path / "g.jsonl"
    write_jsonl(recs, path)
    assert read_jsonl(path) == recs and verify_file(path).ok


@pytest.mark.parametrize("h,cfg,n", COMPOSE)
def test_compose_round_trip(h, cfg, n):
    assert verify(compose_records(h, cfg, n)).ok


def test_finite_mutations():
    recs = finite_records(5, AdversaryConfig("case-a", target=2, role="t0"))
    assert verify(lower_value(recs)).kind == "MonotonicityViolation"
    recs = finite_records(5, AdversaryConfig("case-b"))
    assert verify(sibling_mismatch(recs)).kind == "StructureViolation"
    assert verify(relabel(recs)).kind == "LabelViolation"


def test_compose_mutations():
    recs = compose_records(3, AdversaryConfig("pattern"), 4)
    assert verify(lower_value(recs)).kind == "MonotonicityViolation"
    assert verify(sibling_mismatch(recs)).kind == "StructureViolation"
    assert verify(relabel(recs)).kind == "LabelViolation"


def test_mutation_reports_record_index():
    recs = finite_records(5, AdversaryConfig("case-b"))
    bad = sibling_mismatch(recs)
    idx = next(i for i, (a, b) in enumerate(zip(recs, bad)) if a != b)
    assert verify(bad).index == idx


def test_tampered_derived_records():
    recs = finite_records(3, AdversaryConfig("passive"))
    bad = copy.deepcopy(recs)
    bad[-1]["leaf"] = "000"
    assert verify(bad).kind == "VerdictMismatch"
    bad = copy.deepcopy(recs)
    next(r for r in bad if r["kind"] == "status")["status"] = "pending"
    assert verify(bad).kind == "StatusMismatch"

    recs = compose_records(3, AdversaryConfig("case-b"), 3)
    bad = copy.deepcopy(recs)
    bad[-1]["growth"] = "4/1"
    assert verify(bad).kind == "ReportMismatch"
    bad = copy.deepcopy(recs)
    spawn = [r for r in bad if r["kind"] == "stage-spawn"][1]
    spawn["m_scale"] = "2/1"
    assert verify(bad).kind == "ScaleViolation"
    bad = copy.deepcopy(recs)
    next(r for r in bad if r["kind"] == "candidate")["leaf"] = "000"
    assert verify(bad).kind == "CandidateMismatch"


def test_frozen_stage_writes_rejected():
    recs = compose_records(3, AdversaryConfig("pattern"), 4)
    drop = next(i for i, r in enumerate(recs) if r["kind"] == "stage-discard")
    dead = recs[drop]["index"]
    bad = copy.deepcopy(recs)
    m = next(r for r in recs[:drop] if r["kind"] == "global-move" and r.get("stage") == dead)
    bad.insert(drop + 1, copy.deepcopy(m))
    assert verify(bad).kind == "FrozenViolation"


def test_malformed_traces():
    assert verify([]).kind == "EmptyTrace"
    assert verify([{"kind": "mystery"}]).kind == "UnknownTrace"
    recs = finite_records(3, AdversaryConfig("passive"))
    assert verify(recs + [{"kind": "mystery"}]).kind == "UnknownRecord"
    assert verify([{"kind": "game", "h": 4}]).kind == "MalformedRecord"


def test_traces_are_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_jsonl(compose_records(3, AdversaryConfig("random", seed=9, budget=25), 4), a)
    write_jsonl(compose_records(3, AdversaryConfig("random", seed=9, budget=25), 4), b)
    assert a.read_bytes() == b.read_bytes()
