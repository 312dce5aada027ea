"""JSONL traces and an independent verifier.

A trace is a header record followed by move records.  The verifier replays
the moves through the rule checks and recomputes every derived record
(leaf statuses, verdicts, candidates, reports), so a trace that was edited
by hand is rejected with the first offending record index.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .game import GameState, Move, apply_move, leaf_status, referee_final, thresholds
from .rational import ONE, fmt, parse
from .tree import ROOT, Role, RuleViolation, Valuation, prefixes


def write_jsonl(records: Iterable[dict], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_jsonl(path) -> list[dict]:
    text = Path(path).read_text()
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    kind: str | None = None  # violation class
    index: int | None = None  # offending record
    detail: str = ""

    def __str__(self):
        if self.ok:
            return "trace ok"
        return f"{self.kind} at record {self.index}: {self.detail}"


OK = VerifyResult(True)


class _Reject(Exception):
    def __init__(self, kind: str, detail: str):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail


def verify(records: list[dict]) -> VerifyResult:
    if not records:
        return VerifyResult(False, "EmptyTrace", 0, "no records")
    head = records[0].get("kind")
    if head == "game":
        return verify_finite(records)
    if head == "session":
        return verify_compose(records)
    return VerifyResult(False, "UnknownTrace", 0, f"unknown header kind {head!r}")


def verify_file(path) -> VerifyResult:
    return verify(read_jsonl(path))


def _run(records, handlers) -> VerifyResult:
    for i, rec in enumerate(records):
        if i == 0:
            continue
        fn = handlers.get(rec.get("kind"))
        try:
            if fn is None:
                raise _Reject("UnknownRecord", f"unexpected record kind {rec.get('kind')!r}")
            fn(rec)
        except RuleViolation as exc:
            return VerifyResult(False, type(exc).__name__, i, str(exc))
        except _Reject as exc:
            return VerifyResult(False, exc.kind, i, exc.detail)
        except (KeyError, TypeError, ValueError) as exc:
            return VerifyResult(False, "MalformedRecord", i, repr(exc))
    return OK


# --------------------------------------------------------------------------
# finite games


def verify_finite(records: list[dict]) -> VerifyResult:
    head = records[0]
    try:
        s = GameState.fresh(head["h"], head.get("root_parity", 0))
    except (KeyError, ValueError) as exc:
        return VerifyResult(False, "MalformedRecord", 0, repr(exc))
    box = {"s": s}

    def move(rec):
        box["s"] = apply_move(box["s"], Move.from_record(rec))

    def status(rec):
        got = leaf_status(box["s"], rec["leaf"])
        if got.kind != rec["status"] or got.label != rec.get("label"):
            raise _Reject("StatusMismatch", f"{rec['leaf']}: recorded {rec['status']}, actual {got}")

    def verdict(rec):
        v = referee_final(box["s"])
        if v.to_record() != {k: rec.get(k) for k in ("kind", "winner", "leaf", "label")}:
            raise _Reject("VerdictMismatch", f"recorded {rec}, actual {v}")

    return _run(records, {"move": move, "status": status, "verdict": verdict})


# --------------------------------------------------------------------------
# composed sessions


@dataclass
class _Stage:
    root: str
    h: int
    m: Fraction
    a: Fraction
    parent: int | None
    active: bool = True
    candidate: str | None = None
    label: int | None = None

    def __post_init__(self):
        self.labels: dict[str, int] = {}


class _ComposeChecker:
    def __init__(self, head: dict):
        self.initial_h = head["initial_h"]
        self.max_stages = head["max_stages"]
        self.t = Valuation.fresh(Role.FULL)
        self.t0 = Valuation.fresh(Role.EVEN)
        self.t1 = Valuation.fresh(Role.ODD)
        self.stages: list[_Stage] = []
        self.chain: list[int] = []

    def path_max(self, frm: str, to: str) -> Fraction:
        return max(max(self.t0.get(p), self.t1.get(p)) for p in prefixes(to) if len(p) >= len(frm))

    def discredited(self, st: _Stage) -> bool:
        th = thresholds(st.h)
        return self.path_max(st.root, st.root + st.candidate) > st.a * th.m(st.label)

    def spawn(self, rec):
        idx, parent = rec["index"], rec["parent"]
        if idx != len(self.stages):
            raise _Reject("StageMismatch", f"stage index {idx}, expected {len(self.stages)}")
        if len(self.chain) >= self.max_stages:
            raise _Reject("StageMismatch", "more stages than allowed")
        root, h, m, a = rec["root"], rec["h"], parse(rec["m_scale"]), parse(rec["a_scale"])
        if parent is None:
            want = (ROOT, self.initial_h, ONE, ONE)
            if self.chain:
                raise _Reject("StageMismatch", "second root stage")
        else:
            p = self.stages[parent]
            if not self.chain or self.chain[-1] != parent or p.candidate is None:
                raise _Reject("StageMismatch", f"stage {parent} cannot spawn now")
            th = thresholds(p.h)
            want = (
                p.root + p.candidate,
                p.h if p.label == 1 else p.h + 2,
                p.m * th.M(p.label),
                p.a * th.m(p.label),
            )
        if (root, h, m, a) != want:
            raise _Reject("ScaleViolation", f"stage {idx} is {(root, h, m, a)}, expected {want}")
        self.stages.append(_Stage(root, h, m, a, parent))
        self.chain.append(idx)

    def lost(self, rec):
        idx = rec["stage"]
        st = self.stages[idx]
        if idx not in self.chain or st.candidate is None or rec["leaf"] != st.candidate:
            raise _Reject("StageMismatch", f"stage {idx} has no candidate {rec['leaf']!r}")
        if not self.discredited(st):
            raise _Reject("StageMismatch", f"candidate of stage {idx} dropped while still winning")
        pos = self.chain.index(idx)
        if rec["discarded"] != self.chain[pos + 1:]:
            raise _Reject("StageMismatch", f"discarded {rec['discarded']}, expected {self.chain[pos + 1:]}")
        for j in self.chain[pos + 1:]:
            self.stages[j].active = False
        del self.chain[pos + 1:]
        st.candidate = st.label = None

    def discard(self, rec):
        idx = rec["index"]
        if not 0 <= idx < len(self.stages) or self.stages[idx].active:
            raise _Reject("StageMismatch", f"stage {idx} was not dropped with its root candidate")

    def candidate(self, rec):
        st = self.stages[rec["stage"]]
        if not st.active:
            raise _Reject("FrozenViolation", f"candidate on discarded stage {rec['stage']}")
        leaf, label = rec["leaf"], rec["label"]
        if len(leaf) != st.h or st.labels.get(leaf) != label:
            raise _Reject("CandidateMismatch", f"{leaf!r} is not a leaf labelled {label}")
        th = thresholds(st.h)
        y = st.root + leaf
        if self.t.get(y) < st.m * th.M(label):
            raise _Reject("CandidateMismatch", f"t({y}) below the scaled threshold")
        st.candidate, st.label = leaf, label
        if self.discredited(st):
            raise _Reject("CandidateMismatch", f"candidate {y} is discredited")

    def move(self, rec):
        grouped: dict[str, dict[str, Fraction]] = {}
        for target, x, v in rec["assignments"]:
            grouped.setdefault(target, {})[x] = parse(v)
        if rec["mover"] == "M":
            if set(grouped) - {"t"}:
                raise _Reject("ProtocolViolation", "M wrote A's valuations")
            st = self.stages[rec["stage"]]
            if not st.active:
                raise _Reject("FrozenViolation", f"write into discarded stage {rec['stage']}")
            for x in grouped.get("t", {}):
                if not (x.startswith(st.root) and 1 <= len(x) - len(st.root) <= st.h):
                    raise _Reject("FrozenViolation", f"{x!r} lies outside stage {rec['stage']}")
            for x, i in rec.get("labels", []):
                if len(x) != st.h or i not in (1, 2) or x in st.labels:
                    raise _Reject("LabelViolation", f"bad label {i} on {x!r}")
                st.labels[x] = i
        elif rec["mover"] == "A":
            if set(grouped) - {"t0", "t1"} or rec.get("labels"):
                raise _Reject("ProtocolViolation", "A wrote M's valuation or labels")
        else:
            raise _Reject("ProtocolViolation", f"unknown mover {rec['mover']!r}")
        for target, vals in grouped.items():
            setattr(self, target, getattr(self, target).apply_increase(vals))

    def report(self, rec):
        chain = [self.stages[i] for i in self.chain]
        if not chain:
            want_omega, growth, a_max = "", ONE, ONE
            th_prod = al_prod = ONE
        else:
            last = chain[-1]
            want_omega = last.root + (last.candidate or "")
            growth = self.t.get(want_omega)
            a_max = self.path_max(ROOT, want_omega)
            th_prod = al_prod = ONE
            for st in chain:
                if st.candidate is not None:
                    th = thresholds(st.h)
                    th_prod *= th.M(st.label)
                    al_prod *= th.m(st.label)
        got = (rec["omega_prefix"], parse(rec["growth"]), parse(rec["a_max_along"]),
               parse(rec["threshold_product"]), parse(rec["allowance_product"]))
        want = (want_omega, growth, a_max, th_prod, al_prod)
        if got != want:
            raise _Reject("ReportMismatch", f"recorded {got}, recomputed {want}")
        if growth < th_prod or a_max > al_prod:
            raise _Reject("BoundViolation", f"growth {fmt(growth)}, A max {fmt(a_max)}")


def verify_compose(records: list[dict]) -> VerifyResult:
    try:
        chk = _ComposeChecker(records[0])
    except KeyError as exc:
        return VerifyResult(False, "MalformedRecord", 0, repr(exc))
    noop = lambda rec: None
    return _run(
        records,
        {
            "stage-spawn": chk.spawn,
            "candidate-lost": chk.lost,
            "stage-discard": chk.discard,
            "candidate": chk.candidate,
            "global-move": chk.move,
            "rejected": noop,
            "halt": noop,
            "report": chk.report,
        },
    )
