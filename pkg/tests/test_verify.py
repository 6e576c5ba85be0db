import dataclasses
import json

import pytest

from conftest import FIXTURES
from tact.lang.parser import parse_model
from tact.patterns.params import INI_EXE, PUB_SUB, REQ_RES, SEN_REC, IniExeParams, make_params
from tact.scenarios.library import REGISTRY, builtin, scenario_names
from tact.semantics.explore import BFTTS_RELAXED, BFTTS_SHIFT, FTTS, explore
from tact.semantics.tts import explore_tts
from tact.verify.assertions import (
    AssertionSyntaxError,
    ReplayError,
    check_assertion,
    parse_assertion,
    replay,
    replay_confirms,
    verify,
)
from tact.verify.bisim import BisimLimitError, strong_bisimilar, weak_bisimilar_events, weak_trace_equivalent
from tact.verify.bounds import requirement_bound
from tact.verify.traces import read_trace, replay_document, trace_document, write_trace

FIXTURE_FILES = sorted(FIXTURES.glob("*.tam"))

ROW_BUDGETS = {
    "pubsub-row1": 29, "pubsub-row2": 7,
    "reqres-row1": 30, "reqres-row2": 12,
    "iniexe-row1": 21, "iniexe-row2": 6,
    "senrec-row1": 25, "senrec-row2": 1,
}


def load(name):
    return parse_model((FIXTURES / name).read_text())


def mutate(ts, transitions):
    return dataclasses.replace(ts, transitions=list(transitions))


# --------------------------------------------------------------- bounds


@pytest.mark.parametrize("name", sorted(ROW_BUDGETS))
def test_row_budgets(name):
    data = REGISTRY[name]["patterns"][0]
    b = requirement_bound(data["kind"], make_params(data["kind"], data["params"]))
    assert b.value == ROW_BUDGETS[name]
    assert b.diagnostic is None


def test_budget_formulas_by_hand():
    assert requirement_bound(PUB_SUB, make_params(PUB_SUB, REGISTRY["pubsub-row1"]["patterns"][0]["params"])).formula \
        == "R_pub - R_sub - L_pub"
    p = make_params(REQ_RES, dict(N_req=4, L_req=24, R_req=18, N_res=5, L_res=10, R_res=20))
    assert requirement_bound(REQ_RES, p).value == 24 + 18 - 10 - 20
    p = make_params(SEN_REC, dict(N_sen=1, L_sen=9, N_rec=1, L_rec=2))
    assert requirement_bound(SEN_REC, p).value == 7


def test_zero_budget():
    b = requirement_bound(INI_EXE, IniExeParams(N_ini=1, L_ini=4, N_exe=1, L_exe=4))
    assert b.value == 0 and b.diagnostic is None


def test_negative_budget_kept_with_diagnostic():
    b = requirement_bound(INI_EXE, IniExeParams(N_ini=1, L_ini=3, N_exe=1, L_exe=4))
    assert b.value == -1
    assert "negative" in b.diagnostic


def test_unknown_kind():
    with pytest.raises(ValueError):
        requirement_bound("broadcast", None)


# ------------------------------------------------------------ assertions


@pytest.mark.parametrize(
    "text,match",
    [
        ("never meltdown", "unknown failure kind"),
        ("never ghost.timeout", "unknown actor"),
        ("service.lastPub <= 3", "no state variable"),
        ("x < 3", "cannot parse"),
        ("budget(broadcast)", "broadcast"),
    ],
)
def test_assertion_errors(text, match):
    sc = builtin("pubsub-row1")
    with pytest.raises(AssertionSyntaxError, match=match):
        parse_assertion("a", text, sc.model, sc.composition.fragments)


def test_interval_variable_bound_rejected():
    sc = builtin("pubsub-row1")
    with pytest.raises(AssertionSyntaxError, match="instant"):
        parse_assertion("a", "si.lastPub <= 3", sc.model)


def test_boolean_variable_bound_rejected():
    sc = builtin("pubsub-row1")
    with pytest.raises(AssertionSyntaxError, match="not an int"):
        parse_assertion("a", "si.hasPub <= 1", sc.model)


def test_trivially_true_bounds_pass():
    sc = builtin("pubsub-row1")
    ts = explore(sc.model, BFTTS_RELAXED)
    for text in ("service.transmissionTime >= 0", "service.transmissionTime <= 100000"):
        v = check_assertion(ts, parse_assertion("t", text, sc.model), sc.model)
        assert v.passed and v.counterexample is None and v.states_checked == len(ts)


def test_failure_kind_accepts_message_name():
    sc = builtin("xray-vent")
    a = parse_assertion("t", "never timeoutFailure", sc.model)
    assert a.event == "timeoutFailure"


def _full_scan_oracle(ts, a):
    """Independent check: every state, no early exit."""
    bad = [i for i, s in enumerate(ts.states) if any(
        s.actors[idx].vars[vi] > a.bound for idx, vi in a.targets)]
    return bad


# the violating pub-sub row has an unbounded state space: once every delivery
# is rejected the last-accepted instant is never refreshed
@pytest.mark.parametrize("name", ["reqres-row2", "iniexe-row2", "senrec-row2"])
def test_violation_agrees_with_full_scan(name):
    sc = builtin(name)
    (a,) = sc.assertions
    full = explore(sc.model, BFTTS_RELAXED)
    assert full.complete
    bad = _full_scan_oracle(full, a)
    assert bad
    res = verify(sc.model, [a], BFTTS_RELAXED)
    (v,) = res.verdicts
    assert not v.passed
    # the early-exit trace is a shortest one
    assert len(v.witness) == min(full.depth[i] for i in bad)
    assert v.final_state.actors[a.targets[0][0]].vars[a.targets[0][1]] > a.bound
    assert replay_confirms(sc.model, res.ts, v, a)
    scan = verify(sc.model, [a], BFTTS_RELAXED, full_scan=True).verdicts[0]
    assert not scan.passed and len(scan.witness) == len(v.witness)


@pytest.mark.parametrize("name", ["pubsub-row1", "iniexe-row1"])
def test_pass_agrees_with_full_scan(name):
    sc = builtin(name)
    (a,) = sc.assertions
    full = explore(sc.model, BFTTS_RELAXED)
    assert _full_scan_oracle(full, a) == []
    assert verify(sc.model, [a]).passed


def test_event_assertion_counterexample_ends_with_failure():
    sc = builtin("monitor-timeout-trigger")
    res = verify(sc.model, sc.assertions)
    (v,) = res.verdicts
    assert not v.passed
    assert v.witness[-1] == "client.timeoutFailure"
    assert replay_confirms(sc.model, res.ts, v, sc.assertions[0])


def test_mixed_assertions_reexplore_after_first_violation():
    sc = builtin("senrec-row2").with_assertions([
        ("latency", "budget(sen-rec)"),
        ("fine", "sr.transmissionTime >= 0"),
    ])
    res = verify(sc.model, sc.assertions)
    assert [v.passed for v in res.verdicts] == [False, True]
    assert len(res.explorations) == 2 and res.explorations[1].complete


def test_truncated_verdict_is_qualified():
    sc = builtin("pubsub-row1")
    (v,) = verify(sc.model, sc.assertions, max_states=50).verdicts
    assert v.passed and not v.complete


def test_replay_rejects_wrong_label():
    sc = builtin("pubsub-row2")
    res = verify(sc.model, sc.assertions)
    (v,) = res.verdicts
    bad = list(v.counterexample)
    lbl, idx = bad[2]
    bad[2] = ("client.tick" if lbl != "client.tick" else "cs.transmitPublish", idx)
    with pytest.raises(ReplayError):
        replay(sc.model, res.ts, bad)


# --------------------------------------------------------------- traces


def test_trace_file_round_trip(tmp_path):
    sc = builtin("senrec-row2")
    (a,) = sc.assertions
    res = verify(sc.model, [a])
    (v,) = res.verdicts
    doc = trace_document(sc.model, res.ts, v, a, scenario=sc.name)
    path = tmp_path / "t.json"
    write_trace(path, doc)
    back = read_trace(path)
    assert back == json.loads(json.dumps(doc))
    states = replay_document(sc.model, back, a)
    assert states[-1] == v.final_state or a.violated_by_state(states[-1])
    assert [s["label"] for s in back["steps"][1:]] == v.witness


def test_tampered_trace_rejected(tmp_path):
    sc = builtin("senrec-row2")
    (a,) = sc.assertions
    res = verify(sc.model, [a])
    doc = trace_document(sc.model, res.ts, res.verdicts[0], a)
    doc["steps"][3]["state"]["actors"]["cs"]["time"] += 1
    with pytest.raises(ReplayError, match="step 3"):
        replay_document(sc.model, doc)
    short = dict(doc, steps=doc["steps"][:2])
    with pytest.raises(ReplayError, match="does not violate"):
        replay_document(sc.model, short, a)


def test_read_trace_checks_format(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"format": "other"}')
    with pytest.raises(ReplayError):
        read_trace(p)


# ------------------------------------------------------------ bisimulation


def test_strong_bisim_reflexive(rr_model):
    ts = explore(rr_model, BFTTS_SHIFT)
    assert strong_bisimilar(ts, ts)


def test_shift_and_relaxed_pubsub_bisimilar():
    m = builtin("pubsub-row1").model
    assert strong_bisimilar(explore(m, BFTTS_SHIFT), explore(m, BFTTS_RELAXED))


def test_relabelled_transition_breaks_bisimilarity(rr_model):
    ts = explore(rr_model, BFTTS_SHIFT)
    for k in range(len(ts.transitions)):
        tr = list(ts.transitions)
        s, _, d = tr[k]
        tr[k] = (s, "zz.fresh", d)
        assert not strong_bisimilar(ts, mutate(ts, tr))


def test_removed_event_breaks_bisimilarity(rr_model):
    ts = explore(rr_model, FTTS, max_states=30)
    assert len(ts.successors(0)) == 1
    cut = mutate(ts, [t for t in ts.transitions if t[0] != 0])
    assert not strong_bisimilar(ts, cut)
    assert not weak_bisimilar_events(ts, cut)


def test_redirected_transition_detected():
    # request_response's shift quotient: point the cycle back to the start instead
    ts = explore(load("request_response.tam"), BFTTS_SHIFT)
    tr = [(s, lbl, 0 if (s, d) == (4, 2) else d) for s, lbl, d in ts.transitions]
    assert not strong_bisimilar(ts, mutate(ts, tr))


def test_strong_bisim_equivalence_on_fixture_corpus():
    systems = []
    for path in FIXTURE_FILES:
        m = parse_model(path.read_text())
        for mode in (BFTTS_SHIFT, BFTTS_RELAXED):
            ts = explore(m, mode, max_states=3000)
            if ts.complete:
                systems.append(ts)
    for a in systems:
        assert strong_bisimilar(a, a)
    for a in systems:
        for b in systems:
            ab = strong_bisimilar(a, b)
            assert ab == strong_bisimilar(b, a)
            if not ab:
                continue
            for c in systems:
                if strong_bisimilar(b, c):
                    assert strong_bisimilar(a, c)


def test_bisim_limit():
    ts = explore(builtin("pubsub-row1").model, BFTTS_SHIFT)
    with pytest.raises(BisimLimitError):
        strong_bisimilar(ts, ts, limit=100)


def test_weak_bisim_fixture_tts_vs_reduced(rr_model):
    tts = explore_tts(rr_model)
    assert weak_bisimilar_events(tts, explore(rr_model, BFTTS_SHIFT))


def test_weak_bisim_reflexive_ftts():
    ts = explore(load("deadline.tam"), FTTS)
    assert weak_bisimilar_events(ts, ts)


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.name)
def test_weak_traces_of_tts_and_ftts_agree(path):
    m = parse_model(path.read_text())
    tts = explore_tts(m)
    coarse = explore(m, BFTTS_SHIFT)
    assert tts.complete and coarse.complete
    assert weak_trace_equivalent(tts, coarse)


def test_weak_traces_detect_missing_event():
    m = load("nondet_ping.tam")
    tts = explore_tts(m)
    coarse = explore(m, FTTS)
    last = max(range(len(coarse.transitions)), key=lambda k: coarse.depth[coarse.transitions[k][0]])
    cut = mutate(coarse, coarse.transitions[:last] + coarse.transitions[last + 1:])
    # dropping the deepest event shortens some trace unless a sibling covers it
    dup = [t for t in coarse.transitions if t[0] == coarse.transitions[last][0]
           and t[1] == coarse.transitions[last][1]]
    assert weak_trace_equivalent(tts, cut) == (len(dup) > 1)


def test_nondeterministic_choice_separates_branching_from_traces():
    """The fine-grained system performs a take event before resolving the
    choice inside the handler; the coarse one resolves it in the event."""
    m = load("nondet_ping.tam")
    tts, coarse = explore_tts(m), explore(m, FTTS)
    assert weak_trace_equivalent(tts, coarse)
    assert not weak_bisimilar_events(tts, coarse)


# ----------------------------------------------------- verdict stability


@pytest.mark.parametrize("name", scenario_names("row"))
def test_verdicts_match_expectations(name):
    sc = builtin(name)
    res = verify(sc.model, sc.assertions)
    assert {v.name: v.passed for v in res.verdicts} == sc.expected


def test_rejected_deliveries_make_state_space_unbounded():
    sc = builtin("pubsub-row2")
    ts = explore(sc.model, BFTTS_RELAXED, max_states=3000)
    assert not ts.complete
    # the violation itself is found long before the cap
    (v,) = verify(sc.model, sc.assertions, max_states=3000).verdicts
    assert not v.passed and len(v.witness) < 20
