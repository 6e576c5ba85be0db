"""Counterexample files that can be replayed without the explored graph.

A trace document lists every step as a label and the concrete state reached,
starting from the initial state. Replaying it re-runs the successor
relation from the initial state and demands an exact match at each step.
"""

from __future__ import annotations

import json

from ..lang.interp import as_compiled
from ..semantics.export import state_from_dict, state_to_dict
from ..semantics.ftts import ftts_successors, initial_state
from .assertions import NEVER, ReplayError, label_violates, replay

FORMAT = "tact-trace/1"


def trace_document(model, ts, verdict, assertion, scenario=None) -> dict:
    states = replay(model, ts, verdict.counterexample)
    steps = [
        {"label": lbl, "state": state_to_dict(s, model)}
        for (lbl, _), s in zip(verdict.counterexample, states)
    ]
    return {
        "format": FORMAT,
        "scenario": scenario,
        "assertion": assertion.name,
        "check": assertion.text,
        "bound": assertion.bound,
        "mode": ts.mode,
        "witness": verdict.witness,
        "steps": steps,
    }


def write_trace(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_trace(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT:
        raise ReplayError(f"{path}: not a trace file")
    return doc


def replay_document(model, doc, assertion=None):
    """Replay ``doc`` step by step; returns the concrete states.

    With ``assertion`` given, also require that the last step violates it.
    """
    cm = as_compiled(model)
    steps = doc["steps"]
    s = initial_state(cm)
    if s != state_from_dict(steps[0]["state"], cm):
        raise ReplayError("trace does not start in the initial state")
    states = [s]
    for n, step in enumerate(steps[1:], 1):
        want = state_from_dict(step["state"], cm)
        if not any(lbl == step["label"] and t == want for lbl, t in ftts_successors(s, cm)):
            raise ReplayError(f"step {n}: no {step['label']!r} transition to the recorded state")
        s = want
        states.append(s)
    if assertion is not None:
        if assertion.op == NEVER:
            ok = len(steps) > 1 and label_violates(assertion, steps[-1]["label"], cm)
        else:
            ok = assertion.violated_by_state(s)
        if not ok:
            raise ReplayError("the final step does not violate the assertion")
    return states
