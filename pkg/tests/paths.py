"""Path enumeration over small acyclic transition systems (test oracle)."""

import copy

from tact.scenarios.build import build_scenario
from tact.scenarios.library import scenario_data


def maximal_paths(ts, limit=20000):
    """Every label sequence from the initial state to a state without successors."""
    succ = ts.adjacency()
    out = []
    stack = [(0, ())]
    while stack:
        i, labels = stack.pop()
        nxt = succ[i]
        if not nxt:
            out.append(list(labels))
            if len(out) > limit:
                raise RuntimeError("too many paths")
            continue
        for lbl, j in nxt:
            if len(labels) > 500:
                raise RuntimeError("path too long; is the system cyclic?")
            stack.append((j, labels + (lbl,)))
    return out


def variant(base, name=None, params=None, client=None, service=None, delays=None, assertions=None):
    """A copy of a built-in scenario with some fields overridden, built."""
    d = copy.deepcopy(scenario_data(base))
    if name:
        d["name"] = name
    if params:
        d["patterns"][0]["params"].update(params)
    if client:
        d["apps"][0].update(client)
    if service:
        d["apps"][1].update(service)
    if delays:
        d["substrate"]["delays"] = delays
    if assertions is not None:
        d["assertions"] = assertions
        d["expect"] = {}
    return build_scenario(d)
