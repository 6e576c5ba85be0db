"""DOT and JSON-lines export of explored transition systems.

Both formats are deterministic for a given transition system: states are
written in index order, transitions in discovery order, and every JSON
object uses sorted keys with compact separators.
"""

from __future__ import annotations

import json
import math

from ..lang.interp import as_compiled
from .state import INF, GlobalState, LocalState, Message


def _time(v):
    if isinstance(v, float) and math.isinf(v):
        return None
    return v


def state_to_dict(s, model):
    cm = as_compiled(model)
    actors = {}
    for idx, a in enumerate(s.actors):
        cc = cm.actor_class[idx]
        actors[cm.names[idx]] = {
            "time": a.time,
            "vars": dict(zip(cc.var_names, a.vars)),
            "bag": [
                {
                    "msg": m.name,
                    "sender": cm.names[m.sender] if 0 <= m.sender < len(cm.names) else m.sender,
                    "arrival": m.arrival,
                    "deadline": _time(m.deadline),
                    "args": list(m.args),
                }
                for m in a.bag
            ],
        }
    d = {"actors": actors}
    if s.error is not None:
        d["error"] = s.error
    return d


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def to_jsonl(ts, model) -> str:
    """One line per state, then one per transition, then a stats line."""
    lines = []
    for i, s in enumerate(ts.states):
        lines.append(_dumps({"type": "state", "id": i, "depth": ts.depth[i], "state": state_to_dict(s, model)}))
    for src, lbl, dst in ts.transitions:
        lines.append(_dumps({"type": "transition", "src": src, "label": lbl, "dst": dst}))
    stats = dict(ts.stats.as_dict(), statesRetained=len(ts.states), complete=ts.complete, mode=ts.mode)
    lines.append(_dumps({"type": "stats", **stats}))
    return "\n".join(lines) + "\n"


def _dot_escape(text):
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\l")


def _dump_state(s, model):
    cm = as_compiled(model)
    rows = []
    for idx, a in enumerate(s.actors):
        cc = cm.actor_class[idx]
        vs = ", ".join(f"{n}={v}" for n, v in zip(cc.var_names, a.vars))
        bag = ", ".join(f"{m.name}@{m.arrival}" for m in a.bag)
        rows.append(f"{cm.names[idx]} t={a.time} [{vs}] {{{bag}}}")
    if s.error is not None:
        rows.append(f"error: {s.error}")
    return "\n".join(rows) + "\n"


def to_dot(ts, model, full=False) -> str:
    """Graphviz source; ``full`` puts a dump of every state in its label."""
    out = ["digraph ts {", "  node [shape=box, fontname=monospace];"]
    for i, s in enumerate(ts.states):
        text = str(i)
        if full:
            text += "\n" + _dump_state(s, model)
        attrs = [f'label="{_dot_escape(text)}"']
        if i == ts.initial:
            attrs.append("peripheries=2")
        if s.error is not None:
            attrs.append("color=red")
        if ts.violation == i:
            attrs.append("style=bold")
        out.append(f"  s{i} [{', '.join(attrs)}];")
    for src, lbl, dst in ts.transitions:
        out.append(f'  s{src} -> s{dst} [label="{_dot_escape(lbl)}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def state_from_dict(d, model):
    """Inverse of :func:`state_to_dict`."""
    cm = as_compiled(model)
    actors = []
    for idx, name in enumerate(cm.names):
        a = d["actors"][name]
        cc = cm.actor_class[idx]
        bag = []
        for m in a["bag"]:
            sender = m["sender"]
            if isinstance(sender, str):
                sender = cm.names.index(sender)
            deadline = INF if m["deadline"] is None else m["deadline"]
            bag.append(Message(m["arrival"], m["msg"], sender, tuple(m["args"]), deadline))
        vars_ = tuple(a["vars"][n] for n in cc.var_names)
        actors.append(LocalState(vars_, tuple(sorted(bag)), a["time"]))
    return GlobalState(tuple(actors), d.get("error"))


EXPORTERS = {"dot": to_dot, "jsonl": to_jsonl}
