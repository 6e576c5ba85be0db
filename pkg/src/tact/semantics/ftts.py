"""Coarse-grained (floating time) successor relation.

Every transition takes one message and runs its whole server atomically.
Actors keep their own clocks. An actor's release time is the later of its
clock and the earliest arrival in its bag; only actors with the globally
minimal release time may move, which keeps the event order consistent with
the fine-grained semantics.
"""

from __future__ import annotations

from ..lang.errors import EvalError
from ..lang.interp import as_compiled, deliver, execute_server, initial_state
from .state import GlobalState

__all__ = ["initial_state", "ftts_successors", "enabled_messages"]


def _candidates(cm, idx, bag):
    """Distinct messages of minimal arrival and best server priority."""
    first = bag[0].arrival
    same = [m for m in bag if m.arrival == first]
    if len(same) > 1:
        best = min(cm.priority(idx, m.name) for m in same)
        same = [m for m in same if cm.priority(idx, m.name) == best]
    out = []
    for m in same:
        if not out or out[-1] != m:
            out.append(m)
    return out


def enabled_messages(s: GlobalState, model):
    """``(actor index, message, release time)`` triples enabled in ``s``."""
    cm = as_compiled(model)
    if s.error is not None:
        return []
    releases = []
    for i, a in enumerate(s.actors):
        if a.bag:
            releases.append((max(a.time, a.bag[0].arrival), i))
    if not releases:
        return []
    low = min(r for r, _ in releases)
    out = []
    for r, i in releases:
        if r == low:
            for m in _candidates(cm, i, s.actors[i].bag):
                out.append((i, m, r))
    return out


def ftts_successors(s: GlobalState, model):
    """List of ``(label, state)`` pairs; poisoned states have no successors."""
    cm = as_compiled(model)
    out = []
    for i, m, release in enabled_messages(s, cm):
        actor = s.actors[i]
        label = cm.label(i, m.name)
        if m.deadline < release:
            bag = list(actor.bag)
            bag.remove(m)
            actors = s.actors[:i] + (actor._replace(bag=tuple(bag)),) + s.actors[i + 1:]
            out.append((f"expired:{label}", GlobalState(actors)))
            continue
        try:
            outcomes = execute_server(actor, m, cm, i)
        except EvalError as exc:
            out.append((label, GlobalState(s.actors, f"{label}: {exc}")))
            continue
        for oc in outcomes:
            actors = s.actors[:i] + (oc.local,) + s.actors[i + 1:]
            actors, err = deliver(cm, actors, oc.emitted)
            out.append((label, GlobalState(actors, f"{label}: {err}" if err else None)))
    return out
