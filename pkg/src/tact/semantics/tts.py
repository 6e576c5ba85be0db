"""Fine-grained timed semantics with a global clock.

Used as a desk-scale oracle for the coarse-grained semantics. Each statement
is its own ``tau`` step, finishing a server is a ``tau`` step, taking a
message is labelled ``actor.msg`` and the clock moves (label ``time``) only
when nothing else is enabled.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from ..lang.errors import EvalError
from ..lang.interp import Env, as_compiled, bind_params, deliver, initial_state, step
from .state import GlobalState, LocalState

TAU = "tau"
TIME = "time"
INTERNAL = frozenset({TAU, TIME})


class Frame(NamedTuple):
    """A server execution in progress."""

    cont: tuple  # remaining statement ids
    locals: tuple  # sorted (name, value) pairs
    resume: int  # the actor is blocked until the clock reaches this value


class TtsLocal(NamedTuple):
    vars: tuple
    bag: tuple
    frame: Optional[Frame] = None


class TtsState(NamedTuple):
    actors: tuple
    now: int
    error: Optional[str] = None


def tts_initial_state(model) -> TtsState:
    s = initial_state(model)
    # constructors run at time 0; a constructor delay only shows up as a
    # frame that resumes later, which the coarse semantics folds into the
    # clock, so constructors with delays are not supported here
    if any(a.time for a in s.actors):
        raise EvalError("constructor delays are not supported by the fine-grained semantics")
    return TtsState(tuple(TtsLocal(a.vars, a.bag) for a in s.actors), 0)


def _candidates(cm, idx, bag, now):
    first = bag[0].arrival
    if first > now:
        return []
    same = [m for m in bag if m.arrival == first]
    if len(same) > 1:
        best = min(cm.priority(idx, m.name) for m in same)
        same = [m for m in same if cm.priority(idx, m.name) == best]
    out = []
    for m in same:
        if not out or out[-1] != m:
            out.append(m)
    return out


def _replace_actor(s, i, local, **kw):
    return s._replace(actors=s.actors[:i] + (local,) + s.actors[i + 1:], **kw)


def tts_successors(s: TtsState, model):
    """List of ``(label, state)`` pairs of the fine-grained semantics."""
    if s.error is not None:
        return []
    cm = as_compiled(model)
    out = []
    now = s.now
    for i, a in enumerate(s.actors):
        f = a.frame
        if f is not None:
            if f.resume > now:
                continue
            if not f.cont:
                out.append((TAU, _replace_actor(s, i, a._replace(frame=None))))
                continue
            env = Env(list(a.vars), dict(f.locals), now)
            try:
                branches = step(cm, i, env, f.cont)
            except EvalError as exc:
                out.append((TAU, s._replace(error=f"{cm.names[i]}: {exc}")))
                continue
            for e, cont, d in branches:
                local = TtsLocal(
                    tuple(e.vars), a.bag, Frame(cont, tuple(sorted(e.locals.items())), now + d)
                )
                t = _replace_actor(s, i, local)
                actors, err = _deliver(cm, t.actors, e.sent)
                out.append((TAU, t._replace(actors=actors, error=err)))
            continue
        if not a.bag:
            continue
        for m in _candidates(cm, i, a.bag, now):
            label = cm.label(i, m.name)
            bag = list(a.bag)
            bag.remove(m)
            bag = tuple(bag)
            if m.deadline < now:
                out.append((f"expired:{label}", _replace_actor(s, i, a._replace(bag=bag))))
                continue
            try:
                srv = cm.server(i, m.name)
                params = bind_params(srv, m.args)
            except EvalError as exc:
                out.append((label, s._replace(error=f"{label}: {exc}")))
                continue
            frame = Frame(srv.body, tuple(sorted(params.items())), now)
            out.append((label, _replace_actor(s, i, TtsLocal(a.vars, bag, frame))))
    if out:
        return out
    # time progress to the next moment something becomes enabled
    pending = []
    for a in s.actors:
        if a.frame is not None:
            pending.append(a.frame.resume)
        elif a.bag:
            pending.append(a.bag[0].arrival)
    pending = [t for t in pending if t > now]
    if not pending:
        return []
    return [(TIME, s._replace(now=min(pending)))]


def _deliver(cm, actors, sent):
    if not sent:
        return actors, None
    plain = tuple(LocalState(a.vars, a.bag, 0) for a in actors)
    delivered, err = deliver(cm, plain, sent)
    return tuple(a._replace(bag=d.bag) for a, d in zip(actors, delivered)), err


def tts_normalize(s: TtsState, model, shift_intervals=True):
    """Key of ``s`` with all absolute times taken relative to the clock."""
    cm = as_compiled(model)
    base = s.now
    out = []
    for i, a in enumerate(s.actors):
        vars_ = a.vars
        if shift_intervals:
            mask = cm.interval_mask[i]
            vars_ = tuple(
                (v - base if v is not None else None) if m else v for v, m in zip(vars_, mask)
            )
        bag = tuple(sorted(m.shifted(-base) for m in a.bag))
        f = a.frame
        if f is not None:
            f = f._replace(resume=f.resume - base)
        out.append((vars_, bag, f))
    return (tuple(out), s.error)


def explore_tts(model, max_states=20_000):
    """Breadth-first generation of the fine-grained system, folded by clock shifts."""
    from .explore import Stats, TransitionSystem

    cm = as_compiled(model)
    init = tts_initial_state(cm)
    ts = TransitionSystem([init], [], 0, Stats(1), True, "tts", [None], [0])
    index = {tts_normalize(init, cm): 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for lbl, t in tts_successors(ts.states[i], cm):
                ts.stats.states_explored += 1
                k = tts_normalize(t, cm)
                j = index.get(k)
                if j is None:
                    if len(ts.states) >= max_states:
                        ts.complete = False
                        return ts
                    j = index[k] = len(ts.states)
                    ts.states.append(t)
                    ts.parent.append((i, lbl))
                    ts.depth.append(ts.depth[i] + 1)
                    nxt.append(j)
                else:
                    ts.stats.states_merged += 1
                    ts.stats.merges_by_shift += 1
                ts.transitions.append((i, lbl, j))
        frontier = nxt
    return ts
