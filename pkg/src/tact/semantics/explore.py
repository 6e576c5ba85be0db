"""Breadth-first state-space generation with on-the-fly merging."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..lang.interp import as_compiled
from .equivalence import IDENTITY, RELAXED, SHIFT, key_function
from .ftts import ftts_successors, initial_state

FTTS = "ftts"
BFTTS_SHIFT = "bftts-shift"
BFTTS_RELAXED = "bftts-relaxed"
MODES = (FTTS, BFTTS_SHIFT, BFTTS_RELAXED)

_KEY_MODE = {FTTS: IDENTITY, BFTTS_SHIFT: SHIFT, BFTTS_RELAXED: RELAXED}

DEFAULT_MAX_STATES = 200_000


@dataclass
class Stats:
    states_explored: int = 0
    states_merged: int = 0
    merges_by_shift: int = 0
    merges_by_relaxation: int = 0

    def as_dict(self):
        return {
            "statesExplored": self.states_explored,
            "statesMerged": self.states_merged,
            "mergesByShift": self.merges_by_shift,
            "mergesByRelaxation": self.merges_by_relaxation,
        }


@dataclass
class TransitionSystem:
    """Explored states, labelled transitions and bookkeeping for traces.

    ``parent[i]`` is ``(predecessor index, label)`` on a BFS-shortest path
    from the initial state (``None`` for the initial state).
    """

    states: list
    transitions: list  # (src, label, dst)
    initial: int = 0
    stats: Stats = field(default_factory=Stats)
    complete: bool = True
    mode: str = BFTTS_SHIFT
    parent: list = field(default_factory=list)
    depth: list = field(default_factory=list)
    violation: Optional[int] = None
    violation_edge: Optional[tuple] = None  # (src, label) when an event violated
    workers: int = 1

    def __len__(self):
        return len(self.states)

    def successors(self, i):
        return [(lbl, d) for s, lbl, d in self.transitions if s == i]

    def adjacency(self):
        adj = [[] for _ in self.states]
        for s, lbl, d in self.transitions:
            adj[s].append((lbl, d))
        return adj

    def trace_to(self, i):
        """Labels and state indices from the initial state to ``i``."""
        path = []
        while self.parent[i] is not None:
            p, lbl = self.parent[i]
            path.append((lbl, i))
            i = p
        path.reverse()
        return path

    def counterexample(self):
        """BFS-shortest ``(label, state index)`` path to the recorded violation."""
        if self.violation is None:
            return None
        if self.violation_edge is not None:
            src, lbl = self.violation_edge
            return self.trace_to(src) + [(lbl, self.violation)]
        return self.trace_to(self.violation)

    def has_cycle(self):
        adj = self.adjacency()
        color = [0] * len(self.states)
        for root in range(len(self.states)):
            if color[root]:
                continue
            stack = [(root, iter(adj[root]))]
            color[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[node] = 2
                    stack.pop()
                    continue
                d = nxt[1]
                if color[d] == 1:
                    return True
                if color[d] == 0:
                    color[d] = 1
                    stack.append((d, iter(adj[d])))
        return False

    def labels(self):
        return sorted({lbl for _, lbl, _ in self.transitions})


# worker-side globals for parallel expansion
_W = {}


def _worker_init(model, mode):
    cm = as_compiled(model)
    _W["cm"] = cm
    _W["key"] = key_function(cm.model, _KEY_MODE[mode])
    _W["shift"] = key_function(cm.model, SHIFT) if mode == BFTTS_RELAXED else None


def _expand(states):
    cm, key, shift = _W["cm"], _W["key"], _W["shift"]
    out = []
    for s in states:
        succ = []
        for lbl, t in ftts_successors(s, cm):
            succ.append((lbl, t, key(t), shift(t) if shift else None))
        out.append(succ)
    return out


def explore(
    model,
    mode: str = BFTTS_SHIFT,
    max_states: int = DEFAULT_MAX_STATES,
    max_depth: Optional[int] = None,
    stop: Optional[Callable] = None,
    stop_label: Optional[Callable] = None,
    jobs: int = 1,
) -> TransitionSystem:
    """Generate the state space of ``model`` breadth first.

    A successor whose key (identity, shift-normal or relaxed-normal form,
    depending on ``mode``) was seen before is merged into the first state
    that produced the key. ``stop(state)`` / ``stop_label(label)`` end the
    search as soon as a matching state is recorded; its index is stored in
    ``violation``. ``max_depth`` bounds the raw mode, which has no merging
    beyond exact duplicates.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    cm = as_compiled(model)
    key = key_function(cm.model, _KEY_MODE[mode])
    shift_key = key_function(cm.model, SHIFT) if mode == BFTTS_RELAXED else None

    init = initial_state(cm)
    ts = TransitionSystem([init], [], 0, Stats(), True, mode, [None], [0])
    ts.stats.states_explored = 1
    index = {key(init): 0}
    shift_seen = {shift_key(init)} if shift_key else None
    if stop is not None and stop(init):
        ts.violation = 0
        return ts

    pool = None
    if jobs and jobs > 1:
        pool = ProcessPoolExecutor(jobs, initializer=_worker_init, initargs=(cm.model, mode))
        ts.workers = jobs  # results are still merged in frontier order

    frontier = [0]
    try:
        while frontier:
            work = []
            for i in frontier:
                if ts.states[i].error is not None:
                    continue
                if max_depth is not None and ts.depth[i] >= max_depth:
                    if ftts_successors(ts.states[i], cm):
                        ts.complete = False
                    continue
                work.append(i)
            expanded = _expand_all(pool, cm, key, shift_key, [ts.states[i] for i in work], jobs)
            nxt = []
            for i, succ in zip(work, expanded):
                for lbl, t, k, sk in succ:
                    ts.stats.states_explored += 1
                    j = index.get(k)
                    if j is None:
                        if len(ts.states) >= max_states:
                            ts.complete = False
                            ts.stats.states_explored -= 1
                            return ts
                        j = len(ts.states)
                        index[k] = j
                        ts.states.append(t)
                        ts.parent.append((i, lbl))
                        ts.depth.append(ts.depth[i] + 1)
                        nxt.append(j)
                        ts.transitions.append((i, lbl, j))
                        if shift_seen is not None:
                            shift_seen.add(sk)
                        if stop is not None and stop(t):
                            ts.violation = j
                            return ts
                        if stop_label is not None and stop_label(lbl):
                            ts.violation, ts.violation_edge = j, (i, lbl)
                            return ts
                    else:
                        ts.stats.states_merged += 1
                        if shift_seen is None or sk in shift_seen:
                            ts.stats.merges_by_shift += 1
                        else:
                            ts.stats.merges_by_relaxation += 1
                            shift_seen.add(sk)
                        ts.transitions.append((i, lbl, j))
                        if stop_label is not None and stop_label(lbl):
                            ts.violation, ts.violation_edge = j, (i, lbl)
                            return ts
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    return ts


def _expand_all(pool, cm, key, shift_key, states, jobs):
    if pool is None or len(states) < 64:
        out = []
        for s in states:
            succ = []
            for lbl, t in ftts_successors(s, cm):
                succ.append((lbl, t, key(t), shift_key(t) if shift_key else None))
            out.append(succ)
        return out
    chunk = max(16, len(states) // (jobs * 4))
    parts = [states[k:k + chunk] for k in range(0, len(states), chunk)]
    out = []
    for res in pool.map(_expand, parts):
        out.extend(res)
    return out


def default_jobs():
    return max(1, (os.cpu_count() or 1))
