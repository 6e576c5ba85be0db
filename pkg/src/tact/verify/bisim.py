"""Bisimulation checks by partition refinement.

Both checks work on the disjoint union of the two systems and report whether
the initial states end up in the same block.
"""

from __future__ import annotations

from collections import deque

from ..semantics.tts import INTERNAL

DEFAULT_LIMIT = 5000
EPSILON = ""


class BisimLimitError(ValueError):
    pass


def _union(ts1, ts2):
    n1 = len(ts1.states)
    n = n1 + len(ts2.states)
    edges = [[] for _ in range(n)]
    for s, lbl, d in ts1.transitions:
        edges[s].append((lbl, d))
    for s, lbl, d in ts2.transitions:
        edges[s + n1].append((lbl, d + n1))
    return n, edges, ts1.initial, ts2.initial + n1


def coarsest_partition(n, edges):
    """Block number per state for the largest strong bisimulation.

    Signature refinement: a state's signature is its block together with the
    set of (label, successor block) pairs; iterate until the number of blocks
    stops growing.
    """
    block = [0] * n
    count = 1
    while True:
        sigs = {}
        new = [0] * n
        for s in range(n):
            sig = (block[s], frozenset((lbl, block[d]) for lbl, d in edges[s]))
            new[s] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == count:
            return new
        block, count = new, len(sigs)


def strong_bisimilar(ts1, ts2, limit=DEFAULT_LIMIT) -> bool:
    """True iff the initial states of ``ts1`` and ``ts2`` are strongly bisimilar."""
    if len(ts1.states) > limit or len(ts2.states) > limit:
        raise BisimLimitError(f"systems exceed the bisimulation limit of {limit} states")
    n, edges, i1, i2 = _union(ts1, ts2)
    block = coarsest_partition(n, edges)
    return block[i1] == block[i2]


def _saturate(n, edges, internal):
    """Replace moves by weak moves: ``=a=>`` and ``=eps=>`` (reflexive)."""
    closure = []
    for s in range(n):
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for lbl, d in edges[u]:
                if lbl in internal and d not in seen:
                    seen.add(d)
                    queue.append(d)
        closure.append(frozenset(seen))
    sat = []
    for s in range(n):
        out = {(EPSILON, w) for w in closure[s]}
        for u in closure[s]:
            for lbl, v in edges[u]:
                if lbl in internal:
                    continue
                for w in closure[v]:
                    out.add((lbl, w))
        sat.append(list(out))
    return sat


def weak_bisimilar_events(ts1, ts2, internal=INTERNAL, limit=DEFAULT_LIMIT) -> bool:
    """Weak bisimilarity with the labels in ``internal`` treated as silent."""
    if len(ts1.states) > limit or len(ts2.states) > limit:
        raise BisimLimitError(f"systems exceed the bisimulation limit of {limit} states")
    n, edges, i1, i2 = _union(ts1, ts2)
    block = coarsest_partition(n, _saturate(n, edges, internal))
    return block[i1] == block[i2]


def _closure(edges, internal, states):
    seen = set(states)
    stack = list(states)
    while stack:
        u = stack.pop()
        for lbl, d in edges[u]:
            if lbl in internal and d not in seen:
                seen.add(d)
                stack.append(d)
    return frozenset(seen)


def weak_trace_equivalent(ts1, ts2, internal=INTERNAL, limit=DEFAULT_LIMIT) -> bool:
    """True iff both systems have the same sets of visible traces.

    Subset construction over visible labels, run on both systems in
    lockstep; the languages are prefix closed, so they agree iff every
    reachable pair of subsets enables the same visible labels.
    """
    if len(ts1.states) > limit or len(ts2.states) > limit:
        raise BisimLimitError(f"systems exceed the trace-equivalence limit of {limit} states")
    e1, e2 = ts1.adjacency(), ts2.adjacency()

    def step(edges, subset, lbl):
        return _closure(edges, internal, {d for u in subset for lb, d in edges[u] if lb == lbl})

    def enabled(edges, subset):
        return {lb for u in subset for lb, _ in edges[u] if lb not in internal}

    start = (_closure(e1, internal, {ts1.initial}), _closure(e2, internal, {ts2.initial}))
    seen = {start}
    queue = deque([start])
    while queue:
        a, b = queue.popleft()
        la, lb = enabled(e1, a), enabled(e2, b)
        if la != lb:
            return False
        for lbl in sorted(la):
            nxt = (step(e1, a, lbl), step(e2, b, lbl))
            if nxt not in seen:
                if len(seen) >= limit * 10:
                    raise BisimLimitError("subset construction grew past its limit")
                seen.add(nxt)
                queue.append(nxt)
    return True
