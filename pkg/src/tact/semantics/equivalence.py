"""Shift and relaxed-shift equivalence of idle states, and canonical keys.

Two independent routes are provided on purpose:

* :func:`shift_equivalent` / :func:`relaxed_shift_equivalent` decide the
  relations directly from their definitions (offset search plus a bipartite
  matching of the two message bags);
* :func:`canonical_key` normalizes a state so that equal keys mean
  equivalent states, which is what the explorer hashes on.

The tests cross-check one against the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lang import ast
from ..lang.interp import Env, as_compiled
from .state import GlobalState

SHIFT = "shift"
RELAXED = "relaxed"
IDENTITY = "identity"


@dataclass(frozen=True)
class EquivalenceConfig:
    """Interval variables and abstractable message parameters.

    ``interval_vars`` holds ``(class, var)`` pairs. ``abstract_params`` holds
    ``(class, message, param, guard)`` entries where ``guard`` is an
    expression over ``param`` alone. The empty config yields plain shift
    equivalence.
    """

    interval_vars: frozenset = field(default_factory=frozenset)
    abstract_params: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_model(cls, model: ast.Model) -> "EquivalenceConfig":
        iv, ab = set(), set()
        for c in model.classes:
            for v in c.statevars:
                if v.interval:
                    iv.add((c.name, v.name))
            for srv in c.servers:
                for a in srv.abstracts:
                    ab.add((c.name, srv.name, a.param, a.guard))
        return cls(frozenset(iv), frozenset(ab))

    @classmethod
    def shift_only(cls, model: ast.Model) -> "EquivalenceConfig":
        """Interval variables of ``model`` without any parameter abstraction."""
        return cls(cls.from_model(model).interval_vars, frozenset())

    @property
    def empty(self):
        return not self.interval_vars and not self.abstract_params


EMPTY_CONFIG = EquivalenceConfig()


class _Prepared:
    """Per-(model, config) lookup tables: interval masks and guard evaluators."""

    def __init__(self, model, cfg: EquivalenceConfig):
        cm = as_compiled(model)
        self.cm = cm
        self.masks = []
        self.any_interval = False
        for cc in cm.actor_class:
            mask = tuple((cc.name, n) in cfg.interval_vars for n in cc.var_names)
            self.any_interval = self.any_interval or any(mask)
            self.masks.append(mask)
        self.masks = tuple(self.masks)
        # (actor index, message name) -> tuple of (arg position, guard fn)
        self.abstract = {}
        by_class = {}
        for cname, msg, param, guard in cfg.abstract_params:
            by_class.setdefault((cname, msg), []).append((param, guard))
        for idx, cc in enumerate(cm.actor_class):
            for srv_name, srv in cc.servers.items():
                entries = by_class.get((cc.name, srv_name))
                if not entries:
                    continue
                spec = []
                for param, guard in entries:
                    pos = srv.params.index(param)
                    spec.append((pos, param, cm._expr(cc, guard, {param})))
                self.abstract[(idx, srv_name)] = tuple(sorted(spec, key=lambda t: t[0]))

    def abstract_args(self, idx, msg):
        spec = self.abstract.get((idx, msg.name))
        if not spec:
            return msg.args
        args = list(msg.args)
        for pos, param, fn in spec:
            args[pos] = bool(fn(Env([], {param: args[pos]}, 0)))
        return tuple(args)


_PREPARED = {}


def prepared(model, cfg: EquivalenceConfig) -> _Prepared:
    cm = as_compiled(model)
    key = (id(cm), cfg)
    p = _PREPARED.get(key)
    if p is None or p.cm is not cm:
        if len(_PREPARED) > 64:
            _PREPARED.clear()
        p = _Prepared(cm, cfg)
        _PREPARED[key] = p
    return p


# ------------------------------------------------------------------ keys


def normalize(s: GlobalState, model, cfg: EquivalenceConfig = EMPTY_CONFIG):
    """Hashable normal form of ``s`` under ``cfg`` (see :func:`canonical_key`)."""
    p = prepared(model, cfg)
    actors = s.actors
    if not actors:
        return ((), s.error)
    base = min(a.time for a in actors)
    out = []
    for idx, a in enumerate(actors):
        vars_ = a.vars
        mask = p.masks[idx]
        if p.any_interval and any(mask):
            vars_ = tuple(
                (v - base if v is not None else None) if m else v for v, m in zip(vars_, mask)
            )
        bag = tuple(
            sorted(
                (m.arrival - base, m.name, m.sender, p.abstract_args(idx, m), m.deadline - base)
                for m in a.bag
            )
        )
        out.append((vars_, bag, a.time - base))
    return (tuple(out), s.error)


def canonical_key(s: GlobalState, model, cfg: EquivalenceConfig = EMPTY_CONFIG) -> bytes:
    """Deterministic byte serialization of :func:`normalize`."""
    return repr(normalize(s, model, cfg)).encode()


def config_for(model, mode) -> EquivalenceConfig:
    """Configuration behind a key mode.

    Both modes shift interval variables with the clocks: they hold instants
    and are only read as ``now - x``, so keeping them fixed while the clocks
    move would change behavior. Relaxed mode additionally compares
    abstractable parameters through their guards.
    """
    if mode == RELAXED:
        return EquivalenceConfig.from_model(model)
    if mode == SHIFT:
        return EquivalenceConfig.shift_only(model)
    return EMPTY_CONFIG


def key_function(model, mode):
    """The state key used by an exploration mode."""
    if mode == IDENTITY:
        return lambda s: s
    cfg = config_for(model, mode)
    p = prepared(model, cfg)
    cm = p.cm
    return lambda s: normalize(s, cm, cfg)


# ----------------------------------------------------- direct definitions


def _bags_match(bag, bag2, delta, idx, p):
    """Perfect matching between ``bag`` and ``bag2`` shifted by ``delta``."""
    if len(bag) != len(bag2):
        return False

    def compatible(m, m2):
        if m.name != m2.name or m.sender != m2.sender:
            return False
        if m.arrival != m2.arrival + delta or m.deadline != m2.deadline + delta:
            return False
        spec = p.abstract.get((idx, m.name)) if p is not None else None
        if not spec:
            return m.args == m2.args
        abstract_pos = {pos: (param, fn) for pos, param, fn in spec}
        for k, (x, y) in enumerate(zip(m.args, m2.args)):
            if k in abstract_pos:
                param, fn = abstract_pos[k]
                if bool(fn(Env([], {param: x}, 0))) != bool(fn(Env([], {param: y}, 0))):
                    return False
            elif x != y:
                return False
        return len(m.args) == len(m2.args)

    n = len(bag)
    adj = [[j for j in range(n) if compatible(bag[i], bag2[j])] for i in range(n)]
    match_of = [-1] * n

    def augment(i, seen):
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_of[j] < 0 or augment(match_of[j], seen):
                match_of[j] = i
                return True
        return False

    return all(augment(i, set()) for i in range(n))


def _equivalent(s, s2, p):
    if len(s.actors) != len(s2.actors) or s.error != s2.error:
        return None
    if not s.actors:
        return 0
    delta = s.actors[0].time - s2.actors[0].time
    for idx, (a, b) in enumerate(zip(s.actors, s2.actors)):
        if a.time - b.time != delta:
            return None
        mask = p.masks[idx] if p is not None else (False,) * len(a.vars)
        if len(a.vars) != len(b.vars):
            return None
        for v, w, m in zip(a.vars, b.vars, mask):
            if m:
                if (v is None) != (w is None):
                    return None
                if v is not None and v - w != delta:
                    return None
            elif v != w or type(v) is not type(w):
                return None
        if not _bags_match(a.bag, b.bag, delta, idx, p):
            return None
    return delta


def shift_equivalent(s: GlobalState, s2: GlobalState, model=None):
    """The offset ``delta`` with ``s = s2 + delta`` if the states are shift equivalent, else ``None``.

    Every local clock must differ by the same ``delta`` and the bags must
    coincide once ``s2``'s arrivals and deadlines are moved by ``delta``.
    State variables must be equal, except that when ``model`` is given its
    interval variables must differ by ``delta`` as well.
    """
    if model is None:
        return _equivalent(s, s2, None)
    return _equivalent(s, s2, prepared(model, EquivalenceConfig.shift_only(model)))


def relaxed_shift_equivalent(s: GlobalState, s2: GlobalState, model, cfg: EquivalenceConfig):
    """Like :func:`shift_equivalent`, with interval variables shifted by ``delta``
    and abstractable parameters compared only through their guards."""
    return _equivalent(s, s2, prepared(model, cfg))
