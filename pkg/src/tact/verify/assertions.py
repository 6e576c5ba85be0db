"""A small assertion language over explored state spaces.

Forms::

    inst.var <= N      var <= N       (also >=)
    never kind         never inst.kind      (kind is a failure kind, e.g. timeout)
    budget(P)          transmission time of pattern P within its latency budget

``P`` is a pattern prefix or, when a model has a single pattern of that
kind, the kind itself (``pub-sub``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..lang import ast
from ..lang.errors import TactError
from ..lang.interp import as_compiled
from ..patterns.params import KINDS, PUB_SUB, FailureKind
from ..semantics.equivalence import key_function
from ..semantics.explore import _KEY_MODE, BFTTS_RELAXED, DEFAULT_MAX_STATES, explore
from ..semantics.ftts import ftts_successors, initial_state
from .bounds import requirement_bound

LE, GE, NEVER = "<=", ">=", "never"

LATENCY_VAR = "transmissionTime"


class AssertionSyntaxError(TactError):
    pass


@dataclass(frozen=True)
class Assertion:
    name: str
    op: str
    text: str
    targets: tuple = ()  # (actor index, var index) for bounds; actor indices for never
    var: Optional[str] = None
    bound: Optional[int] = None
    event: Optional[str] = None  # failure message name
    diagnostic: Optional[str] = None

    def violated_by_state(self, s):
        if self.op == NEVER:
            return False
        for idx, vi in self.targets:
            v = s.actors[idx].vars[vi]
            if self.op == LE and v > self.bound:
                return True
            if self.op == GE and v < self.bound:
                return True
        return False


@dataclass
class Verdict:
    name: str
    passed: bool
    bound: Optional[int] = None
    counterexample: Optional[list] = None  # [(label or None, state index), ...]
    states_checked: int = 0
    complete: bool = True
    diagnostic: Optional[str] = None
    text: str = ""
    final_state: object = None

    @property
    def witness(self):
        if not self.counterexample:
            return []
        return [lbl for lbl, _ in self.counterexample if lbl is not None]

    def as_dict(self):
        d = {
            "name": self.name,
            "assertion": self.text,
            "pass": self.passed,
            "bound": self.bound,
            "witness": self.witness,
            "statesChecked": self.states_checked,
            "complete": self.complete,
        }
        if self.diagnostic:
            d["diagnostic"] = self.diagnostic
        return d


_BOUND_RE = re.compile(r"^\s*(?:([A-Za-z_]\w*)\.)?([A-Za-z_]\w*)\s*(<=|>=)\s*(-?\d+)\s*$")
_NEVER_RE = re.compile(r"^\s*never\s+(?:([A-Za-z_]\w*)\.)?([A-Za-z_]\w*)\s*$")
_BUDGET_RE = re.compile(r"^\s*budget\s*\(\s*([\w-]*)\s*\)\s*$")


def _var_targets(model, inst, var):
    cm = as_compiled(model)
    if inst is not None:
        if inst not in cm.names:
            raise AssertionSyntaxError(f"unknown actor {inst!r}")
        idx = cm.names.index(inst)
        cc = cm.actor_class[idx]
        if var not in cc.var_index:
            raise AssertionSyntaxError(f"{inst} ({cc.name}) has no state variable {var!r}")
        return [(idx, cc.var_index[var])], cc.cls.statevar(var)
    owners = [c for c in model.classes if c.statevar(var) is not None]
    if not owners:
        raise AssertionSyntaxError(f"unknown state variable {var!r}")
    if len(owners) > 1:
        names = ", ".join(c.name for c in owners)
        raise AssertionSyntaxError(f"{var!r} is declared by several classes ({names}); qualify it as actor.{var}")
    cls = owners[0]
    targets = [(i, cm.actor_class[i].var_index[var]) for i, cc in enumerate(cm.actor_class) if cc.name == cls.name]
    return targets, cls.statevar(var)


def _budget_target(fragments, ref):
    matches = [f for f in fragments if f.prefix == ref]
    if not matches and ref in KINDS:
        matches = [f for f in fragments if f.kind == ref]
        if len(matches) > 1:
            raise AssertionSyntaxError(f"several {ref} patterns; name one by its prefix")
    if not matches:
        raise AssertionSyntaxError(f"no pattern {ref!r}")
    if len(matches) > 1:
        raise AssertionSyntaxError(f"prefix {ref!r} is ambiguous")
    f = matches[0]
    # the publish-subscribe service records the latency; elsewhere the requester side does
    inst = f.service if f.kind == PUB_SUB else f.requester
    return f, inst


def parse_assertion(name, text, model: ast.Model, fragments=()) -> Assertion:
    m = _BUDGET_RE.match(text)
    if m:
        f, inst = _budget_target(fragments, m.group(1))
        bound = requirement_bound(f.kind, f.params)
        targets, _ = _var_targets(model, inst, LATENCY_VAR)
        return Assertion(name, LE, text.strip(), tuple(targets), LATENCY_VAR, bound.value,
                         diagnostic=bound.diagnostic)
    m = _NEVER_RE.match(text)
    if m:
        inst, kind = m.groups()
        fk = FailureKind.from_message(kind) or _kind_by_value(kind)
        if fk is None:
            raise AssertionSyntaxError(f"unknown failure kind {kind!r}")
        cm = as_compiled(model)
        if inst is not None:
            if inst not in cm.names:
                raise AssertionSyntaxError(f"unknown actor {inst!r}")
            targets = (cm.names.index(inst),)
        else:
            targets = tuple(range(len(cm.names)))
        return Assertion(name, NEVER, text.strip(), targets, event=fk.message)
    m = _BOUND_RE.match(text)
    if m:
        inst, var, op, n = m.groups()
        targets, decl = _var_targets(model, inst, var)
        if decl.interval:
            raise AssertionSyntaxError(f"{var!r} holds an instant; bounds on it are not meaningful")
        if decl.type != ast.INT:
            raise AssertionSyntaxError(f"{var!r} is not an int variable")
        return Assertion(name, op, text.strip(), tuple(targets), var, int(n))
    raise AssertionSyntaxError(f"cannot parse assertion {text!r}")


def _kind_by_value(kind):
    try:
        return FailureKind(kind)
    except ValueError:
        return None


def label_violates(a: Assertion, label, cm):
    if a.op != NEVER or label.startswith("expired:"):
        return False
    inst, _, msg = label.rpartition(".")
    return msg == a.event and inst in {cm.names[i] for i in a.targets}


# ------------------------------------------------------------------ checking


def check_assertion(ts, a: Assertion, model) -> Verdict:
    """Scan every state (or transition, for event absence) of ``ts``.

    States are indexed in breadth-first order, so the first violation found
    has a shortest trace.
    """
    cm = as_compiled(model)
    verdict = Verdict(a.name, True, a.bound, states_checked=len(ts.states), complete=ts.complete,
                      diagnostic=a.diagnostic, text=a.text)
    if a.op == NEVER:
        best = None
        for src, lbl, dst in ts.transitions:
            if label_violates(a, lbl, cm):
                if best is None or ts.depth[src] < ts.depth[best[0]]:
                    best = (src, lbl, dst)
        if best is not None:
            src, lbl, dst = best
            verdict.passed = False
            verdict.counterexample = _with_initial(ts.trace_to(src) + [(lbl, dst)])
            verdict.final_state = ts.states[dst]
        return verdict
    for i, s in enumerate(ts.states):
        if a.violated_by_state(s):
            verdict.passed = False
            verdict.counterexample = _with_initial(ts.trace_to(i))
            verdict.final_state = s
            break
    return verdict


def _with_initial(path):
    return [(None, 0)] + list(path)


@dataclass
class VerifyResult:
    verdicts: list
    explorations: list = field(default_factory=list)

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)

    @property
    def ts(self):
        return self.explorations[-1] if self.explorations else None


def verify(model, assertions, mode=BFTTS_RELAXED, max_states=DEFAULT_MAX_STATES,
           full_scan=False, jobs=1) -> VerifyResult:
    """Check ``assertions`` on the state space of ``model``.

    By default exploration stops at the first violation of any pending
    assertion; the violated ones fail and the others are checked by a fresh
    exploration. With ``full_scan`` the space is generated once and every
    assertion is checked on all of it.
    """
    cm = as_compiled(model)
    assertions = list(assertions)
    if full_scan:
        ts = explore(cm, mode, max_states, jobs=jobs)
        return VerifyResult([check_assertion(ts, a, cm) for a in assertions], [ts])

    decided = {}
    explorations = []
    pending = list(assertions)
    while pending:
        def stop(s, _p=tuple(pending)):
            return any(a.violated_by_state(s) for a in _p)

        def stop_label(lbl, _p=tuple(pending)):
            return any(label_violates(a, lbl, cm) for a in _p)

        ts = explore(cm, mode, max_states, stop=stop, stop_label=stop_label, jobs=jobs)
        explorations.append(ts)
        if ts.violation is None:
            for a in pending:
                decided[a.name] = Verdict(a.name, True, a.bound, states_checked=len(ts.states),
                                          complete=ts.complete, diagnostic=a.diagnostic, text=a.text)
            break
        trace = _with_initial(ts.counterexample())
        final = ts.states[ts.violation]
        still = []
        for a in pending:
            if ts.violation_edge is not None:
                hit = label_violates(a, ts.violation_edge[1], cm)
            else:
                hit = a.violated_by_state(final)
            if hit:
                decided[a.name] = Verdict(a.name, False, a.bound, trace, len(ts.states), ts.complete,
                                          a.diagnostic, a.text, final)
            else:
                still.append(a)
        pending = still
    return VerifyResult([decided[a.name] for a in assertions], explorations)


# ------------------------------------------------------------------- replay


class ReplayError(TactError):
    pass


def replay(model, ts, trace):
    """Re-execute ``trace`` with the coarse-grained semantics.

    Every step must be a transition with the recorded label whose target is
    equivalent (under the key of ``ts.mode``) to the recorded state. Returns
    the list of concrete states visited, starting with the initial state.
    """
    cm = as_compiled(model)
    key = key_function(cm.model, _KEY_MODE[ts.mode])
    s = initial_state(cm)
    if key(s) != key(ts.states[trace[0][1]]):
        raise ReplayError("trace does not start in the initial state")
    visited = [s]
    for lbl, idx in trace[1:]:
        want = key(ts.states[idx])
        for l2, t in ftts_successors(s, cm):
            if l2 == lbl and key(t) == want:
                s = t
                break
        else:
            raise ReplayError(f"no {lbl!r} transition to state {idx}")
        visited.append(s)
    return visited


def replay_confirms(model, ts, verdict: Verdict, assertion: Assertion) -> bool:
    """True iff replaying the counterexample ends in a real violation."""
    if verdict.passed or not verdict.counterexample:
        return False
    states = replay(model, ts, verdict.counterexample)
    if assertion.op == NEVER:
        return label_violates(assertion, verdict.counterexample[-1][0] or "", as_compiled(model))
    return assertion.violated_by_state(states[-1])
