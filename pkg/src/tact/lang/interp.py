"""Interpreter for message-server bodies.

Statements are compiled once per model into a flat table; a continuation is
a tuple of statement ids, so a suspended execution (needed by the
fine-grained semantics) is a hashable value. :func:`step` executes exactly one
statement; :func:`run_body` drives it to completion for the coarse-grained
semantics.
"""

from __future__ import annotations

import weakref
from typing import NamedTuple

from . import ast
from .errors import EvalError
from ..semantics.state import INF, GlobalState, LocalState, Message, sort_bag


class Env:
    """Mutable scratch space for one execution path."""

    __slots__ = ("vars", "locals", "time", "sent")

    def __init__(self, vars_, locals_, time, sent=None):
        self.vars = vars_
        self.locals = locals_
        self.time = time
        self.sent = sent if sent is not None else []

    def fork(self):
        return Env(list(self.vars), dict(self.locals), self.time, list(self.sent))


class Outcome(NamedTuple):
    local: LocalState
    emitted: tuple  # of (destination index, Message)


# statement kinds
ASSIGN, NONDET, IF, DELAY, SEND, SKIP = range(6)


class CompiledClass:
    def __init__(self, cls):
        self.cls = cls
        self.name = cls.name
        self.var_names = tuple(v.name for v in cls.statevars)
        self.var_index = {n: i for i, n in enumerate(self.var_names)}
        self.interval_mask = tuple(v.interval for v in cls.statevars)
        self.capacity = cls.capacity
        self.servers = {}

    def default_vars(self):
        out = []
        for v in self.cls.statevars:
            if v.interval:
                out.append(None)
            elif v.type == ast.BOOL:
                out.append(False)
            else:
                out.append(0)
        return out


class CompiledServer(NamedTuple):
    name: str
    params: tuple
    body: tuple  # statement ids
    priority: int
    guards: dict  # param -> compiled guard


def _check_int(v, what):
    if type(v) is not int:
        raise EvalError(f"{what}: expected int, got {v!r}")
    return v


def _check_bool(v, what):
    if type(v) is not bool:
        raise EvalError(f"{what}: expected boolean, got {v!r}")
    return v


_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
}
_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


class CompiledModel:
    """Executable form of a :class:`~tact.lang.ast.Model`."""

    def __init__(self, model: ast.Model):
        self.model = model
        self.stmts = []
        self.n = len(model.instances)
        self.classes = {c.name: CompiledClass(c) for c in model.classes}
        self.names = tuple(i.name for i in model.instances)
        self.actor_class = tuple(self.classes[i.class_name] for i in model.instances)
        self.bindings = []
        idx = model.instance_index
        for inst in model.instances:
            cls = model.cls(inst.class_name)
            self.bindings.append({k.name: idx[b] for k, b in zip(cls.known, inst.bindings)})
        self.interval_mask = tuple(c.interval_mask for c in self.actor_class)
        for cc in self.classes.values():
            for srv in cc.cls.servers:
                cc.servers[srv.name] = self._compile_server(cc, srv)

    # -- expressions
    def _expr(self, cc, e, local_names):
        if isinstance(e, (ast.IntLit, ast.BoolLit)):
            v = e.value
            return lambda env: v
        if isinstance(e, ast.Now):
            return lambda env: env.time
        if isinstance(e, ast.Var):
            name = e.name
            if name in local_names:
                def read_local(env):
                    try:
                        return env.locals[name]
                    except KeyError:
                        raise EvalError(f"unbound variable {name!r}") from None
                return read_local
            if name not in cc.var_index:
                def unknown(env):
                    raise EvalError(f"unknown variable {name!r}")
                return unknown
            i = cc.var_index[name]
            if cc.interval_mask[i]:
                def read_interval(env):
                    v = env.vars[i]
                    if v is None:
                        raise EvalError(f"interval variable {name!r} read before assignment")
                    return v
                return read_interval
            return lambda env: env.vars[i]
        if isinstance(e, ast.Unary):
            f = self._expr(cc, e.operand, local_names)
            if e.op == "-":
                return lambda env: -_check_int(f(env), "negation")
            return lambda env: not _check_bool(f(env), "negation")
        if isinstance(e, ast.Binary):
            lf = self._expr(cc, e.left, local_names)
            rf = self._expr(cc, e.right, local_names)
            op = e.op
            if op == "&&":
                return lambda env: _check_bool(lf(env), op) and _check_bool(rf(env), op)
            if op == "||":
                return lambda env: _check_bool(lf(env), op) or _check_bool(rf(env), op)
            if op in _ARITH:
                fn = _ARITH[op]
                return lambda env: fn(_check_int(lf(env), op), _check_int(rf(env), op))
            if op in _CMP:
                fn = _CMP[op]
                return lambda env: fn(_check_int(lf(env), op), _check_int(rf(env), op))
            if op == "==":
                def eq(env):
                    a, b = lf(env), rf(env)
                    if type(a) is not type(b):
                        raise EvalError(f"cannot compare {a!r} with {b!r}")
                    return a == b
                return eq
            if op == "!=":
                def ne(env):
                    a, b = lf(env), rf(env)
                    if type(a) is not type(b):
                        raise EvalError(f"cannot compare {a!r} with {b!r}")
                    return a != b
                return ne
        raise EvalError(f"cannot compile expression {e!r}")

    # -- statements
    def _assign_target(self, cc, name, local_names):
        if name in local_names:
            return (True, name)
        if name not in cc.var_index:
            raise EvalError(f"assignment to unknown variable {name!r}")
        return (False, cc.var_index[name])

    def _block(self, cc, stmts, local_names):
        return tuple(self._stmt(cc, s, local_names) for s in stmts)

    def _stmt(self, cc, s, local_names):
        sid = len(self.stmts)
        self.stmts.append(None)
        if isinstance(s, ast.Assign):
            rec = (ASSIGN, self._assign_target(cc, s.var, local_names), self._expr(cc, s.expr, local_names))
        elif isinstance(s, ast.NondetAssign):
            rec = (
                NONDET,
                self._assign_target(cc, s.var, local_names),
                tuple(self._expr(cc, c, local_names) for c in s.choices),
            )
        elif isinstance(s, ast.If):
            rec = (
                IF,
                self._expr(cc, s.cond, local_names),
                self._block(cc, s.then, local_names),
                self._block(cc, s.orelse, local_names),
            )
        elif isinstance(s, ast.Delay):
            rec = (DELAY, self._expr(cc, s.amount, local_names))
        elif isinstance(s, ast.Send):
            t = s.target
            if isinstance(t, ast.SelfRef):
                target = ("self", None)
            elif isinstance(t, ast.SlotRef):
                target = ("slot", t.name)
            else:
                target = ("find", self._expr(cc, t.key, local_names))
            rec = (
                SEND,
                target,
                s.msg,
                tuple(self._expr(cc, a, local_names) for a in s.args),
                self._expr(cc, s.after, local_names) if s.after is not None else None,
                self._expr(cc, s.deadline, local_names) if s.deadline is not None else None,
            )
        elif isinstance(s, ast.Skip):
            rec = (SKIP,)
        else:
            raise EvalError(f"unknown statement {s!r}")
        self.stmts[sid] = rec
        return sid

    def _compile_server(self, cc, srv):
        local_names = set(srv.param_names)
        for s in ast.walk_stmts(srv.body):
            if isinstance(s, (ast.Assign, ast.NondetAssign)) and s.decl:
                local_names.add(s.var)
        body = self._block(cc, srv.body, local_names)
        guards = {a.param: self._expr(cc, a.guard, {a.param}) for a in srv.abstracts}
        return CompiledServer(srv.name, srv.param_names, body, srv.priority, guards)

    # -- helpers used by the semantics
    def server(self, actor_idx, msg_name) -> CompiledServer:
        cc = self.actor_class[actor_idx]
        srv = cc.servers.get(msg_name)
        if srv is None:
            raise EvalError(f"{self.names[actor_idx]} has no message server {msg_name!r}")
        return srv

    def priority(self, actor_idx, msg_name):
        srv = self.actor_class[actor_idx].servers.get(msg_name)
        return srv.priority if srv is not None else 0

    def label(self, actor_idx, msg_name):
        return f"{self.names[actor_idx]}.{msg_name}"

    def resolve_target(self, actor_idx, target, env):
        kind, data = target
        if kind == "self":
            return actor_idx
        if kind == "slot":
            try:
                return self.bindings[actor_idx][data]
            except KeyError:
                raise EvalError(f"unknown known rebec {data!r}") from None
        key = data(env)
        if type(key) is not int or not 0 <= key < self.n:
            raise EvalError(f"find({key!r}) does not name an actor")
        return key


_COMPILED = {}


def compiled(model: ast.Model) -> CompiledModel:
    """Return the (cached) compiled form of ``model``."""
    key = id(model)
    cm = _COMPILED.get(key)
    if cm is None or cm.model is not model:
        cm = CompiledModel(model)
        _COMPILED[key] = cm
        weakref.finalize(model, _COMPILED.pop, key, None)
    return cm


def as_compiled(model) -> CompiledModel:
    return model if isinstance(model, CompiledModel) else compiled(model)


def step(cm: CompiledModel, actor_idx, env: Env, cont: tuple):
    """Execute the first statement of ``cont``.

    Returns a list of ``(env, cont, delay)`` branches; ``delay`` is the
    amount of a ``delay`` statement (0 otherwise). ``env`` is mutated in
    place for deterministic statements and forked for nondeterministic ones.
    """
    rec = cm.stmts[cont[0]]
    rest = cont[1:]
    kind = rec[0]
    if kind == ASSIGN:
        _assign(env, rec[1], rec[2](env))
        return [(env, rest, 0)]
    if kind == NONDET:
        values = [f(env) for f in rec[2]]
        out = []
        for k, v in enumerate(values):
            e = env if k == len(values) - 1 else env.fork()
            _assign(e, rec[1], v)
            out.append((e, rest, 0))
        # forks were taken before the last assignment, so order is preserved
        return out
    if kind == IF:
        c = rec[1](env)
        if type(c) is not bool:
            raise EvalError(f"condition evaluated to {c!r}")
        return [(env, (rec[2] if c else rec[3]) + rest, 0)]
    if kind == DELAY:
        d = _check_int(rec[1](env), "delay")
        if d < 0:
            raise EvalError(f"negative delay {d}")
        return [(env, rest, d)]
    if kind == SEND:
        _, target, name, arg_fns, after_fn, dl_fn = rec
        dest = cm.resolve_target(actor_idx, target, env)
        srv = cm.actor_class[dest].servers.get(name)
        if srv is None or len(srv.params) != len(arg_fns):
            raise EvalError(f"{cm.names[dest]} cannot receive {name}/{len(arg_fns)}")
        args = tuple(f(env) for f in arg_fns)
        after = _check_int(after_fn(env), "after") if after_fn else 0
        if after < 0:
            raise EvalError(f"negative after {after}")
        deadline = env.time + _check_int(dl_fn(env), "deadline") if dl_fn else INF
        env.sent.append((dest, Message(env.time + after, name, actor_idx, args, deadline)))
        return [(env, rest, 0)]
    return [(env, rest, 0)]


def _assign(env, target, value):
    is_local, key = target
    if is_local:
        env.locals[key] = value
    else:
        env.vars[key] = value


def bind_params(srv: CompiledServer, args):
    if len(args) != len(srv.params):
        raise EvalError(f"{srv.name} expects {len(srv.params)} arguments, got {len(args)}")
    return dict(zip(srv.params, args))


def run_body(cm, actor_idx, env: Env, body):
    """Run ``body`` to completion; returns finished environments in source order."""
    done = []
    stack = [(env, body)]
    while stack:
        e, cont = stack.pop()
        while cont:
            branches = step(cm, actor_idx, e, cont)
            if len(branches) > 1:
                for b in reversed(branches[1:]):
                    stack.append((b[0], b[1]) if not b[2] else _delayed(b))
            e, cont, d = branches[0]
            e.time += d
        done.append(e)
    # the stack is LIFO, so pushing later branches first keeps source order
    return done


def _delayed(branch):
    e, cont, d = branch
    e.time += d
    return (e, cont)


def execute_server(actor: LocalState, msg: Message, model, actor_idx: int):
    """Handle ``msg`` atomically; returns the list of possible :class:`Outcome`.

    Local time first advances to ``max(actor.time, msg.arrival)``; ``msg`` is
    removed from the bag. Emitted messages are returned, not delivered.
    """
    cm = as_compiled(model)
    srv = cm.server(actor_idx, msg.name)
    i = actor.bag.index(msg)
    bag = actor.bag[:i] + actor.bag[i + 1:]
    env = Env(list(actor.vars), bind_params(srv, msg.args), max(actor.time, msg.arrival))
    out = []
    for e in run_body(cm, actor_idx, env, srv.body):
        out.append(Outcome(LocalState(tuple(e.vars), bag, e.time), tuple(e.sent)))
    return out


def deliver(cm, actors, emitted):
    """Add emitted messages to receiver bags; returns (actors, error)."""
    if not emitted:
        return actors, None
    actors = list(actors)
    incoming = {}
    for dest, m in emitted:
        incoming.setdefault(dest, []).append(m)
    for dest, msgs in incoming.items():
        a = actors[dest]
        cap = cm.actor_class[dest].capacity
        if len(a.bag) + len(msgs) > cap:
            return tuple(actors), f"bag overflow at {cm.names[dest]} (capacity {cap})"
        actors[dest] = a._replace(bag=sort_bag(a.bag + tuple(msgs)))
    return tuple(actors), None


def initial_state(model) -> GlobalState:
    """Run every constructor at time 0 in declaration order."""
    cm = as_compiled(model)
    actors = [LocalState(tuple(cc.default_vars()), (), 0) for cc in cm.actor_class]
    sent = []
    for idx, inst in enumerate(cm.model.instances):
        cc = cm.actor_class[idx]
        ctor = cc.cls.constructor
        if ctor is None:
            continue
        srv = cc.servers[ctor.name]
        env = Env(list(actors[idx].vars), bind_params(srv, inst.args), 0)
        results = run_body(cm, idx, env, srv.body)
        if len(results) != 1:
            raise EvalError(f"constructor of {inst.name} is nondeterministic")
        e = results[0]
        actors[idx] = LocalState(tuple(e.vars), actors[idx].bag, e.time)
        sent.extend(e.sent)
    actors, err = deliver(cm, tuple(actors), sent)
    if err:
        raise EvalError(err)
    return GlobalState(actors)
