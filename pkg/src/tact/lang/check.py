"""Static admissibility checks.

A model with no diagnostics is safe to explore under every reduction mode:
time is only read through ``now`` assignments to interval variables and
``now - x`` differences, and every abstractable parameter is observed only
through its declared guard.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast

NOW_USAGE = "now-usage"
INTERVAL_MISUSE = "interval variable misuse"
ABSTRACT_ESCAPE = "abstractable parameter escapes condition"
BAD_GUARD = "invalid abstraction guard"
UNRESOLVED = "unresolved reference"
TYPE_ERROR = "type error"
DUPLICATE = "duplicate declaration"
MISSING_CTOR = "missing constructor"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    where: str = ""
    line: int = 0
    col: int = 0

    def __str__(self):
        loc = f"{self.line}:{self.col}: " if self.line else ""
        where = f"{self.where}: " if self.where else ""
        return f"{loc}{where}{self.code}: {self.message}"


class _ServerChecker:
    def __init__(self, model, cls, srv, out):
        self.model = model
        self.cls = cls
        self.srv = srv
        self.out = out
        self.where = f"{cls.name}.{srv.name}"
        self.scope = {}
        for p in srv.params:
            if p.type == ast.TIME:
                self.diag(TYPE_ERROR, f"parameter {p.name!r} may not have type time", p)
            if p.name in self.scope:
                self.diag(DUPLICATE, f"parameter {p.name!r} declared twice", p)
            if cls.statevar(p.name):
                self.diag(DUPLICATE, f"parameter {p.name!r} shadows a state variable", p)
            self.scope[p.name] = p.type
        self.abstracted = {}
        for a in srv.abstracts:
            if a.param not in self.scope:
                self.diag(UNRESOLVED, f"@abstract names unknown parameter {a.param!r}", a)
                continue
            self.abstracted[a.param] = a.guard
            self._check_guard(a)

    def diag(self, code, message, node=None):
        line, col = getattr(node, "pos", (0, 0)) if node is not None else (0, 0)
        self.out.append(Diagnostic(code, message, self.where, line, col))

    # -- guards
    def _check_guard(self, a):
        for e in ast.walk_expr(a.guard):
            if isinstance(e, ast.Var) and e.name != a.param:
                self.diag(BAD_GUARD, f"guard of {a.param!r} mentions {e.name!r}", e)
            elif isinstance(e, ast.Now):
                self.diag(BAD_GUARD, "guard may not read now", e)
            elif isinstance(e, ast.Binary) and e.op in ast.ARITH_OPS:
                self.diag(BAD_GUARD, "guard may only compare the parameter with constants", e)
        if self.expr_type(a.guard, in_guard=True) != ast.BOOL:
            self.diag(BAD_GUARD, f"guard of {a.param!r} is not a boolean formula", a.guard)

    # -- expressions
    def var_type(self, name, node):
        if name in self.scope:
            return self.scope[name]
        v = self.cls.statevar(name)
        if v is None:
            self.diag(UNRESOLVED, f"unknown variable {name!r}", node)
            return None
        return v.type

    def is_interval(self, name):
        if name in self.scope:
            return False
        v = self.cls.statevar(name)
        return v is not None and v.interval

    def expr_type(self, e, in_guard=False):
        """Type of ``e``; reports misuse of ``now`` and interval variables."""
        if isinstance(e, ast.IntLit):
            return ast.INT
        if isinstance(e, ast.BoolLit):
            return ast.BOOL
        if isinstance(e, ast.Now):
            self.diag(NOW_USAGE, "now may only be assigned to an interval variable or used as now - x", e)
            return None
        if isinstance(e, ast.Var):
            if self.is_interval(e.name):
                self.diag(INTERVAL_MISUSE, f"{e.name!r} may only be assigned now or read as now - {e.name}", e)
                return None
            return self.var_type(e.name, e)
        if isinstance(e, ast.Unary):
            t = self.expr_type(e.operand, in_guard)
            want = ast.INT if e.op == "-" else ast.BOOL
            if t is not None and t != want:
                self.diag(TYPE_ERROR, f"operand of {e.op!r} must be {want}", e)
            return want
        if isinstance(e, ast.Binary):
            if (
                e.op == "-"
                and isinstance(e.left, ast.Now)
                and isinstance(e.right, ast.Var)
                and self.is_interval(e.right.name)
            ):
                return ast.INT
            lt = self.expr_type(e.left, in_guard)
            rt = self.expr_type(e.right, in_guard)
            if e.op in ast.ARITH_OPS:
                self._want(e, lt, rt, (ast.INT,))
                return ast.INT
            if e.op in ast.LOGIC_OPS:
                self._want(e, lt, rt, (ast.BOOL,))
                return ast.BOOL
            if e.op in ("==", "!="):
                if lt is not None and rt is not None and lt != rt:
                    self.diag(TYPE_ERROR, f"cannot compare {lt} with {rt}", e)
            else:
                self._want(e, lt, rt, (ast.INT,))
            return ast.BOOL
        raise TypeError(e)

    def _want(self, e, lt, rt, allowed):
        for t in (lt, rt):
            if t is not None and t not in allowed:
                self.diag(TYPE_ERROR, f"operator {e.op!r} does not accept {t}", e)

    def want_type(self, e, want, what):
        t = self.expr_type(e)
        if t is not None and t != want:
            self.diag(TYPE_ERROR, f"{what} must be {want}, found {t}", e)

    # -- abstractable parameters
    def _escapes(self, e, param, guard):
        """Occurrences of ``param`` in ``e`` outside sub-expressions equal to ``guard``."""
        if guard is not None and e == guard:
            return []
        if isinstance(e, ast.Var):
            return [e] if e.name == param else []
        if isinstance(e, ast.Unary):
            return self._escapes(e.operand, param, guard)
        if isinstance(e, ast.Binary):
            return self._escapes(e.left, param, guard) + self._escapes(e.right, param, guard)
        return []

    def _scan_abstract(self, e, in_condition):
        for param, guard in self.abstracted.items():
            for occ in self._escapes(e, param, guard if in_condition else None):
                self.diag(ABSTRACT_ESCAPE, f"{param!r} is used outside its guard", occ)

    # -- statements
    def check_block(self, stmts):
        for s in stmts:
            self.check_stmt(s)

    def _declare(self, s, typ):
        if typ == ast.TIME:
            self.diag(NOW_USAGE, f"local {s.var!r} may not have type time", s)
        if s.var in self.scope and self.scope[s.var] != typ:
            self.diag(DUPLICATE, f"local {s.var!r} redeclared with a different type", s)
        if self.cls.statevar(s.var):
            self.diag(DUPLICATE, f"local {s.var!r} shadows a state variable", s)
        self.scope[s.var] = typ

    def _assign_target(self, s):
        if s.var in self.abstracted:
            self.diag(ABSTRACT_ESCAPE, f"{s.var!r} is assigned", s)
        return self.var_type(s.var, s)

    def check_stmt(self, s):
        if isinstance(s, ast.Assign):
            if s.decl:
                self._declare(s, s.decl)
            self._scan_abstract(s.expr, False)
            if self.is_interval(s.var):
                if not isinstance(s.expr, ast.Now):
                    self.diag(INTERVAL_MISUSE, f"interval variable {s.var!r} may only be assigned now", s)
                return
            want = self._assign_target(s)
            if want is not None:
                self.want_type(s.expr, want, f"value assigned to {s.var!r}")
            else:
                self.expr_type(s.expr)
        elif isinstance(s, ast.NondetAssign):
            if s.decl:
                self._declare(s, s.decl)
            if self.is_interval(s.var):
                self.diag(INTERVAL_MISUSE, f"interval variable {s.var!r} may only be assigned now", s)
            want = self._assign_target(s)
            for c in s.choices:
                self._scan_abstract(c, False)
                if want is not None:
                    self.want_type(c, want, f"choice for {s.var!r}")
        elif isinstance(s, ast.If):
            self._scan_abstract(s.cond, True)
            self.want_type(s.cond, ast.BOOL, "condition")
            self.check_block(s.then)
            self.check_block(s.orelse)
        elif isinstance(s, ast.Delay):
            self._scan_abstract(s.amount, False)
            self.want_type(s.amount, ast.INT, "delay amount")
        elif isinstance(s, ast.Send):
            self.check_send(s)
        elif isinstance(s, ast.Skip):
            pass
        else:
            raise TypeError(s)

    def check_send(self, s):
        exprs = list(s.args)
        for extra in (s.after, s.deadline):
            if extra is not None:
                exprs.append(extra)
                self.want_type(extra, ast.INT, "after/deadline")
        for e in exprs:
            self._scan_abstract(e, False)
        candidates = self._target_classes(s)
        if candidates is None:
            for a in s.args:
                self.expr_type(a)
            return
        arg_types = [self.expr_type(a) for a in s.args]
        matching = []
        for c in candidates:
            srv = c.server(s.msg)
            if srv is None or srv.is_constructor:
                continue
            if len(srv.params) == len(s.args):
                matching.append(srv)
        if not matching:
            names = ", ".join(c.name for c in candidates) or "any class"
            self.diag(UNRESOLVED, f"no message server {s.msg}/{len(s.args)} in {names}", s)
            return
        srv = matching[0]
        for p, t, a in zip(srv.params, arg_types, s.args):
            if t is not None and t != p.type:
                self.diag(TYPE_ERROR, f"argument {p.name!r} of {s.msg} must be {p.type}, found {t}", a)

    def _target_classes(self, s):
        t = s.target
        if isinstance(t, ast.SelfRef):
            return [self.cls]
        if isinstance(t, ast.SlotRef):
            for k in self.cls.known:
                if k.name == t.name:
                    if not self.model.has_class(k.class_name):
                        return None
                    return [self.model.cls(k.class_name)]
            self.diag(UNRESOLVED, f"unknown known rebec {t.name!r}", s)
            return None
        self.want_type(t.key, ast.INT, "find key")
        return list(self.model.classes)


def _check_class(model, cls, out):
    where = cls.name
    seen = set()
    for v in cls.statevars:
        if v.name in seen:
            out.append(Diagnostic(DUPLICATE, f"state variable {v.name!r} declared twice", where, *v.pos))
        seen.add(v.name)
        if v.interval and v.type != ast.TIME:
            out.append(Diagnostic(TYPE_ERROR, f"interval variable {v.name!r} must have type time", where, *v.pos))
        if v.type == ast.TIME and not v.interval:
            out.append(Diagnostic(NOW_USAGE, f"time variable {v.name!r} must be declared interval", where, *v.pos))
    for k in cls.known:
        if not model.has_class(k.class_name):
            out.append(Diagnostic(UNRESOLVED, f"known rebec {k.name!r} has unknown class {k.class_name!r}", where, *k.pos))
    names = set()
    for srv in cls.servers:
        if srv.name in names:
            out.append(Diagnostic(DUPLICATE, f"message server {srv.name!r} declared twice", where, *srv.pos))
        names.add(srv.name)
        chk = _ServerChecker(model, cls, srv, out)
        chk.check_block(srv.body)
    if cls.constructor is None:
        out.append(Diagnostic(MISSING_CTOR, f"class {cls.name} has no constructor", where, *cls.pos))


def _check_instances(model, out):
    names = {i.name: i for i in model.instances}
    for inst in model.instances:
        where = f"main.{inst.name}"
        if not model.has_class(inst.class_name):
            out.append(Diagnostic(UNRESOLVED, f"unknown class {inst.class_name!r}", where, *inst.pos))
            continue
        cls = model.cls(inst.class_name)
        if len(inst.bindings) != len(cls.known):
            out.append(Diagnostic(UNRESOLVED, "known rebec arity mismatch", where, *inst.pos))
        for slot, bound in zip(cls.known, inst.bindings):
            target = names.get(bound)
            if target is None:
                out.append(Diagnostic(UNRESOLVED, f"binding {bound!r} does not name an instance", where, *inst.pos))
            elif target.class_name != slot.class_name:
                out.append(Diagnostic(
                    TYPE_ERROR,
                    f"slot {slot.name!r} expects {slot.class_name}, {bound!r} is {target.class_name}",
                    where, *inst.pos,
                ))
        ctor = cls.constructor
        if ctor is None:
            continue
        if len(inst.args) != len(ctor.params):
            out.append(Diagnostic(
                TYPE_ERROR, f"constructor of {cls.name} takes {len(ctor.params)} arguments", where, *inst.pos
            ))
            continue
        for p, a in zip(ctor.params, inst.args):
            is_bool = isinstance(a, bool)
            if (p.type == ast.BOOL) != is_bool:
                out.append(Diagnostic(TYPE_ERROR, f"argument {p.name!r} must be {p.type}", where, *inst.pos))


def static_check(model: ast.Model) -> list:
    """Return the list of diagnostics for ``model``; empty means admissible."""
    out = []
    for cls in model.classes:
        _check_class(model, cls, out)
    _check_instances(model, out)
    return out


def require_clean(model: ast.Model):
    from .errors import StaticCheckError

    diags = static_check(model)
    if diags:
        raise StaticCheckError(diags)
    return model
