"""Abstract syntax for timed actor models.

All nodes are frozen dataclasses. Source positions are carried for error
reporting but excluded from equality, so a model that has been printed and
re-parsed compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

INT = "int"
BOOL = "boolean"
TIME = "time"
TYPES = (INT, BOOL, TIME)

DEFAULT_CAPACITY = 10


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: tuple = _pos()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: tuple = _pos()


@dataclass(frozen=True)
class Now:
    pos: tuple = _pos()


@dataclass(frozen=True)
class Var:
    name: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"
    pos: tuple = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: tuple = _pos()


Expr = Union[IntLit, BoolLit, Now, Var, Unary, Binary]

ARITH_OPS = ("+", "-", "*")
COMPARE_OPS = ("<", "<=", ">", ">=", "==", "!=")
LOGIC_OPS = ("&&", "||")


def walk_expr(e):
    """Yield every sub-expression of ``e``, ``e`` included, pre-order."""
    yield e
    if isinstance(e, Unary):
        yield from walk_expr(e.operand)
    elif isinstance(e, Binary):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)


# ----------------------------------------------------------------- statements


@dataclass(frozen=True)
class SelfRef:
    pos: tuple = _pos()


@dataclass(frozen=True)
class SlotRef:
    name: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class Find:
    """Directory lookup of an actor by its integer id."""

    key: Expr
    pos: tuple = _pos()


Target = Union[SelfRef, SlotRef, Find]


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    decl: Optional[str] = None  # type name when this also declares a local
    pos: tuple = _pos()


@dataclass(frozen=True)
class NondetAssign:
    var: str
    choices: tuple
    decl: Optional[str] = None
    pos: tuple = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()
    pos: tuple = _pos()


@dataclass(frozen=True)
class Delay:
    amount: Expr
    pos: tuple = _pos()


@dataclass(frozen=True)
class Send:
    target: Target
    msg: str
    args: tuple = ()
    after: Optional[Expr] = None
    deadline: Optional[Expr] = None
    pos: tuple = _pos()


@dataclass(frozen=True)
class Skip:
    pos: tuple = _pos()


Stmt = Union[Assign, NondetAssign, If, Delay, Send, Skip]


def walk_stmts(stmts):
    """Yield every statement in a block, descending into if-arms."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.orelse)


# -------------------------------------------------------------- declarations


@dataclass(frozen=True)
class Param:
    name: str
    type: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class Abstract:
    """``@abstract(param, guard)``: the parameter is only observed through ``guard``."""

    param: str
    guard: Expr
    pos: tuple = _pos()


@dataclass(frozen=True)
class MessageServer:
    name: str
    params: tuple = ()
    body: tuple = ()
    priority: int = 0
    abstracts: tuple = ()
    is_constructor: bool = False
    pos: tuple = _pos()

    @property
    def param_names(self):
        return tuple(p.name for p in self.params)

    def abstract_for(self, param):
        for a in self.abstracts:
            if a.param == param:
                return a
        return None


@dataclass(frozen=True)
class StateVar:
    name: str
    type: str
    interval: bool = False
    pos: tuple = _pos()


@dataclass(frozen=True)
class KnownSlot:
    name: str
    class_name: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class ActorClass:
    name: str
    known: tuple = ()
    statevars: tuple = ()
    servers: tuple = ()
    capacity: int = DEFAULT_CAPACITY
    pos: tuple = _pos()

    def server(self, name):
        for s in self.servers:
            if s.name == name:
                return s
        return None

    @property
    def constructor(self):
        for s in self.servers:
            if s.is_constructor:
                return s
        return None

    def statevar(self, name):
        for v in self.statevars:
            if v.name == name:
                return v
        return None


@dataclass(frozen=True)
class Instance:
    name: str
    class_name: str
    bindings: tuple = ()
    args: tuple = ()
    pos: tuple = _pos()


@dataclass(frozen=True)
class Model:
    """A parsed model: actor classes plus the instance wiring of ``main``.

    Actor ids are declaration indices in ``instances``; ``find(n)`` resolves
    through :attr:`lookup_directory`.
    """

    classes: tuple
    instances: tuple = ()

    def cls(self, name) -> ActorClass:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)

    def has_class(self, name):
        return any(c.name == name for c in self.classes)

    @cached_property
    def lookup_directory(self):
        return {i: inst.name for i, inst in enumerate(self.instances)}

    @cached_property
    def instance_index(self):
        return {inst.name: i for i, inst in enumerate(self.instances)}

    def instance_class(self, idx) -> ActorClass:
        return self.cls(self.instances[idx].class_name)
