"""Recursive-descent parser for ``.tam`` model sources.

The grammar is documented in ``docs/language.md``.
"""

from __future__ import annotations

import re

from . import ast
from .errors import ParseError

KEYWORDS = {
    "reactiveclass", "knownrebecs", "statevars", "msgsrv", "main", "if", "else",
    "delay", "after", "deadline", "skip", "self", "find", "now", "true", "false",
    "interval", "int", "boolean", "time",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<annot>@[A-Za-z_]\w*)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_]\w*)
  | (?P<op>&&|\|\||<=|>=|==|!=|[-+*<>!=?(){};,.:])
    """,
    re.VERBOSE | re.DOTALL,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(source):
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            if kind == "id" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*",),
]


class Parser:
    def __init__(self, source):
        self.toks = tokenize(source)
        self.i = 0

    # -- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text):
        t = self.tok
        return t.text == text and t.kind in ("kw", "op", "annot")

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def advance(self):
        t = self.tok
        self.i += 1
        return t

    def expect(self, text):
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def accept(self, text):
        if self.at(text):
            return self.advance()
        return None

    def ident(self):
        t = self.tok
        if t.kind != "id":
            raise self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def integer(self):
        neg = self.accept("-")
        t = self.tok
        if t.kind != "int":
            raise self.error(f"expected integer, found {t.text or 'end of input'!r}")
        self.i += 1
        return -int(t.text) if neg else int(t.text)

    # -- model
    def parse_model(self):
        classes = []
        while self.at("reactiveclass"):
            classes.append(self.parse_class())
        if not self.at("main"):
            raise self.error("expected 'reactiveclass' or 'main'")
        instances = self.parse_main()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after main block")
        model = ast.Model(tuple(classes), tuple(instances))
        self._resolve_main(model)
        return model

    def parse_class(self):
        start = self.expect("reactiveclass")
        name = self.ident().text
        capacity = ast.DEFAULT_CAPACITY
        if self.accept("("):
            capacity = self.integer()
            if capacity <= 0:
                raise self.error("mailbox capacity must be positive")
            self.expect(")")
        self.expect("{")
        known, statevars, servers = [], [], []
        if self.accept("knownrebecs"):
            self.expect("{")
            while not self.at("}"):
                cls_tok = self.ident()
                while True:
                    n = self.ident()
                    known.append(ast.KnownSlot(n.text, cls_tok.text, pos=(n.line, n.col)))
                    if not self.accept(","):
                        break
                self.expect(";")
            self.expect("}")
        if self.accept("statevars"):
            self.expect("{")
            while not self.at("}"):
                interval = bool(self.accept("interval"))
                typ = self.parse_type()
                while True:
                    n = self.ident()
                    statevars.append(ast.StateVar(n.text, typ, interval, pos=(n.line, n.col)))
                    if not self.accept(","):
                        break
                self.expect(";")
            self.expect("}")
        while not self.at("}"):
            servers.append(self.parse_server(name))
        self.expect("}")
        return ast.ActorClass(
            name, tuple(known), tuple(statevars), tuple(servers), capacity,
            pos=(start.line, start.col),
        )

    def parse_type(self):
        t = self.tok
        if t.kind == "kw" and t.text in ast.TYPES:
            self.i += 1
            return t.text
        raise self.error(f"expected a type (int, boolean, time), found {t.text!r}")

    def parse_server(self, class_name):
        priority = 0
        abstracts = []
        while self.tok.kind == "annot":
            a = self.advance()
            if a.text == "@priority":
                self.expect("(")
                priority = self.integer()
                self.expect(")")
            elif a.text == "@abstract":
                self.expect("(")
                p = self.ident()
                self.expect(",")
                guard = self.parse_expr()
                self.expect(")")
                abstracts.append(ast.Abstract(p.text, guard, pos=(a.line, a.col)))
            else:
                raise self.error(f"unknown annotation {a.text}", a)
        is_ctor = False
        if self.accept("msgsrv"):
            name_tok = self.ident()
        else:
            name_tok = self.ident()
            if name_tok.text != class_name:
                raise self.error("expected 'msgsrv' or a constructor", name_tok)
            is_ctor = True
        if name_tok.text == class_name:
            is_ctor = True
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                typ = self.parse_type()
                n = self.ident()
                params.append(ast.Param(n.text, typ, pos=(n.line, n.col)))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.parse_block()
        return ast.MessageServer(
            name_tok.text, tuple(params), body, priority, tuple(abstracts), is_ctor,
            pos=(name_tok.line, name_tok.col),
        )

    # -- statements
    def parse_block(self):
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return tuple(stmts)

    def parse_arm(self):
        if self.at("{"):
            return self.parse_block()
        return (self.parse_stmt(),)

    def parse_stmt(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "kw" and t.text in ast.TYPES:
            typ = self.parse_type()
            name = self.ident().text
            if self.accept("="):
                stmt = self.parse_assign_rhs(name, typ, pos)
            else:
                default = ast.BoolLit(False) if typ == ast.BOOL else ast.IntLit(0)
                if typ == ast.TIME:
                    raise self.error("a time-typed local must be initialised", t)
                stmt = ast.Assign(name, default, typ, pos=pos)
            self.expect(";")
            return stmt
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_arm()
            orelse = self.parse_arm() if self.accept("else") else ()
            return ast.If(cond, then, orelse, pos=pos)
        if self.accept("delay"):
            self.expect("(")
            amount = self.parse_expr()
            self.expect(")")
            self.expect(";")
            return ast.Delay(amount, pos=pos)
        if self.accept("skip"):
            self.expect(";")
            return ast.Skip(pos=pos)
        if self.at("self") or self.at("find"):
            return self.parse_send()
        if t.kind == "id":
            nxt = self.peek()
            if nxt.text == "=" and nxt.kind == "op":
                self.i += 2
                stmt = self.parse_assign_rhs(t.text, None, pos)
                self.expect(";")
                return stmt
            if nxt.text == ".":
                return self.parse_send()
        raise self.error(f"unexpected {t.text or 'end of input'!r} at start of statement")

    def parse_assign_rhs(self, name, decl, pos):
        if self.accept("?"):
            self.expect("(")
            choices = [self.parse_expr()]
            while self.accept(","):
                choices.append(self.parse_expr())
            self.expect(")")
            return ast.NondetAssign(name, tuple(choices), decl, pos=pos)
        return ast.Assign(name, self.parse_expr(), decl, pos=pos)

    def parse_send(self):
        t = self.tok
        pos = (t.line, t.col)
        if self.accept("self"):
            target = ast.SelfRef(pos=pos)
        elif self.accept("find"):
            self.expect("(")
            key = self.parse_expr()
            self.expect(")")
            target = ast.Find(key, pos=pos)
        else:
            target = ast.SlotRef(self.ident().text, pos=pos)
        self.expect(".")
        msg = self.ident().text
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.accept(","):
                args.append(self.parse_expr())
        self.expect(")")
        after = deadline = None
        while self.at("after") or self.at("deadline"):
            kw = self.advance()
            self.expect("(")
            e = self.parse_expr()
            self.expect(")")
            if kw.text == "after":
                if after is not None:
                    raise self.error("duplicate 'after'", kw)
                after = e
            else:
                if deadline is not None:
                    raise self.error("duplicate 'deadline'", kw)
                deadline = e
        self.expect(";")
        return ast.Send(target, msg, tuple(args), after, deadline, pos=pos)

    # -- expressions
    def parse_expr(self, level=0):
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_expr(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance()
            right = self.parse_expr(level + 1)
            left = ast.Binary(op.text, left, right, pos=(op.line, op.col))
        return left

    def parse_unary(self):
        t = self.tok
        if t.kind == "op" and t.text in ("-", "!"):
            self.i += 1
            operand = self.parse_unary()
            if t.text == "-" and isinstance(operand, ast.IntLit):
                return ast.IntLit(-operand.value, pos=(t.line, t.col))
            return ast.Unary(t.text, operand, pos=(t.line, t.col))
        return self.parse_primary()

    def parse_primary(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "int":
            self.i += 1
            return ast.IntLit(int(t.text), pos=pos)
        if self.accept("true"):
            return ast.BoolLit(True, pos=pos)
        if self.accept("false"):
            return ast.BoolLit(False, pos=pos)
        if self.accept("now"):
            return ast.Now(pos=pos)
        if t.kind == "id":
            self.i += 1
            return ast.Var(t.text, pos=pos)
        if self.accept("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        raise self.error(f"expected expression, found {t.text or 'end of input'!r}")

    # -- main
    def parse_main(self):
        self.expect("main")
        self.expect("{")
        instances = []
        while not self.at("}"):
            cls_tok = self.ident()
            name = self.ident().text
            self.expect("(")
            bindings = []
            if not self.at(")"):
                bindings.append(self.ident().text)
                while self.accept(","):
                    bindings.append(self.ident().text)
            self.expect(")")
            self.expect(":")
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.parse_const())
                while self.accept(","):
                    args.append(self.parse_const())
            self.expect(")")
            self.expect(";")
            instances.append(
                ast.Instance(name, cls_tok.text, tuple(bindings), tuple(args), pos=(cls_tok.line, cls_tok.col))
            )
        self.expect("}")
        return instances

    def parse_const(self):
        if self.accept("true"):
            return True
        if self.accept("false"):
            return False
        return self.integer()

    def _resolve_main(self, model):
        seen = set()
        for inst in model.instances:
            line, col = inst.pos
            if inst.name in seen:
                raise ParseError(f"duplicate instance name {inst.name!r}", line, col)
            seen.add(inst.name)
            if not model.has_class(inst.class_name):
                raise ParseError(f"unknown class {inst.class_name!r} in main", line, col)
            cls = model.cls(inst.class_name)
            if len(inst.bindings) != len(cls.known):
                raise ParseError(
                    f"instance {inst.name!r} binds {len(inst.bindings)} known rebecs, "
                    f"class {cls.name} declares {len(cls.known)}",
                    line, col,
                )


def parse_model(source: str) -> ast.Model:
    """Parse ``.tam`` source text into a :class:`~tact.lang.ast.Model`."""
    return Parser(source).parse_model()


def parse_expr(source: str):
    p = Parser(source)
    e = p.parse_expr()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return e
