"""Render a :class:`~tact.lang.ast.Model` back to ``.tam`` source."""

from __future__ import annotations

from . import ast

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4, "+": 5, "-": 5, "*": 6}


def format_expr(e, parent=0) -> str:
    if isinstance(e, ast.IntLit):
        return str(e.value) if e.value >= 0 or parent == 0 else f"({e.value})"
    if isinstance(e, ast.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ast.Now):
        return "now"
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Unary):
        return f"{e.op}{format_expr(e.operand, 7)}"
    if isinstance(e, ast.Binary):
        p = _PREC[e.op]
        # left-associative: right operand at equal precedence needs parentheses
        text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({text})" if p < parent else text
    raise TypeError(f"not an expression: {e!r}")


def _format_target(t):
    if isinstance(t, ast.SelfRef):
        return "self"
    if isinstance(t, ast.SlotRef):
        return t.name
    return f"find({format_expr(t.key)})"


def format_stmt(s, indent) -> list:
    pad = "    " * indent
    if isinstance(s, (ast.Assign, ast.NondetAssign)):
        head = f"{s.decl} {s.var}" if s.decl else s.var
        if isinstance(s, ast.Assign):
            rhs = format_expr(s.expr)
        else:
            rhs = "?(" + ", ".join(format_expr(c) for c in s.choices) + ")"
        return [f"{pad}{head} = {rhs};"]
    if isinstance(s, ast.If):
        lines = [f"{pad}if ({format_expr(s.cond)}) {{"]
        for inner in s.then:
            lines += format_stmt(inner, indent + 1)
        if s.orelse:
            lines.append(f"{pad}}} else {{")
            for inner in s.orelse:
                lines += format_stmt(inner, indent + 1)
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, ast.Delay):
        return [f"{pad}delay({format_expr(s.amount)});"]
    if isinstance(s, ast.Skip):
        return [f"{pad}skip;"]
    if isinstance(s, ast.Send):
        text = f"{pad}{_format_target(s.target)}.{s.msg}(" + ", ".join(format_expr(a) for a in s.args) + ")"
        if s.after is not None:
            text += f" after({format_expr(s.after)})"
        if s.deadline is not None:
            text += f" deadline({format_expr(s.deadline)})"
        return [text + ";"]
    raise TypeError(f"not a statement: {s!r}")


def _format_server(srv):
    lines = []
    if srv.priority:
        lines.append(f"    @priority({srv.priority})")
    for a in srv.abstracts:
        lines.append(f"    @abstract({a.param}, {format_expr(a.guard)})")
    params = ", ".join(f"{p.type} {p.name}" for p in srv.params)
    head = srv.name if srv.is_constructor else f"msgsrv {srv.name}"
    lines.append(f"    {head}({params}) {{")
    for s in srv.body:
        lines += format_stmt(s, 2)
    lines.append("    }")
    return lines


def format_class(cls) -> str:
    lines = [f"reactiveclass {cls.name}({cls.capacity}) {{"]
    if cls.known:
        lines.append("    knownrebecs {")
        lines += [f"        {k.class_name} {k.name};" for k in cls.known]
        lines.append("    }")
    if cls.statevars:
        lines.append("    statevars {")
        for v in cls.statevars:
            prefix = "interval " if v.interval else ""
            lines.append(f"        {prefix}{v.type} {v.name};")
        lines.append("    }")
    for srv in cls.servers:
        lines += _format_server(srv)
    lines.append("}")
    return "\n".join(lines)


def _const(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def format_model(model: ast.Model) -> str:
    parts = [format_class(c) for c in model.classes]
    main = ["main {"]
    for inst in model.instances:
        main.append(
            f"    {inst.class_name} {inst.name}({', '.join(inst.bindings)}):"
            f"({', '.join(_const(a) for a in inst.args)});"
        )
    main.append("}")
    parts.append("\n".join(main))
    return "\n\n".join(parts) + "\n"
