"""Ready-made application actors for the pattern interfaces.

An :class:`App` is a class body plus the instance it becomes. Slots in
``links`` name the actors it talks to; :func:`tact.patterns.compose.compose`
resolves their classes and adds ``skip`` handlers for any failure messages
the app leaves unhandled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .templates import choose


@dataclass
class App:
    name: str
    class_name: str
    links: dict = field(default_factory=dict)  # slot -> instance name
    statevars: list = field(default_factory=list)
    ctor: list = field(default_factory=lambda: ["skip;"])
    servers: list = field(default_factory=list)  # (header, body lines)
    capacity: int = 5

    def server_names(self):
        out = set()
        for header, _ in self.servers:
            h = header[-1] if isinstance(header, (list, tuple)) else header
            out.add(h.split()[1].split("(")[0])
        return out


def _lit(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _class_name(name):
    return name[:1].upper() + name[1:]


def _periodic(name, slot, interface, count, period, call, counter, decl=None):
    """A client that fires ``call`` every ``period``; forever when ``count`` is None.

    ``period`` may be a list of values, one of which is picked for each gap.
    """
    body = [decl] if decl else []
    body.append(f"{slot}.{call};")
    periods = list(period) if isinstance(period, (list, tuple)) else [period]
    if len(periods) > 1:
        body.append(choose("gap", periods))
        period = "gap"
    else:
        period = periods[0]
    if count is None:
        body.append(f"self.tick() after({period});")
        statevars = []
    else:
        body += [
            f"{counter} = {counter} + 1;",
            f"if ({counter} < {count}) {{",
            f"    self.tick() after({period});",
            "}",
        ]
        statevars = [f"int {counter}"]
    return App(name, _class_name(name), {slot: interface}, statevars, ["self.tick();"], [("msgsrv tick()", body)])


def _delay(values, var="d"):
    values = list(values) if isinstance(values, (list, tuple)) else [values]
    if values == [0]:
        return []
    if len(values) == 1:
        return [f"delay({values[0]});"]
    return [choose(var, values), f"delay({var});"]


def periodic_publisher(name, interface, count=2, period=5, data=(True, False)):
    """Publishes ``count`` times, ``period`` apart, a value drawn from ``data``."""
    app = _periodic(
        name, "pr", interface, count, period, "publish(data)", "published",
        choose("data", [_lit(v) for v in data], "boolean"),
    )
    app.servers.append(("msgsrv accepted(int tag)", ["skip;"]))
    return app


def sink_service(name, interface, compute=1):
    """Consumes publications and records the substrate latency of each one."""
    body = _delay(compute) + ["transmissionTime = lm;", "si.consumed();"]
    return App(
        name,
        _class_name(name),
        {"si": interface},
        ["int transmissionTime"],
        servers=[("msgsrv consume(int tag, boolean data, int lm)", body)],
    )


def periodic_requester(name, interface, count=2, period=5):
    app = _periodic(name, "rr", interface, count, period, "request(0)", "requested")
    app.servers.append(("msgsrv response(int tag, boolean data)", ["skip;"]))
    return app


def echo_responder(name, interface, compute=1):
    body = _delay(compute) + ["ri.reply(true, lm, life);"]
    return App(
        name,
        _class_name(name),
        {"ri": interface},
        servers=[("msgsrv serve(int tag, int cmd, int lm, int life)", body)],
    )


def periodic_initiator(name, interface, count=2, period=5):
    app = _periodic(name, "ir", interface, count, period, "initiate(0)", "initiated")
    app.servers.append(("msgsrv ack(int tag, int status)", ["skip;"]))
    return app


def executor(name, interface, compute=1, statuses=(0,)):
    """Executes commands and reports one of ``statuses`` when done."""
    body = _delay(compute) + [choose("status", statuses), "ei.done(status, lm);"]
    return App(
        name,
        _class_name(name),
        {"ei": interface},
        servers=[("msgsrv execute(int tag, int cmd, int lm)", body)],
    )


def periodic_sender(name, interface, count=2, period=5, data=(True,)):
    app = _periodic(
        name, "sr", interface, count, period, "send(data)", "sent",
        choose("data", [_lit(v) for v in data], "boolean"),
    )
    app.servers.append(("msgsrv receipt(int tag, int status)", ["skip;"]))
    return app


def receiver(name, interface, compute=1):
    body = _delay(compute) + ["rc.done(0, lm);"]
    return App(
        name,
        _class_name(name),
        {"rc": interface},
        servers=[("msgsrv deliver(int tag, boolean data, int lm)", body)],
    )
