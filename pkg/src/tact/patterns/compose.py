"""Composition of pattern instances, applications and the shared substrate."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lang.check import require_clean
from ..lang.parser import parse_model
from .behaviors import App
from .params import KINDS, INI_EXE, PUB_SUB, REQ_RES, SEN_REC, SubstrateConfig, PatternParamError
from .templates import APP_MESSAGES, PATTERN_ROLES, RENDERERS, SUBSTRATE_CLASS, choose, render_class

SUBSTRATE_INSTANCE = "cs"

_ABBREV = {
    "PublisherRequester": "pr",
    "SubscriberInvoker": "si",
    "RequestRequester": "rr",
    "ResponderInvoker": "ri",
    "InitiatorRequester": "ir",
    "ExecutorInvoker": "ei",
    "SenderRequester": "sr",
    "ReceiverInvoker": "rc",
}

# substrate servers per kind: (name, parameter list, receiver message, forwarded args)
_TRANSMIT = {
    PUB_SUB: [("transmitPublish", "int dest, boolean data, int lm, int life", "RcvPublish", "data, lm + netDelay, life - netDelay")],
    REQ_RES: [
        ("transmitRequest", "int dest, int cmd, int lm, int life", "RcvRequest", "cmd, lm + netDelay, life - netDelay"),
        ("transmitResponse", "int dest, boolean data, int lm, int life", "RcvResponse", "data, lm + netDelay, life - netDelay"),
    ],
    INI_EXE: [
        ("transmitInitiate", "int dest, int cmd, int lm", "RcvInitiate", "cmd, lm + netDelay"),
        ("transmitAck", "int dest, int status, int lm", "RcvAck", "status, lm + netDelay"),
    ],
    SEN_REC: [
        ("transmitSend", "int dest, boolean data, int lm", "RcvSend", "data, lm + netDelay"),
        ("transmitReceipt", "int dest, int status, int lm", "RcvReceipt", "status, lm + netDelay"),
    ],
}


@dataclass
class Fragment:
    """One instance of a pattern: its two interface components.

    ``client`` and ``service`` name the application instances on the
    requester and invoker side. ``prefix`` distinguishes instances of the
    same pattern; it is appended to class and instance names.
    """

    kind: str
    params: object
    client: str
    service: str
    prefix: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PatternParamError(f"unknown pattern kind {self.kind!r}")
        if getattr(self.params, "KIND", None) != self.kind:
            raise PatternParamError(f"{type(self.params).__name__} given for a {self.kind} pattern")

    @property
    def roles(self):
        return PATTERN_ROLES[self.kind]

    @property
    def requester_class(self):
        return self.roles[0] + self.prefix

    @property
    def invoker_class(self):
        return self.roles[1] + self.prefix

    @property
    def requester(self):
        return _ABBREV[self.roles[0]] + self.prefix

    @property
    def invoker(self):
        return _ABBREV[self.roles[1]] + self.prefix


@dataclass
class Composition:
    source: str
    model: object
    fragments: list
    apps: list
    substrate: SubstrateConfig
    ids: dict = field(default_factory=dict)  # instance -> directory id

    def fragment(self, prefix, kind=None):
        for f in self.fragments:
            if f.prefix == prefix and (kind is None or f.kind == kind):
                return f
        raise KeyError(prefix)


def instance_order(fragments, apps):
    """Declaration order: requester sides, the substrate, then invoker sides."""
    by_name = {a.name: a for a in apps}
    order = []

    def place(name):
        if name not in order:
            order.append(name)

    for f in fragments:
        if f.client in by_name:
            place(f.client)
        place(f.requester)
    place(SUBSTRATE_INSTANCE)
    for f in fragments:
        place(f.invoker)
        if f.service in by_name:
            place(f.service)
    for a in apps:
        place(a.name)
    return order


def substrate_class(kinds, substrate: SubstrateConfig, capacity=10):
    servers = [("CommunicationSubstrate()", ["skip;"])]
    for kind in KINDS:
        if kind not in kinds:
            continue
        net = substrate.delays_for(kind).net
        for name, params, rcv, args in _TRANSMIT[kind]:
            header = [f"msgsrv {name}({params})"]
            prio = substrate.priority_of(name)
            if prio:
                header.insert(0, f"@priority({prio})")
            body = [choose("netDelay", net), f"find(dest).{rcv}({args}) after(netDelay);"]
            servers.append((header, body))
    return render_class(SUBSTRATE_CLASS, [], [], servers, capacity)


def app_class(app: App, classes):
    known = [(classes[inst], slot) for slot, inst in app.links.items()]
    return render_class(app.class_name, known, list(app.statevars),
                        [(f"{app.class_name}()", list(app.ctor))] + list(app.servers), app.capacity)


def compose(fragments, apps, substrate: SubstrateConfig = None, substrate_capacity=10) -> Composition:
    """Render, parse and statically check a system of patterns and applications."""
    substrate = substrate or SubstrateConfig()
    fragments = list(fragments)
    apps = list(apps)
    seen = set()
    for f in fragments:
        if (f.kind, f.prefix) in seen:
            raise PatternParamError(f"duplicate {f.kind} pattern with prefix {f.prefix!r}")
        seen.add((f.kind, f.prefix))
    app_by_name = {a.name: a for a in apps}
    if len(app_by_name) != len(apps):
        raise PatternParamError("duplicate application names")
    for f in fragments:
        for side in (f.client, f.service):
            if side not in app_by_name:
                raise PatternParamError(f"{f.kind}{f.prefix}: no application named {side!r}")

    order = instance_order(fragments, apps)
    ids = {name: i for i, name in enumerate(order)}
    classes = {a.name: a.class_name for a in apps}
    classes[SUBSTRATE_INSTANCE] = SUBSTRATE_CLASS
    for f in fragments:
        classes[f.requester] = f.requester_class
        classes[f.invoker] = f.invoker_class

    # apps receive skip handlers for the failures they do not handle
    needed = {a.name: {} for a in apps}
    for tag, f in enumerate(fragments):
        for role, app_name in zip(f.roles, (f.client, f.service)):
            for msg in APP_MESSAGES[role]:
                if msg.endswith("Failure"):
                    needed[app_name][msg] = True

    texts = {}
    for tag, f in enumerate(fragments):
        req_role, inv_role = f.roles
        d = substrate.delays_for(f.kind, f.prefix or None)
        texts[f.requester] = RENDERERS[req_role](
            f.requester_class, classes[f.client], f.params, d, tag, ids[f.invoker]
        )
        inv_args = (f.invoker_class, classes[f.service], f.params, d, tag)
        if f.kind != PUB_SUB:
            inv_args += (ids[f.requester],)
        texts[f.invoker] = RENDERERS[inv_role](*inv_args)
    texts[SUBSTRATE_INSTANCE] = substrate_class({f.kind for f in fragments}, substrate, substrate_capacity)
    for a in apps:
        have = a.server_names()
        extra = [(f"msgsrv {m}(int tag)", ["skip;"]) for m in sorted(needed[a.name]) if m not in have]
        full = App(a.name, a.class_name, a.links, a.statevars, a.ctor, list(a.servers) + extra, a.capacity)
        texts[a.name] = app_class(full, classes)

    class_texts, emitted = [], set()
    for name in order:
        cname = classes[name]
        if cname not in emitted:
            emitted.add(cname)
            class_texts.append(texts[name])
    main = ["main {"]
    for name in order:
        if name == SUBSTRATE_INSTANCE:
            binds = ""
        elif name in app_by_name:
            binds = ", ".join(app_by_name[name].links.values())
        else:
            f = next(f for f in fragments if name in (f.requester, f.invoker))
            app_name = f.client if name == f.requester else f.service
            binds = app_name if f.kind == PUB_SUB and name == f.invoker else f"{app_name}, {SUBSTRATE_INSTANCE}"
        main.append(f"    {classes[name]} {name}({binds}):();")
    main.append("}")
    source = "\n\n".join(class_texts) + "\n\n" + "\n".join(main) + "\n"
    model = parse_model(source)
    require_clean(model)
    return Composition(source, model, fragments, apps, substrate, ids)
