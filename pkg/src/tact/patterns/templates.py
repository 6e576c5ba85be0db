"""Source templates for the interface components of the four patterns.

Each function renders one reactive class as ``.tam`` text. Timing
parameters are baked in as literals so that abstraction guards are
constant comparisons. ``ids`` maps instance names to directory ids, which
the components use to address their counterpart through the substrate.

Every class here checks exactly the local properties listed in
:data:`ENFORCES`.
"""

from __future__ import annotations

from .params import INI_EXE, PUB_SUB, REQ_RES, SEN_REC

SUBSTRATE_CLASS = "CommunicationSubstrate"

# status codes carried by acknowledgements
SUCCEEDED, FAILED, UNAVAILABLE = 0, 1, 2
ACCEPTED, REJECTED = 0, 1

# role -> (pattern kind, requester side?)
ROLES = {
    "PublisherRequester": (PUB_SUB, True),
    "SubscriberInvoker": (PUB_SUB, False),
    "RequestRequester": (REQ_RES, True),
    "ResponderInvoker": (REQ_RES, False),
    "InitiatorRequester": (INI_EXE, True),
    "ExecutorInvoker": (INI_EXE, False),
    "SenderRequester": (SEN_REC, True),
    "ReceiverInvoker": (SEN_REC, False),
}

PATTERN_ROLES = {
    PUB_SUB: ("PublisherRequester", "SubscriberInvoker"),
    REQ_RES: ("RequestRequester", "ResponderInvoker"),
    INI_EXE: ("InitiatorRequester", "ExecutorInvoker"),
    SEN_REC: ("SenderRequester", "ReceiverInvoker"),
}

# which role enforces which local timing parameter
ENFORCES = {
    "PublisherRequester": ("N_pub", "L_pub"),
    "SubscriberInvoker": ("N_sub", "X_sub", "L_sub", "R_pub", "R_sub"),
    "RequestRequester": ("N_req", "L_req", "R_req"),
    "ResponderInvoker": ("N_res", "L_res", "R_res"),
    "InitiatorRequester": ("N_ini", "L_ini"),
    "ExecutorInvoker": ("N_exe", "L_exe"),
    "SenderRequester": ("N_sen", "L_sen"),
    "ReceiverInvoker": ("N_rec", "L_rec"),
}

# messages an application attached to a role must be able to receive
APP_MESSAGES = {
    "PublisherRequester": ("accepted", "fastPublicationFailure", "timeoutFailure"),
    "SubscriberInvoker": ("consume", "slowPublicationFailure", "staleDataFailure", "slowConsumptionFailure"),
    "RequestRequester": ("response", "fastRequestFailure", "timeoutFailure", "staleDataFailure"),
    "ResponderInvoker": ("serve", "excessLoadFailure", "dataUnavailableFailure", "timeoutFailure"),
    "InitiatorRequester": ("ack", "fastInitFailure", "timeoutFailure"),
    "ExecutorInvoker": ("execute", "excessLoadFailure", "timeoutFailure"),
    "SenderRequester": ("receipt", "fastSendFailure", "timeoutFailure"),
    "ReceiverInvoker": ("deliver", "excessLoadFailure", "timeoutFailure"),
}


def choose(var, values, typ="int"):
    """Declaration of a local holding one of ``values`` (nondeterministic if several)."""
    values = list(values)
    if len(values) == 1:
        return f"{typ} {var} = {values[0]};"
    return f"{typ} {var} = ?({', '.join(str(v) for v in values)});"


def _indent(lines, n):
    pad = "    " * n
    return "\n".join(pad + line if line else line for line in lines)


def render_class(name, known, statevars, servers, capacity=5):
    """Assemble a class from pre-rendered parts.

    ``known`` is a list of ``(class, slot)``; ``statevars`` a list of
    declarations; ``servers`` a list of ``(header, body lines)``.
    """
    out = [f"reactiveclass {name}({capacity}) {{"]
    if known:
        out.append("    knownrebecs {")
        out += [f"        {c} {s};" for c, s in known]
        out.append("    }")
    if statevars:
        out.append("    statevars {")
        out += [f"        {d};" for d in statevars]
        out.append("    }")
    for header, body in servers:
        for h in header if isinstance(header, (list, tuple)) else [header]:
            out.append(f"    {h}")
        out[-1] += " {"
        out.append(_indent(body, 2))
        out.append("    }")
    out.append("}")
    return "\n".join(out)


def _ctor(name):
    return (f"{name}()", ["skip;"])


# ------------------------------------------------------------ publish/subscribe


def publisher_requester(name, app_class, params, delays, tag, peer_id):
    p = params
    publish = [
        f"if (hasPub && now - lastPub < {p.N_pub}) {{",
        f"    app.fastPublicationFailure({tag});",
        "} else {",
        "    " + choose("clientDelay", delays.client),
        f"    if (clientDelay > {p.L_pub}) {{",
        f"        app.timeoutFailure({tag});",
        "    } else {",
        "        lastPub = now;",
        "        hasPub = true;",
        f"        cs.transmitPublish({peer_id}, data, 0, {p.R_pub} - clientDelay) after(clientDelay);",
        f"        app.accepted({tag}) after(clientDelay);",
        "    }",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app"), (SUBSTRATE_CLASS, "cs")],
        ["interval time lastPub", "boolean hasPub"],
        [_ctor(name), ("msgsrv publish(boolean data)", publish)],
    )


def subscriber_invoker(name, app_class, params, delays, tag):
    p = params
    rcv = [
        f"if (hasPub && now - lastPub < {p.N_sub}) {{",
        "    skip;",
        f"}} else if (hasPub && now - lastPub > {p.X_sub}) {{",
        f"    app.slowPublicationFailure({tag});",
        f"}} else if (lm > {p.R_pub} || life < {p.R_sub}) {{",
        f"    app.staleDataFailure({tag});",
        "} else {",
        "    lastPub = now;",
        "    hasPub = true;",
        "    consumeStart = now;",
        "    " + choose("serviceDelay", delays.service),
        f"    app.consume({tag}, data, lm) after(serviceDelay);",
        "}",
    ]
    consumed = [
        f"if (now - consumeStart > {p.L_sub}) {{",
        f"    app.slowConsumptionFailure({tag});",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app")],
        ["interval time lastPub", "boolean hasPub", "interval time consumeStart"],
        [
            _ctor(name),
            ([f"@abstract(life, life < {p.R_sub})", "msgsrv RcvPublish(boolean data, int lm, int life)"], rcv),
            ("msgsrv consumed()", consumed),
        ],
    )


# ------------------------------------------------------------ request/response


def request_requester(name, app_class, params, delays, tag, peer_id):
    p = params
    request = [
        f"if (hasReq && now - lastReq < {p.N_req}) {{",
        f"    app.fastRequestFailure({tag});",
        "} else {",
        "    lastReq = now;",
        "    hasReq = true;",
        "    " + choose("clientDelay", delays.client),
        f"    cs.transmitRequest({peer_id}, cmd, 0, {p.L_req + p.R_req} - clientDelay) after(clientDelay);",
        "}",
    ]
    rcv = [
        "transmissionTime = lm;",
        f"if (now - lastReq > {p.L_req}) {{",
        f"    app.timeoutFailure({tag});",
        f"}} else if (life < {p.R_res}) {{",
        f"    app.staleDataFailure({tag});",
        "} else {",
        "    " + choose("serviceDelay", delays.service),
        f"    app.response({tag}, data) after(serviceDelay);",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app"), (SUBSTRATE_CLASS, "cs")],
        ["interval time lastReq", "boolean hasReq", "int transmissionTime"],
        [
            _ctor(name),
            ("msgsrv request(int cmd)", request),
            ([f"@abstract(life, life < {p.R_res})", "msgsrv RcvResponse(boolean data, int lm, int life)"], rcv),
        ],
    )


def responder_invoker(name, app_class, params, delays, tag, peer_id):
    p = params
    rcv = [
        f"if (hasReq && now - lastReq < {p.N_res}) {{",
        f"    app.excessLoadFailure({tag});",
        f"}} else if (life - {p.L_res} < {p.R_res}) {{",
        f"    app.dataUnavailableFailure({tag});",
        "} else {",
        "    lastReq = now;",
        "    hasReq = true;",
        "    serveStart = now;",
        "    " + choose("serviceDelay", delays.service),
        f"    app.serve({tag}, cmd, lm, life) after(serviceDelay);",
        "}",
    ]
    reply = [
        f"if (now - serveStart > {p.L_res}) {{",
        f"    app.timeoutFailure({tag});",
        "} else {",
        "    " + choose("clientDelay", delays.client),
        f"    cs.transmitResponse({peer_id}, data, lm, life - (now - serveStart) - clientDelay) after(clientDelay);",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app"), (SUBSTRATE_CLASS, "cs")],
        ["interval time lastReq", "boolean hasReq", "interval time serveStart"],
        [
            _ctor(name),
            ("msgsrv RcvRequest(int cmd, int lm, int life)", rcv),
            ("msgsrv reply(boolean data, int lm, int life)", reply),
        ],
    )


# ----------------------------------------------------------- initiate/execute


def initiator_requester(name, app_class, params, delays, tag, peer_id):
    p = params
    initiate = [
        f"if (hasInit && now - lastInit < {p.N_ini}) {{",
        f"    app.fastInitFailure({tag});",
        "} else {",
        "    lastInit = now;",
        "    hasInit = true;",
        "    " + choose("clientDelay", delays.client),
        f"    cs.transmitInitiate({peer_id}, cmd, 0) after(clientDelay);",
        "}",
    ]
    rcv = [
        "transmissionTime = lm;",
        f"if (now - lastInit > {p.L_ini}) {{",
        f"    app.timeoutFailure({tag});",
        "} else {",
        "    " + choose("serviceDelay", delays.service),
        f"    app.ack({tag}, status) after(serviceDelay);",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app"), (SUBSTRATE_CLASS, "cs")],
        ["interval time lastInit", "boolean hasInit", "int transmissionTime"],
        [_ctor(name), ("msgsrv initiate(int cmd)", initiate), ("msgsrv RcvAck(int status, int lm)", rcv)],
    )


def executor_invoker(name, app_class, params, delays, tag, peer_id):
    p = params
    rcv = [
        f"if (hasInit && now - lastInit < {p.N_exe}) {{",
        f"    app.excessLoadFailure({tag});",
        "    " + choose("clientDelay", delays.client),
        f"    cs.transmitAck({peer_id}, {UNAVAILABLE}, lm) after(clientDelay);",
        "} else {",
        "    lastInit = now;",
        "    hasInit = true;",
        "    execStart = now;",
        "    " + choose("serviceDelay", delays.service),
        f"    app.execute({tag}, cmd, lm) after(serviceDelay);",
        "}",
    ]
    done = [
        choose("clientDelay", delays.client),
        f"if (now - execStart > {p.L_exe}) {{",
        f"    app.timeoutFailure({tag});",
        f"    cs.transmitAck({peer_id}, {FAILED}, lm) after(clientDelay);",
        "} else {",
        f"    cs.transmitAck({peer_id}, status, lm) after(clientDelay);",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app"), (SUBSTRATE_CLASS, "cs")],
        ["interval time lastInit", "boolean hasInit", "interval time execStart"],
        [_ctor(name), ("msgsrv RcvInitiate(int cmd, int lm)", rcv), ("msgsrv done(int status, int lm)", done)],
    )


# -------------------------------------------------------------- send/receive


def sender_requester(name, app_class, params, delays, tag, peer_id):
    p = params
    send = [
        f"if (hasSend && now - lastSend < {p.N_sen}) {{",
        f"    app.fastSendFailure({tag});",
        "} else {",
        "    lastSend = now;",
        "    hasSend = true;",
        "    " + choose("clientDelay", delays.client),
        f"    cs.transmitSend({peer_id}, data, 0) after(clientDelay);",
        "}",
    ]
    rcv = [
        "transmissionTime = lm;",
        f"if (now - lastSend > {p.L_sen}) {{",
        f"    app.timeoutFailure({tag});",
        "} else {",
        "    " + choose("serviceDelay", delays.service),
        f"    app.receipt({tag}, status) after(serviceDelay);",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app"), (SUBSTRATE_CLASS, "cs")],
        ["interval time lastSend", "boolean hasSend", "int transmissionTime"],
        [_ctor(name), ("msgsrv send(boolean data)", send), ("msgsrv RcvReceipt(int status, int lm)", rcv)],
    )


def receiver_invoker(name, app_class, params, delays, tag, peer_id):
    p = params
    rcv = [
        f"if (hasSend && now - lastSend < {p.N_rec}) {{",
        f"    app.excessLoadFailure({tag});",
        "    " + choose("clientDelay", delays.client),
        f"    cs.transmitReceipt({peer_id}, {REJECTED}, lm) after(clientDelay);",
        "} else {",
        "    lastSend = now;",
        "    hasSend = true;",
        "    deliverStart = now;",
        "    " + choose("serviceDelay", delays.service),
        f"    app.deliver({tag}, data, lm) after(serviceDelay);",
        "}",
    ]
    done = [
        choose("clientDelay", delays.client),
        f"if (now - deliverStart > {p.L_rec}) {{",
        f"    app.timeoutFailure({tag});",
        f"    cs.transmitReceipt({peer_id}, {REJECTED}, lm) after(clientDelay);",
        "} else {",
        f"    cs.transmitReceipt({peer_id}, status, lm) after(clientDelay);",
        "}",
    ]
    return render_class(
        name,
        [(app_class, "app"), (SUBSTRATE_CLASS, "cs")],
        ["interval time lastSend", "boolean hasSend", "interval time deliverStart"],
        [_ctor(name), ("msgsrv RcvSend(boolean data, int lm)", rcv), ("msgsrv done(int status, int lm)", done)],
    )


RENDERERS = {
    "PublisherRequester": publisher_requester,
    "SubscriberInvoker": subscriber_invoker,
    "RequestRequester": request_requester,
    "ResponderInvoker": responder_invoker,
    "InitiatorRequester": initiator_requester,
    "ExecutorInvoker": executor_invoker,
    "SenderRequester": sender_requester,
    "ReceiverInvoker": receiver_invoker,
}
