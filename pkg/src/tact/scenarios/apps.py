"""Application actors of the two case studies."""

from __future__ import annotations

from ..patterns.behaviors import App, _delay

STOP, START = 0, 1
INACTIVE = 0


def xray_controller(name, ventilator, xray):
    """Pauses the ventilator around an x-ray exposure.

    Steps: stop ventilator, start x-ray, stop x-ray, start ventilator, then
    terminate. Each step waits for a successful ack; anything else (a
    failed or unavailable ack, a timeout) terminates at once.
    """
    finish = ["done = true;", "self.terminate();"]
    nxt = [
        "if (step == 0) {",
        f"    vent.initiate({STOP});",
        "} else if (step == 1) {",
        f"    xray.initiate({START});",
        "} else if (step == 2) {",
        f"    xray.initiate({STOP});",
        "} else if (step == 3) {",
        f"    vent.initiate({START});",
        "} else {",
        "    done = true;",
        "    self.terminate();",
        "}",
    ]
    ack = [
        "if (!done) {",
        "    if (status == 0) {",
        "        step = step + 1;",
        "        self.next();",
        "    } else {",
        *["        " + s for s in finish],
        "    }",
        "}",
    ]
    on_failure = ["if (!done) {", *["    " + s for s in finish], "}"]
    return App(
        name,
        name[:1].upper() + name[1:],
        {"vent": ventilator, "xray": xray},
        ["int step", "boolean done", "boolean terminated"],
        ["self.next();"],
        [
            ("msgsrv next()", nxt),
            ("msgsrv ack(int tag, int status)", ack),
            ("msgsrv timeoutFailure(int tag)", on_failure),
            ("msgsrv fastInitFailure(int tag)", on_failure),
            ("msgsrv terminate()", ["terminated = true;"]),
        ],
    )


def pca_monitor(name, subscriptions, pump, compute=0, tags=None):
    """Consumes readings from several subscriptions and stops the pump on bad data.

    ``subscriptions`` lists the subscriber interfaces; ``tags`` gives the
    pattern tag each of them stamps on its messages (filled in by the
    scenario builder). A ``false`` reading sends an inactive command to the
    pump through the requester interface ``pump``.
    """
    subscriptions = list(subscriptions)
    tags = list(tags) if tags is not None else list(range(len(subscriptions)))
    slots = [f"sub{i}" for i in range(len(subscriptions))]
    links = dict(zip(slots, subscriptions))
    links["pump"] = pump
    if len(slots) == 1:
        route = [f"{slots[0]}.consumed();"]
    else:
        route = []
        for i, (slot, tag) in enumerate(zip(slots, tags)):
            if i == 0:
                route.append(f"if (tag == {tag}) {{")
            elif i < len(slots) - 1:
                route.append(f"}} else if (tag == {tag}) {{")
            else:
                route.append("} else {")
            route.append(f"    {slot}.consumed();")
        route.append("}")
    consume = _delay(compute) + [
        "transmissionTime = lm;",
        "if (!data) {",
        f"    pump.request({INACTIVE});",
        "}",
    ] + route
    return App(
        name,
        name[:1].upper() + name[1:],
        links,
        ["int transmissionTime", "boolean pumpStopped"],
        servers=[
            ("msgsrv consume(int tag, boolean data, int lm)", consume),
            ("msgsrv response(int tag, boolean data)", ["pumpStopped = true;"]),
        ],
        capacity=10,
    )


def pump(name, interface, compute=1):
    """Infusion pump: goes inactive on command and confirms."""
    body = _delay(compute) + ["active = false;", "ri.reply(true, lm, life);"]
    return App(
        name,
        name[:1].upper() + name[1:],
        {"ri": interface},
        ["boolean active"],
        ["active = true;"],
        [("msgsrv serve(int tag, int cmd, int lm, int life)", body)],
    )
