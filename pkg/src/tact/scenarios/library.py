"""The shipped scenarios, as data in the ``.tam-scn`` schema.

Delay lists and client periods are choices of this repository; each row
scenario documents the worst-case substrate latency it allows next to the
budget it is checked against.
"""

from __future__ import annotations

import copy

import yaml

from ..patterns.params import EQUAL_DELAYS, PER_PATTERN_DELAYS, PRIORITIZED, FailureKind
from .build import build_scenario

PUB_SUB_ROW1 = dict(N_pub=4, L_pub=6, R_pub=40, N_sub=7, L_sub=5, X_sub=20, R_sub=5)
PUB_SUB_ROW2 = dict(N_pub=5, L_pub=3, R_pub=20, N_sub=4, L_sub=7, X_sub=12, R_sub=10)
REQ_RES_ROW1 = dict(N_req=2, L_req=30, R_req=15, N_res=7, L_res=5, R_res=10)
REQ_RES_ROW2 = dict(N_req=4, L_req=24, R_req=18, N_res=5, L_res=10, R_res=20)
INI_EXE_ROW1 = dict(N_ini=3, L_ini=25, N_exe=5, L_exe=4)
INI_EXE_ROW2 = dict(N_ini=5, L_ini=10, N_exe=5, L_exe=4)
SEN_REC_ROW1 = dict(N_sen=5, L_sen=30, N_rec=7, L_rec=5)
SEN_REC_ROW2 = dict(N_sen=4, L_sen=6, N_rec=7, L_rec=5)

_CLIENTS = {
    "pub-sub": ("periodic_publisher", "sink_service"),
    "req-res": ("periodic_requester", "echo_responder"),
    "ini-exe": ("periodic_initiator", "executor"),
    "sen-rec": ("periodic_sender", "receiver"),
}


def _row(name, kind, params, delays, period, description, expect, client_extra=None, service_extra=None):
    client, service = _CLIENTS[kind]
    c = {"behavior": client, "name": "client", "period": list(period), "count": None}
    c.update(client_extra or {})
    s = {"behavior": service, "name": "service"}
    s.update(service_extra or {})
    return {
        "name": name,
        "description": description,
        "tags": ["row", kind],
        "substrate": {"variant": EQUAL_DELAYS, "delays": delays},
        "patterns": [{"kind": kind, "prefix": "", "client": "client", "service": "service", "params": params}],
        "apps": [c, s],
        "assertions": [{"name": "latency", "check": f"budget({kind})"}],
        "expect": {"latency": expect},
    }


ROWS = [
    _row(
        "pubsub-row1", "pub-sub", PUB_SUB_ROW1,
        {"client": [1, 2], "net": [1, 4], "service": [0]}, (5, 6),
        "Budget 40-5-6 = 29; worst substrate latency 4.", "pass",
        {"data": [True]}, {"compute": 0},
    ),
    _row(
        "pubsub-row2", "pub-sub", PUB_SUB_ROW2,
        {"client": [1, 2], "net": [1, 8], "service": [0]}, (5, 6),
        "Budget 20-10-3 = 7; a net delay of 8 exceeds it.", "fail",
        {"data": [True]}, {"compute": 0},
    ),
    _row(
        "reqres-row1", "req-res", REQ_RES_ROW1,
        {"client": [1, 2], "net": [1, 3], "service": [0]}, (6, 7),
        "Budget 30+15-5-10 = 30; worst two-leg latency 6.", "pass",
        None, {"compute": 1},
    ),
    _row(
        "reqres-row2", "req-res", REQ_RES_ROW2,
        {"client": [1, 2], "net": [2, 7], "service": [0]}, (6, 7),
        "Budget 24+18-10-20 = 12; two legs of 7 exceed it.", "fail",
        None, {"compute": 1},
    ),
    _row(
        "iniexe-row1", "ini-exe", INI_EXE_ROW1,
        {"client": [1, 2], "net": [1, 2], "service": [0]}, (6, 7),
        "Budget 25-4 = 21; worst two-leg latency 4.", "pass",
        None, {"compute": 1},
    ),
    _row(
        "iniexe-row2", "ini-exe", INI_EXE_ROW2,
        {"client": [1, 2], "net": [1, 4], "service": [0]}, (6, 7),
        "Budget 10-4 = 6; two legs of 4 exceed it.", "fail",
        None, {"compute": 1},
    ),
    _row(
        "senrec-row1", "sen-rec", SEN_REC_ROW1,
        {"client": [1, 2], "net": [1, 2], "service": [0]}, (6, 7),
        "Budget 30-5 = 25; worst two-leg latency 4.", "pass",
        None, {"compute": 1},
    ),
    _row(
        "senrec-row2", "sen-rec", SEN_REC_ROW2,
        {"client": [1, 2], "net": [1, 2], "service": [0]}, (6, 7),
        "Budget 6-5 = 1; any two legs take at least 2.", "fail",
        None, {"compute": 1},
    ),
]


def xray_vent_data(delays=None, compute=1, statuses=(0, 1)):
    """Controller, ventilator and x-ray machine over two initiate-execute patterns."""
    delays = delays or {"client": [1], "net": [1, 2], "service": [1]}
    return {
        "name": "xray-vent",
        "description": "Ventilator paused around an x-ray exposure; any failure terminates the controller.",
        "tags": ["case-study"],
        "substrate": {"variant": EQUAL_DELAYS, "delays": delays},
        "patterns": [
            {"kind": "ini-exe", "prefix": "Vent", "client": "controller", "service": "ventilator",
             "params": INI_EXE_ROW1},
            {"kind": "ini-exe", "prefix": "Xray", "client": "controller", "service": "xray",
             "params": INI_EXE_ROW1},
        ],
        "apps": [
            {"behavior": "xray_controller", "name": "controller", "ventilator": "irVent", "xray": "irXray"},
            {"behavior": "executor", "name": "ventilator", "compute": compute, "statuses": list(statuses)},
            {"behavior": "executor", "name": "xray", "compute": compute, "statuses": list(statuses)},
        ],
        "assertions": [
            {"name": "vent-latency", "check": "budget(Vent)"},
            {"name": "xray-latency", "check": "budget(Xray)"},
            {"name": "no-timeout", "check": "never timeout"},
        ],
        "expect": {"vent-latency": "pass", "xray-latency": "pass", "no-timeout": "pass"},
    }


PCA_PUB_SUB = dict(N_pub=4, L_pub=3, R_pub=30, N_sub=4, L_sub=6, X_sub=20, R_sub=5)
PCA_REQ_RES = dict(N_req=2, L_req=30, R_req=15, N_res=3, L_res=6, R_res=10)


def pca_data(variant=EQUAL_DELAYS, count=2, data=(True, False)):
    """Capnometer and oximeter feed a monitor that can stop the infusion pump."""
    substrate = {"variant": variant, "delays": {"client": [1], "net": [1, 2], "service": [1]}}
    if variant == PER_PATTERN_DELAYS:
        substrate["per_pattern"] = {"req-res": {"net": [1, 2, 3]}}
    name = {EQUAL_DELAYS: "pca", PER_PATTERN_DELAYS: "pca-per-pattern", PRIORITIZED: "pca-prioritized"}[variant]
    return {
        "name": name,
        "description": f"PCA safety interlock, substrate variant {variant}.",
        "tags": ["case-study", "pca"],
        "substrate": substrate,
        "patterns": [
            {"kind": "pub-sub", "prefix": "Cap", "client": "capnometer", "service": "monitor", "params": PCA_PUB_SUB},
            {"kind": "pub-sub", "prefix": "Oxi", "client": "oximeter", "service": "monitor", "params": PCA_PUB_SUB},
            {"kind": "req-res", "prefix": "Pump", "client": "monitor", "service": "pump", "params": PCA_REQ_RES},
        ],
        "apps": [
            {"behavior": "periodic_publisher", "name": "capnometer", "interface": "prCap", "count": count,
             "period": [4], "data": list(data)},
            {"behavior": "periodic_publisher", "name": "oximeter", "interface": "prOxi", "count": count,
             "period": [4], "data": list(data)},
            {"behavior": "pca_monitor", "name": "monitor", "subscriptions": ["siCap", "siOxi"],
             "pump": "rrPump", "compute": 0},
            {"behavior": "pump", "name": "pump", "compute": 1},
        ],
        "assertions": [
            {"name": "cap-latency", "check": "budget(Cap)"},
            {"name": "oxi-latency", "check": "budget(Oxi)"},
            {"name": "pump-latency", "check": "budget(Pump)"},
        ],
        "expect": {"cap-latency": "pass", "oxi-latency": "pass", "pump-latency": "pass"},
    }


# --------------------------------------------------------- monitor matrix
#
# One pair per failure kind: the first scenario trips exactly that failure,
# the sibling changes a single time value so that nothing fails. All delay
# lists are singletons, so each pair is a single timeline.

_EXACT = {"client": [1], "net": [1], "service": [1]}

_PS = dict(N_pub=4, L_pub=6, R_pub=40, N_sub=2, L_sub=5, X_sub=20, R_sub=5)
_RR = dict(N_req=2, L_req=30, R_req=15, N_res=2, L_res=5, R_res=10)
_IE = dict(N_ini=3, L_ini=25, N_exe=3, L_exe=4)
_SR = dict(N_sen=3, L_sen=30, N_rec=3, L_rec=5)


def _pair(kind, base, change, period=(4,), compute=0):
    """(trigger, sibling) parameter/period sets; ``change`` maps the field to (trigger, sibling)."""
    out = []
    for pick in (0, 1):
        params = dict(base)
        per, comp = period, compute
        for k, v in change.items():
            if k == "period":
                per = (v[pick],)
            elif k == "compute":
                comp = v[pick]
            else:
                params[k] = v[pick]
        out.append((params, per, comp))
    return out


_MATRIX = {
    FailureKind.FAST_PUBLICATION: ("pub-sub", _PS, {"period": (3, 4)}),
    FailureKind.TIMEOUT: ("pub-sub", _PS, {"L_pub": (0, 1)}),
    FailureKind.STALE_DATA: ("pub-sub", dict(_PS, R_pub=10, L_pub=1), {"R_sub": (9, 8)}),
    FailureKind.SLOW_PUBLICATION: ("pub-sub", _PS, {"X_sub": (5, 6), "period": (6, 6)}),
    FailureKind.SLOW_CONSUMPTION: ("pub-sub", _PS, {"L_sub": (2, 3), "compute": (2, 2)}),
    FailureKind.FAST_REQUEST: ("req-res", _RR, {"period": (1, 2)}),
    FailureKind.EXCESS_LOAD: ("req-res", dict(_RR, N_res=4), {"N_res": (4, 3), "period": (3, 3)}),
    FailureKind.DATA_UNAVAILABLE: ("req-res", dict(_RR, L_req=10, R_req=5, L_res=3), {"R_res": (11, 10)}),
    FailureKind.FAST_INIT: ("ini-exe", _IE, {"period": (2, 3)}),
    FailureKind.FAST_SEND: ("sen-rec", _SR, {"period": (2, 3)}),
}


def matrix_data():
    """``{kind: (trigger scenario data, sibling scenario data)}``."""
    out = {}
    for kind, (pattern, base, change) in _MATRIX.items():
        pair = []
        extra = {"count": 2}
        if pattern == "pub-sub":
            extra["data"] = [True]
        for role, (params, period, compute) in zip(("trigger", "sibling"), _pair(pattern, base, change)):
            d = _row(
                f"monitor-{kind.value}-{role}", pattern, params, _EXACT, period,
                f"{role} scenario for the {kind.value} monitor", "pass",
                extra, {"compute": compute},
            )
            d["tags"] = ["matrix", kind.value, role]
            d["assertions"] = [{"name": f"no-{kind.value}", "check": f"never {kind.value}"}]
            d["expect"] = {f"no-{kind.value}": "fail" if role == "trigger" else "pass"}
            pair.append(d)
        out[kind] = tuple(pair)
    return out


# ------------------------------------------------------------ registry


def _registry():
    reg = {d["name"]: d for d in ROWS}
    x = xray_vent_data()
    reg[x["name"]] = x
    for v in (EQUAL_DELAYS, PER_PATTERN_DELAYS, PRIORITIZED):
        d = pca_data(v)
        reg[d["name"]] = d
    for trig, sib in matrix_data().values():
        reg[trig["name"]] = trig
        reg[sib["name"]] = sib
    return reg


REGISTRY = _registry()


def scenario_names(tag=None):
    return [n for n, d in REGISTRY.items() if tag is None or tag in d.get("tags", ())]


def scenario_data(name):
    try:
        return copy.deepcopy(REGISTRY[name])
    except KeyError:
        raise KeyError(f"no built-in scenario {name!r}") from None


def builtin(name):
    return build_scenario(scenario_data(name))


def build_xray_vent(**kw):
    return build_scenario(xray_vent_data(**kw))


def build_pca(variant=EQUAL_DELAYS, **kw):
    return build_scenario(pca_data(variant, **kw))


def to_yaml(data) -> str:
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)
