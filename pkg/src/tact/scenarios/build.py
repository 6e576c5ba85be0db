"""Building scenarios from plain data (the ``.tam-scn`` YAML schema).

Schema::

    name: pubsub-row1
    description: free text
    substrate:
      variant: EQUAL_DELAYS | PER_PATTERN_DELAYS | PRIORITIZED
      delays: {client: [1, 2], net: [1, 4], service: [0]}
      per_pattern: {req-res: {net: [1, 2, 3]}}    # kind or pattern prefix
      priorities: {transmitPublish: 1}
      capacity: 10
    patterns:
      - {kind: pub-sub, prefix: "", client: pub, service: sub, params: {...}}
    apps:
      - {behavior: periodic_publisher, name: pub, period: [5, 6], data: [true]}
    assertions:
      - {name: latency, check: budget(pub-sub)}
    expect: {latency: pass}
    max_states: 50000

Apps of the single-interface behaviors find their interface automatically
from the pattern list unless ``interface`` is given.
"""

from __future__ import annotations

from ..patterns import behaviors as b
from ..patterns.compose import Fragment, compose
from ..patterns.params import Delays, PatternParamError, SubstrateConfig, make_params
from . import apps as case_apps
from .scenario import Scenario

BEHAVIORS = {
    "periodic_publisher": (b.periodic_publisher, "client"),
    "sink_service": (b.sink_service, "service"),
    "periodic_requester": (b.periodic_requester, "client"),
    "echo_responder": (b.echo_responder, "service"),
    "periodic_initiator": (b.periodic_initiator, "client"),
    "executor": (b.executor, "service"),
    "periodic_sender": (b.periodic_sender, "client"),
    "receiver": (b.receiver, "service"),
    "pump": (case_apps.pump, "service"),
    "xray_controller": (case_apps.xray_controller, None),
    "pca_monitor": (case_apps.pca_monitor, None),
}


class ScenarioError(ValueError):
    pass


def _tuple(v):
    if isinstance(v, (list, tuple)):
        return tuple(v)
    return (v,)


def _delays(d, base=None):
    base = base or Delays()
    d = d or {}
    unknown = set(d) - {"client", "net", "service"}
    if unknown:
        raise ScenarioError(f"unknown delay kinds {sorted(unknown)}")
    return Delays(
        _tuple(d.get("client", base.client)),
        _tuple(d.get("net", base.net)),
        _tuple(d.get("service", base.service)),
    )


def substrate_from_dict(d):
    d = d or {}
    base = _delays(d.get("delays"))
    per = {k: _delays(v, base) for k, v in (d.get("per_pattern") or {}).items()}
    return SubstrateConfig(d.get("variant", "EQUAL_DELAYS"), base, per, d.get("priorities"))


def _with_defaults(spec, fragments):
    spec = dict(spec)
    behavior = spec.pop("behavior", None)
    if behavior not in BEHAVIORS:
        raise ScenarioError(f"unknown behavior {behavior!r}")
    fn, side = BEHAVIORS[behavior]
    name = spec.get("name")
    if not name:
        raise ScenarioError(f"{behavior}: app needs a name")
    if side is not None and "interface" not in spec:
        attr = "client" if side == "client" else "service"
        found = [f for f in fragments if getattr(f, attr) == name]
        if len(found) != 1:
            raise ScenarioError(f"{name}: cannot tell which interface to attach to; give 'interface'")
        f = found[0]
        spec["interface"] = f.requester if side == "client" else f.invoker
    if behavior == "pca_monitor" and "tags" not in spec:
        tags = []
        for si in spec.get("subscriptions", ()):
            idx = [i for i, f in enumerate(fragments) if f.invoker == si]
            if not idx:
                raise ScenarioError(f"{name}: {si!r} is not a subscriber interface")
            tags.append(idx[0])
        spec["tags"] = tags
    for k in ("period", "data", "compute", "statuses"):
        if isinstance(spec.get(k), list):
            spec[k] = tuple(spec[k])
    try:
        return fn(**spec)
    except TypeError as exc:
        raise ScenarioError(f"{behavior}: {exc}") from None


def build_scenario(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping")
    try:
        fragments = [
            Fragment(p["kind"], make_params(p["kind"], p.get("params") or {}), p["client"], p["service"],
                     str(p.get("prefix", "") or ""))
            for p in data.get("patterns") or []
        ]
        apps = [_with_defaults(a, fragments) for a in data.get("apps") or []]
        sub = data.get("substrate") or {}
        comp = compose(fragments, apps, substrate_from_dict(sub), sub.get("capacity", 10))
    except (KeyError, PatternParamError) as exc:
        raise ScenarioError(f"{data.get('name', '?')}: {exc}") from None
    sc = Scenario(
        data.get("name", "unnamed"),
        comp,
        description=data.get("description", ""),
        max_states=data.get("max_states"),
        tags=tuple(data.get("tags") or ()),
    )
    specs = [(a["name"], a["check"]) for a in data.get("assertions") or []]
    sc.with_assertions(specs)
    expect = data.get("expect") or {}
    for k, v in expect.items():
        if v not in ("pass", "fail", True, False):
            raise ScenarioError(f"expect[{k}] must be pass or fail")
        sc.expected[k] = v in ("pass", True)
    return sc
