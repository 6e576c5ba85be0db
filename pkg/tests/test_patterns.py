import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paths import maximal_paths, variant
from tact.lang.check import static_check
from tact.patterns import templates
from tact.patterns.behaviors import periodic_publisher, sink_service
from tact.patterns.compose import SUBSTRATE_INSTANCE, Fragment, compose
from tact.patterns.params import (
    PARAM_TYPES,
    PUB_SUB,
    REQ_RES,
    Delays,
    FailureKind,
    IniExeParams,
    PatternParamError,
    PubSubParams,
    ReqResParams,
    SenRecParams,
    SubstrateConfig,
    make_params,
)
from tact.scenarios.library import REGISTRY, builtin, matrix_data, scenario_names
from tact.semantics.explore import BFTTS_RELAXED, FTTS, explore
from tact.semantics.export import state_to_dict
from tact.semantics.ftts import enabled_messages

PS = PubSubParams(N_pub=4, L_pub=6, R_pub=40, N_sub=7, L_sub=5, X_sub=20, R_sub=5)
RR = ReqResParams(N_req=2, L_req=30, R_req=15, N_res=7, L_res=5, R_res=10)
IE = IniExeParams(N_ini=3, L_ini=25, N_exe=5, L_exe=4)
SR = SenRecParams(N_sen=5, L_sen=30, N_rec=7, L_rec=5)
BASE = {PUB_SUB: PS, REQ_RES: RR, "ini-exe": IE, "sen-rec": SR}

ALL_PARAMS = [
    "N_pub", "L_pub", "R_pub", "N_sub", "X_sub", "L_sub", "R_sub",
    "N_req", "L_req", "R_req", "N_res", "L_res", "R_res",
    "N_ini", "L_ini", "N_exe", "L_exe",
    "N_sen", "L_sen", "N_rec", "L_rec",
]


def failures(labels):
    out = []
    for lbl in labels:
        if "." in lbl and not lbl.startswith("expired:"):
            kind = FailureKind.from_message(lbl.split(".", 1)[1])
            if kind is not None:
                out.append(kind)
    return out


def render(role, params, delays=Delays()):
    kind, requester = templates.ROLES[role]
    args = (role, "App", params, delays, 0)
    if kind != PUB_SUB or requester:
        args += (1,)
    return templates.RENDERERS[role](*args)


# ------------------------------------------------------------ parameters


def test_negative_parameter_rejected():
    with pytest.raises(PatternParamError, match="N_ini"):
        IniExeParams(N_ini=-1, L_ini=2, N_exe=1, L_exe=1)


def test_bool_parameter_rejected():
    with pytest.raises(PatternParamError):
        SenRecParams(N_sen=True, L_sen=2, N_rec=1, L_rec=1)


def test_publication_freshness_order_enforced():
    with pytest.raises(PatternParamError, match="stale"):
        PubSubParams(N_pub=1, L_pub=1, R_pub=4, N_sub=1, X_sub=9, L_sub=1, R_sub=5)


def test_negative_pubsub_budget_warns():
    with pytest.warns(UserWarning, match="negative"):
        PubSubParams(N_pub=1, L_pub=3, R_pub=6, N_sub=1, X_sub=9, L_sub=1, R_sub=5)


def test_make_params_reports_unknown_and_missing():
    with pytest.raises(PatternParamError, match=r"unknown \['N_x'\], missing \['N_sen'\]"):
        make_params("sen-rec", {"N_x": 1, "L_sen": 2, "N_rec": 1, "L_rec": 1})
    with pytest.raises(PatternParamError, match="unknown pattern kind"):
        make_params("broadcast", {})


def test_delays_validated():
    with pytest.raises(PatternParamError):
        Delays(client=())
    with pytest.raises(PatternParamError):
        Delays(net=(1, -2))


def test_per_pattern_delays_only_apply_to_that_variant():
    fast = Delays(net=(7,))
    eq = SubstrateConfig(delays=Delays(), per_pattern={REQ_RES: fast})
    per = dataclasses.replace(eq, variant="PER_PATTERN_DELAYS")
    assert eq.delays_for(REQ_RES) == Delays()
    assert per.delays_for(REQ_RES) == fast and per.delays_for(PUB_SUB) == Delays()


# -------------------------------------------------------------- coverage


def test_every_local_property_has_exactly_one_enforcer():
    owners = {}
    for role, names in templates.ENFORCES.items():
        for n in names:
            owners.setdefault(n, []).append(role)
    assert sorted(owners) == sorted(ALL_PARAMS)
    assert all(len(v) == 1 for v in owners.values())
    declared = {f.name for cls in PARAM_TYPES.values() for f in dataclasses.fields(cls)}
    assert declared == set(ALL_PARAMS)


@pytest.mark.parametrize("param", ALL_PARAMS)
def test_enforcing_component_depends_on_its_parameter(param):
    """Changing a parameter changes the generated source of the role said to enforce it."""
    (role,) = [r for r, names in templates.ENFORCES.items() if param in names]
    kind = templates.ROLES[role][0]
    base = BASE[kind]
    bumped = dataclasses.replace(base, **{param: getattr(base, param) + 1})
    assert render(role, base) != render(role, bumped)


FAILURE_OWNERS = {
    FailureKind.FAST_PUBLICATION: {"PublisherRequester"},
    FailureKind.SLOW_PUBLICATION: {"SubscriberInvoker"},
    FailureKind.SLOW_CONSUMPTION: {"SubscriberInvoker"},
    FailureKind.STALE_DATA: {"SubscriberInvoker", "RequestRequester"},
    FailureKind.FAST_REQUEST: {"RequestRequester"},
    FailureKind.DATA_UNAVAILABLE: {"ResponderInvoker"},
    FailureKind.EXCESS_LOAD: {"ResponderInvoker", "ExecutorInvoker", "ReceiverInvoker"},
    FailureKind.FAST_INIT: {"InitiatorRequester"},
    FailureKind.FAST_SEND: {"SenderRequester"},
    FailureKind.TIMEOUT: {
        "PublisherRequester", "RequestRequester", "ResponderInvoker", "InitiatorRequester",
        "ExecutorInvoker", "SenderRequester", "ReceiverInvoker",
    },
}


@pytest.mark.parametrize("kind", list(FailureKind), ids=lambda k: k.value)
def test_failures_come_from_their_components(kind):
    emitting = set()
    for role in templates.ROLES:
        kind_ = templates.ROLES[role][0]
        if f"app.{kind.message}(" in render(role, BASE[kind_]):
            emitting.add(role)
    assert emitting == FAILURE_OWNERS[kind]


@pytest.mark.parametrize("role", sorted(templates.ROLES))
def test_app_messages_cover_emitted_failures(role):
    text = render(role, BASE[templates.ROLES[role][0]])
    for kind in FailureKind:
        if f"app.{kind.message}(" in text:
            assert kind.message in templates.APP_MESSAGES[role]


def test_abstract_guards_on_lifetime_parameters():
    sub = render("SubscriberInvoker", PS)
    req = render("RequestRequester", RR)
    assert f"@abstract(life, life < {PS.R_sub})" in sub
    assert f"@abstract(life, life < {RR.R_res})" in req


# ----------------------------------------------------------- monitor rules


def _labels(sc, mode=FTTS):
    ts = explore(sc.model, mode)
    assert ts.complete
    return ts, maximal_paths(ts)


def test_publish_at_exactly_min_separation_is_accepted():
    trig, sib = matrix_data()[FailureKind.FAST_PUBLICATION]
    assert sib["apps"][0]["period"] == [sib["patterns"][0]["params"]["N_pub"]]
    assert trig["apps"][0]["period"] == [sib["patterns"][0]["params"]["N_pub"] - 1]
    _, paths = _labels(builtin(sib["name"]))
    assert all(not failures(p) for p in paths)


def test_fast_publication_drops_the_publish():
    _, paths = _labels(builtin("monitor-fastPublication-trigger"))
    for p in paths:
        assert failures(p) == [FailureKind.FAST_PUBLICATION]
        assert p.count("client.accepted") == 1
        assert p.count("service.consume") == 1


def test_excess_load_drops_the_request():
    _, paths = _labels(builtin("monitor-excessLoad-trigger"))
    for p in paths:
        assert p.count("ri.RcvRequest") == 2
        assert p.count("service.serve") == 1
        assert p.count("service.excessLoadFailure") == 1


@pytest.mark.parametrize("compute,fails", [(3, False), (4, True)])
def test_executor_timeout_boundary(compute, fails):
    # done reaches ei serviceDelay(1) + compute after the initiate; fails iff that exceeds L_exe=4
    sc = variant("monitor-fastInit-sibling", service={"compute": compute},
                 assertions=[{"name": "t", "check": "never timeout"}])
    _, paths = _labels(sc)
    for p in paths:
        got = failures(p)
        if fails:
            assert got and set(got) == {FailureKind.TIMEOUT}
            assert "service.timeoutFailure" in p
        else:
            assert got == []


def test_silent_drop_keeps_previous_publication_time():
    """Arrivals at 2, 6 and 10 with N_sub=5: the second is dropped without
    notice, and the third is measured against the first."""
    sc = variant(
        "monitor-fastPublication-sibling",
        params={"N_pub": 4, "N_sub": 5},
        client={"period": [4], "count": 3},
        service={"compute": 0},
        delays={"client": [1], "net": [1], "service": [1]},
    )
    _, paths = _labels(sc)
    for p in paths:
        assert p.count("si.RcvPublish") == 3
        assert p.count("service.consume") == 2
        assert failures(p) == []


def test_silent_drop_oracle_if_drop_updated_last_publication():
    # the same arrivals with N_sub=4 would consume all three, so N_sub=5 is what drops
    sc = variant(
        "monitor-fastPublication-sibling",
        params={"N_pub": 4, "N_sub": 4},
        client={"period": [4], "count": 3},
        delays={"client": [1], "net": [1], "service": [1]},
    )
    _, paths = _labels(sc)
    assert all(p.count("service.consume") == 3 for p in paths)


@settings(max_examples=12)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_substrate_neutrality(c, n, s):
    """One uncontended publish is consumed at c + n + s and records latency n."""
    sc = variant(
        "monitor-fastPublication-sibling",
        client={"count": 1},
        service={"compute": 0},
        delays={"client": [c], "net": [n], "service": [s]},
    )
    ts = explore(sc.model, FTTS)
    assert ts.complete
    hits = [dst for _, lbl, dst in ts.transitions if lbl == "service.consume"]
    assert hits  # several when zero delays let other actors interleave
    for h in hits:
        service = state_to_dict(ts.states[h], sc.model)["actors"]["service"]
        assert service["time"] == c + n + s
        assert service["vars"]["transmissionTime"] == n


# ------------------------------------------------------------- compose


def _pubsub_apps():
    return [periodic_publisher("pub", "pr", count=1), sink_service("sub", "si", compute=0)]


def test_single_fragment_has_five_actors():
    comp = compose([Fragment(PUB_SUB, PS, "pub", "sub")], _pubsub_apps())
    assert [i.name for i in comp.model.instances] == ["pub", "pr", SUBSTRATE_INSTANCE, "si", "sub"]
    assert static_check(comp.model) == []


def test_pca_composition_shape():
    m = builtin("pca").model
    names = [i.name for i in m.instances]
    assert len(names) == 11
    assert names.count(SUBSTRATE_INSTANCE) == 1
    assert sorted(i.class_name for i in m.instances if i.name in ("siCap", "siOxi", "rrPump", "riPump")) == [
        "RequestRequesterPump", "ResponderInvokerPump", "SubscriberInvokerCap", "SubscriberInvokerOxi",
    ]
    cs = m.cls("CommunicationSubstrate")
    assert {s.name for s in cs.servers if not s.is_constructor} == {
        "transmitPublish", "transmitRequest", "transmitResponse",
    }


def test_xray_composition_shares_one_substrate():
    m = builtin("xray-vent").model
    assert [i.name for i in m.instances].count(SUBSTRATE_INSTANCE) == 1
    assert {i.class_name for i in m.instances} >= {"InitiatorRequesterVent", "InitiatorRequesterXray"}
    cs = m.cls("CommunicationSubstrate")
    assert {s.name for s in cs.servers if not s.is_constructor} == {"transmitInitiate", "transmitAck"}


def test_ids_follow_declaration_order():
    comp = builtin("pca").composition
    assert comp.ids == {inst.name: i for i, inst in enumerate(comp.model.instances)}


def test_compose_rejects_duplicate_prefix():
    f = Fragment(PUB_SUB, PS, "pub", "sub")
    with pytest.raises(PatternParamError, match="duplicate"):
        compose([f, Fragment(PUB_SUB, PS, "pub", "sub")], _pubsub_apps())


def test_compose_rejects_missing_app():
    with pytest.raises(PatternParamError, match="no application named 'ghost'"):
        compose([Fragment(PUB_SUB, PS, "pub", "ghost")], _pubsub_apps())


def test_fragment_rejects_wrong_parameter_type():
    with pytest.raises(PatternParamError, match="ReqResParams given for a pub-sub"):
        Fragment(PUB_SUB, RR, "a", "b")


def test_unhandled_failures_get_skip_handlers():
    comp = compose([Fragment(PUB_SUB, PS, "pub", "sub")], _pubsub_apps())
    sub = comp.model.cls("Sub")
    names = {s.name for s in sub.servers}
    assert {"slowPublicationFailure", "staleDataFailure", "slowConsumptionFailure"} <= names


def test_per_pattern_net_delays_in_substrate():
    text = builtin("pca-per-pattern").source
    assert "int netDelay = ?(1, 2, 3);" in text
    assert "int netDelay = ?(1, 2);" in text


# ------------------------------------------------------------ PRIORITIZED


def _substrate_choices(name):
    sc = builtin(name)
    m = sc.model
    cs = [i.name for i in m.instances].index(SUBSTRATE_INSTANCE)
    ts = explore(m, BFTTS_RELAXED)
    assert ts.complete
    adj = ts.adjacency()
    contested = taken_rr = 0
    for i, s in enumerate(ts.states):
        bag = s.actors[cs].bag
        if not bag:
            continue
        first = min(msg.arrival for msg in bag)
        names = {msg.name for msg in bag if msg.arrival == first}
        if "transmitPublish" in names and names - {"transmitPublish"}:
            contested += 1
            if any(lbl.startswith("cs.transmitRe") for lbl, _ in adj[i]):
                taken_rr += 1
    return contested, taken_rr


def test_prioritized_substrate_serves_publications_first():
    contested, taken_rr = _substrate_choices("pca-prioritized")
    assert contested > 0
    assert taken_rr == 0


def test_equal_substrate_interleaves_freely():
    # the same check is not vacuous: without priorities request traffic can go first
    contested, taken_rr = _substrate_choices("pca")
    assert contested > 0 and taken_rr > 0


def test_prioritized_annotations_in_source():
    cs = builtin("pca-prioritized").model.cls("CommunicationSubstrate")
    prio = {s.name: s.priority for s in cs.servers if not s.is_constructor}
    assert prio["transmitPublish"] < prio["transmitRequest"] == prio["transmitResponse"]


def test_priority_only_ranks_same_actor_messages():
    m = builtin("pca-prioritized").model
    ts = explore(m, FTTS, max_states=200)
    for s in ts.states:
        for idx, msg, _ in enabled_messages(s, m):
            assert msg in s.actors[idx].bag


def test_registry_matrix_is_complete():
    kinds = {REGISTRY[n]["tags"][1] for n in scenario_names("matrix")}
    assert kinds == {k.value for k in FailureKind}
    assert len(scenario_names("matrix")) == 2 * len(FailureKind)
