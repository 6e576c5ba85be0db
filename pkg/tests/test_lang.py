import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES
from tact.lang import ast
from tact.lang.check import ABSTRACT_ESCAPE, INTERVAL_MISUSE, NOW_USAGE, require_clean, static_check
from tact.lang.errors import EvalError, ParseError, StaticCheckError
from tact.lang.interp import as_compiled, execute_server, initial_state
from tact.lang.parser import parse_model
from tact.lang.printer import format_model
from tact.patterns import templates
from tact.patterns.params import Delays, PubSubParams
from tact.scenarios.library import builtin
from tact.semantics.state import INF, LocalState, Message

GOOD = sorted(FIXTURES.glob("*.tam"))


def _codes(src):
    return {d.code for d in static_check(parse_model(src))}


# ------------------------------------------------------------------ parser


def test_parse_request_response(rr_model):
    assert [c.name for c in rr_model.classes] == ["Requester", "Responder"]
    assert [i.name for i in rr_model.instances] == ["req", "res"]
    assert all(c.capacity == 5 for c in rr_model.classes)
    assert rr_model.instances[0].bindings == ("res",)


def test_parse_empty_main():
    m = parse_model((FIXTURES / "empty.tam").read_text())
    assert m.instances == ()
    assert static_check(m) == []


def test_default_capacity():
    m = parse_model("reactiveclass A { A() { } } main { A a():(); }")
    assert m.classes[0].capacity == ast.DEFAULT_CAPACITY


def test_annotations_parse():
    m = parse_model((FIXTURES / "interval_monitor.tam").read_text())
    mon = m.cls("Monitor")
    assert mon.statevar("last").interval and mon.statevar("last").type == ast.TIME
    srv = mon.server("sample")
    assert srv.abstract_for("life") is not None
    tie = parse_model((FIXTURES / "priority_tie.tam").read_text()).cls("Sink")
    assert tie.server("urgent").priority == 1 and tie.server("routine").priority == 2


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_model((FIXTURES / "bad" / "syntax_error.tam").read_text())
    assert (exc.value.line, exc.value.col) == (3, 13)


def test_unknown_class_in_main():
    with pytest.raises(ParseError, match="unknown class 'B'"):
        parse_model((FIXTURES / "bad" / "unknown_class.tam").read_text())


def test_known_rebec_arity_mismatch():
    with pytest.raises(ParseError, match="binds 0 known rebecs"):
        parse_model((FIXTURES / "bad" / "arity.tam").read_text())


def test_mutual_bindings_allowed(rr_model):
    assert static_check(rr_model) == []


@pytest.mark.parametrize("path", GOOD, ids=lambda p: p.name)
def test_round_trip_fixtures(path):
    m = parse_model(path.read_text())
    again = parse_model(format_model(m))
    assert again == m
    assert format_model(again) == format_model(m)


@pytest.mark.parametrize("name", ["pubsub-row1", "reqres-row1", "xray-vent", "pca"])
def test_round_trip_generated_models(name):
    m = builtin(name).model
    assert parse_model(format_model(m)) == m


# ------------------------------------------------------------ static check


def test_now_in_send_argument_rejected():
    src = (FIXTURES / "bad" / "now_in_send.tam").read_text()
    assert NOW_USAGE in _codes(src)
    with pytest.raises(StaticCheckError):
        require_clean(parse_model(src))


def test_interval_variable_arithmetic_rejected():
    assert INTERVAL_MISUSE in _codes((FIXTURES / "bad" / "interval_times_two.tam").read_text())


def test_abstract_parameter_escape_rejected():
    assert ABSTRACT_ESCAPE in _codes((FIXTURES / "bad" / "abstract_escape.tam").read_text())


def test_generated_publisher_interface_is_clean():
    p = PubSubParams(N_pub=4, L_pub=6, R_pub=40, N_sub=7, L_sub=5, X_sub=20, R_sub=5)
    m = builtin("pubsub-row1").model
    assert static_check(m) == []
    pr = m.cls("PublisherRequester")
    assert pr.statevar("lastPub").interval
    text = templates.publisher_requester("PublisherRequester", "Client", p, Delays(), 0, 3)
    assert "now - lastPub" in text


@pytest.mark.parametrize(
    "body",
    [
        "x = now;",  # plain int variable
        "t = now + 1;",
        "if (now > 3) { skip; }",
    ],
)
def test_now_rules(body):
    src = f"""
    reactiveclass A {{
        statevars {{ int x; interval time t; }}
        A() {{ }}
        msgsrv go() {{ {body} }}
    }}
    main {{ A a():(); }}
    """
    codes = _codes(src)
    assert codes & {NOW_USAGE, INTERVAL_MISUSE}


def test_now_difference_allowed():
    src = """
    reactiveclass A {
        statevars { int x; interval time t; boolean has; }
        A() { }
        msgsrv go() {
            if (has && now - t > 2) { x = 1; }
            t = now;
            has = true;
        }
    }
    main { A a():(); }
    """
    assert _codes(src) == set()


def test_abstract_guard_only_in_conditions():
    ok = """
    reactiveclass A {
        statevars { int n; }
        A() { }
        @abstract(life, life < 5)
        msgsrv rcv(int life) {
            if (life < 5) { n = n + 1; } else { skip; }
        }
    }
    main { A a():(); }
    """
    assert _codes(ok) == set()
    other_condition = ok.replace("if (life < 5)", "if (life < 7)")
    assert ABSTRACT_ESCAPE in _codes(other_condition)


# ----------------------------------------------------------- interpreter


def test_request_handler_narrative(rr_model):
    cm = as_compiled(rr_model)
    s = initial_state(cm)
    req = s.actors[0]
    (oc,) = execute_server(req, req.bag[0], cm, 0)
    assert oc.local.time == 3
    ((dest, msg),) = oc.emitted
    assert dest == 1 and msg.name == "request" and msg.arrival == 11 and msg.deadline == INF


def test_empty_body_consumes_message():
    m = parse_model("reactiveclass A { statevars { int x; } A() { } msgsrv noop() { } } main { A a():(); }")
    cm = as_compiled(m)
    actor = LocalState((5,), (Message(7, "noop", 0), Message(9, "noop", 0)), 4)
    (oc,) = execute_server(actor, actor.bag[0], cm, 0)
    assert oc.local == LocalState((5,), (Message(9, "noop", 0),), 7)
    assert oc.emitted == ()


def _two_choice_model():
    return parse_model(
        """
        reactiveclass A {
            statevars { int x; int y; }
            A() { }
            msgsrv go() { x = ?(1, 2); y = ?(3, 4); }
        }
        main { A a():(); }
        """
    )


def test_nondet_product_in_source_order():
    m = _two_choice_model()
    cm = as_compiled(m)
    actor = LocalState((0, 0), (Message(0, "go", 0),), 0)
    outs = execute_server(actor, actor.bag[0], cm, 0)
    # oracle: brute-force product of the two value lists
    assert [o.local.vars for o in outs] == list(itertools.product((1, 2), (3, 4)))


def test_untaken_branch_does_not_fork():
    m = parse_model(
        """
        reactiveclass A {
            statevars { int x; boolean b; }
            A() { }
            msgsrv go() {
                if (b) { x = ?(1, 2, 3); }
                int y = ?(5, 6);
                x = x + y;
            }
        }
        main { A a():(); }
        """
    )
    cm = as_compiled(m)
    actor = LocalState((0, False), (Message(0, "go", 0),), 0)
    assert len(execute_server(actor, actor.bag[0], cm, 0)) == 2
    actor = LocalState((0, True), (Message(0, "go", 0),), 0)
    assert len(execute_server(actor, actor.bag[0], cm, 0)) == 6


def test_deadline_and_after_are_relative_to_sender_clock():
    m = parse_model(
        """
        reactiveclass A {
            knownrebecs { A me; }
            A() { }
            msgsrv go() { delay(2); me.ping() after(3) deadline(5); }
            msgsrv ping() { }
        }
        main { A a(a):(); }
        """
    )
    cm = as_compiled(m)
    actor = LocalState((), (Message(4, "go", 0),), 1)
    (oc,) = execute_server(actor, actor.bag[0], cm, 0)
    ((_, msg),) = oc.emitted
    assert oc.local.time == 6 and msg.arrival == 9 and msg.deadline == 11


def test_runtime_type_error():
    m = parse_model(
        """
        reactiveclass A {
            statevars { interval time t; int x; }
            A() { }
            msgsrv go() { if (now - t > 1) { x = 1; } }
        }
        main { A a():(); }
        """
    )
    cm = as_compiled(m)
    actor = LocalState((None, 0), (Message(0, "go", 0),), 0)
    with pytest.raises(EvalError, match="before assignment"):
        execute_server(actor, actor.bag[0], cm, 0)


@given(
    clock=st.integers(0, 50),
    arrival=st.integers(0, 50),
    delays=st.lists(st.integers(0, 5), min_size=0, max_size=4),
)
def test_local_time_monotone(clock, arrival, delays):
    body = " ".join(f"delay({d});" for d in delays)
    m = parse_model(f"reactiveclass A {{ A() {{ }} msgsrv go() {{ {body} }} }} main {{ A a():(); }}")
    cm = as_compiled(m)
    actor = LocalState((), (Message(arrival, "go", 0),), clock)
    (oc,) = execute_server(actor, actor.bag[0], cm, 0)
    assert oc.local.time == max(clock, arrival) + sum(delays)


@given(st.lists(st.lists(st.integers(0, 9), min_size=1, max_size=3, unique=True), min_size=1, max_size=3))
def test_outcome_count_is_product_of_arities(choices):
    decls = " ".join(f"int v{i} = ?({', '.join(map(str, c))});" for i, c in enumerate(choices))
    m = parse_model(f"reactiveclass A {{ A() {{ }} msgsrv go() {{ {decls} }} }} main {{ A a():(); }}")
    cm = as_compiled(m)
    actor = LocalState((), (Message(0, "go", 0),), 0)
    n = 1
    for c in choices:
        n *= len(c)
    assert len(execute_server(actor, actor.bag[0], cm, 0)) == n
