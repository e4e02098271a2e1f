import os

import pytest
from hypothesis import given, settings, strategies as st

from ctlgram.experiments import pw_training_trace, worked_alphabets, worked_trace
from ctlgram.grammar import Production, shadow_conflicts, word
from ctlgram.learner import (
    CREATED, DELETED, LearnerConfig, LearnerState, events_csv, finalize, learn_trace, observe,
)
from ctlgram.traces import symbol_trace

DATA = os.path.join(os.path.dirname(__file__), "data")
T, N = worked_alphabets()
A, B = N.symbols


def test_worked_example_grammar_file():
    g, _ = learn_trace(worked_trace(), LearnerConfig(2, 2, 1))
    with open(os.path.join(DATA, "worked_grammar.txt")) as fh:
        assert g.serialize() == fh.read()


def test_worked_example_event_log():
    _, events = learn_trace(worked_trace(), LearnerConfig(2, 2, 1))
    assert [str(e) for e in events] == [
        "0: created A -> e",
        "1: created B -> d",
        "2: created dA -> c",
        "2: deleted A -> e",
        "3: created cA -> b",
        "4: reinforced B -> d",
        "5: created bdA -> e",
        "5: promoted dA -> c => edA -> c",
    ]


def test_first_observation_creates_zero_type():
    st_ = LearnerState(T, N, 2, 2)
    ev = observe(st_, A, T.by_label("e"))
    assert len(ev) == 1 and ev[0].kind == CREATED and ev[0].after.order == 0


def test_third_observation_deletes_incumbent():
    st_ = LearnerState(T, N, 2, 2)
    observe(st_, A, T.by_label("e"))
    observe(st_, B, T.by_label("d"))
    ev = observe(st_, A, T.by_label("c"))
    assert [(e.kind, str(e.after or e.before)) for e in ev] == [(CREATED, "dA -> c"), (DELETED, "A -> e")]


def test_single_pair():
    g, _ = learn_trace(symbol_trace(T, N, "B", "d"))
    assert [str(p) for p in g] == ["B -> d"]


def test_min_count_filter():
    st_ = LearnerState(T, N, 2)
    st_.grammar.put(Production((), B, T.by_label("d"), 5))
    st_.grammar.put(Production(word(T, "c"), A, T.by_label("b"), 1))
    assert [str(p) for p in finalize(st_, 2)] == ["B -> d"]
    g = finalize(st_, 1)
    assert len(g) == 2 and g.frozen


def test_zero_window_never_promotes():
    g, events = learn_trace(worked_trace(), LearnerConfig(2, 0, 1))
    assert not any(e.kind == "promoted" for e in events)
    assert shadow_conflicts(g) == []


def test_saturated_run_is_noise_free():
    tr = pw_training_trace(3000, seed=5)
    g1, _ = learn_trace(tr, LearnerConfig(min_count=1))
    g2, _ = learn_trace(tr, LearnerConfig(min_count=2))
    assert g1 == g2


def test_bad_symbol_rejected():
    st_ = LearnerState(T, N, 2)
    with pytest.raises(ValueError, match="foreign-symbol"):
        observe(st_, T.symbol(0), T.symbol(0))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 4)), max_size=60),
       st.integers(0, 3), st.integers(0, 4))
def test_no_shadow_conflicts_ever(pairs, p_max, window):
    controls = "".join("AB"[u] for u, _ in pairs)
    outputs = "".join("abcde"[y] for _, y in pairs)
    g, _ = learn_trace(symbol_trace(T, N, controls, outputs), LearnerConfig(p_max, window))
    assert shadow_conflicts(g) == []
    assert all(p.order <= p_max for p in g)


def test_events_csv_columns():
    _, events = learn_trace(worked_trace(), LearnerConfig(2, 2, 1))
    lines = events_csv(events).splitlines()
    assert lines[0] == "step,kind,order_before,lhs_before,order_after,lhs_after,output"
    assert lines[-1] == "5,promoted,1,dA,2,edA,c"
