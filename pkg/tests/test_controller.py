import pytest

from ctlgram.controller import (
    COMPLETED, LOWEST_INDEX, STALLED, ControlPlan, NoApplicableProduction, candidates, plan_step, track_targets,
)
from ctlgram.experiments import CONTROL_TARGETS, pw_control, pw_grammar
from ctlgram.grammar import Grammar, word
from ctlgram.plants import PiecewisePlant, pw_alphabets, step_piecewise, PiecewiseState, InadmissibleControl
from ctlgram.recognizer import Recognizer

T, N = pw_alphabets()


@pytest.fixture(scope="module")
def g():
    return pw_grammar()


def test_exact_hit_wins(g):
    u, y = plan_step(g, word(T, "bb"), T.by_label("b"))
    assert (u.label, y.label) == ("C", "b")


def test_cb_to_a_matches_simulator(g):
    u, y = plan_step(g, word(T, "cb"), T.by_label("a"))
    # ground truth: try each control on the plant itself
    best = None
    for v in (-1, 0, 1):
        try:
            out = step_piecewise(PiecewiseState(2, 3), v)[1]
        except InadmissibleControl:
            continue
        if best is None or abs(out - 1) < best[0]:
            best = (abs(out - 1), v)
    assert u.index - 1 == best[1] and u.label == "C"


def test_no_applicable_production():
    empty = Grammar(T, N, 2)
    with pytest.raises(NoApplicableProduction):
        plan_step(empty, word(T, "ab"), T.by_label("a"))


def test_greedy_choice_is_minimal(g):
    rec = Recognizer(g)
    for h in ("aa", "ab", "bc", "cd", "dd", "bd"):
        for t in T.symbols:
            u, _ = plan_step(g, word(T, h), t)
            dists = {c[4]: c[0] for c in candidates(rec, word(T, h), t)}
            assert dists[u] == min(dists.values())


def test_target_word_completed(g):
    tr = pw_control(g)
    assert tr.outcome == COMPLETED and len(tr.reached) == len(CONTROL_TARGETS)
    assert all(s.reached == (s.output == s.target) for s in tr.steps)
    # the grammar is exact on this plant
    assert all(s.predicted == s.output for s in tr.steps)


def test_target_equal_to_output_is_immediate(g):
    p = PiecewisePlant((2, 1))
    tr = track_targets(g, p, ControlPlan(word(T, "a")))
    assert tr.outcome == COMPLETED and tr.steps == [] and tr.reached == [0]


def test_perturbation_recovered(g):
    tr = pw_control(g, overrides={6: 2})
    assert tr.outcome == COMPLETED
    assert any(s.predicted != s.output for s in tr.steps)


def test_step_budget(g):
    # from the self-loop state only 'b' can ever be produced
    p = PiecewisePlant((2, 2))
    tr = track_targets(g, p, ControlPlan(word(T, "c"), max_steps_per_target=5))
    assert tr.outcome == STALLED and len(tr.steps) == 5


def test_lowest_index_tie_break_walks_into_dead_end(g):
    tr = pw_control(g, tie_break=LOWEST_INDEX)
    assert tr.outcome == STALLED


def test_plan_validation():
    with pytest.raises(ValueError):
        ControlPlan(())
    with pytest.raises(ValueError):
        ControlPlan(word(T, "a"), 0)


def test_csv(g):
    lines = pw_control(g).to_csv().splitlines()
    assert lines[0] == "step,target,control,output,reached"
    assert lines[1] == "0,c,C,a,0" and lines[-1] == "# outcome completed"
