import numpy as np
import pytest

from ctlgram.alphabet import build_uniform_alphabet
from ctlgram.anomaly import AnomalyConfig, TraceTooShort, calibrate_threshold, detect, intervals
from ctlgram.experiments import misread, pw_grammar, pw_training_trace
from ctlgram.grammar import Grammar, Production
from ctlgram.traces import symbol_trace

T = build_uniform_alphabet(1, 5, 5, "T", "exact")
N = build_uniform_alphabet(1, 1, 1, "N", "exact")


def flat_grammar():
    g = Grammar(T, N, 2)
    g.put(Production((), N.symbol(0), T.by_label("c")))
    return g


def test_healthy_saturated_is_zero():
    g = pw_grammar()
    rep = detect(g, pw_training_trace(400, seed=11, episode=None), AnomalyConfig(10))
    assert not rep.distance.any() and rep.flags == []


def test_zero_threshold_on_noisy_trace_flags():
    g = pw_grammar()
    noisy = misread(pw_training_trace(200, seed=12, episode=None), 0.05, np.random.default_rng(0))
    assert detect(g, noisy, AnomalyConfig(10, 0.0)).flags


def test_calibration_arithmetic():
    g = flat_grammar()
    tr = symbol_trace(T, N, "A" * 8, "ccecccac")
    assert calibrate_threshold(g, tr, L=3) == 3.0
    clean = symbol_trace(T, N, "A" * 8, "c" * 8)
    assert calibrate_threshold(g, clean, L=3) == 0.0


def test_distance_window_and_block_mode():
    g = flat_grammar()
    tr = symbol_trace(T, N, "A" * 6, "cccdcc")
    rep = detect(g, tr, AnomalyConfig(L=2, threshold=0.5))
    assert list(rep.steps) == [1, 2, 3, 4, 5]
    assert list(rep.distance) == [0, 0, 1, 1, 0]
    assert rep.flags == [(3, 4)]
    blk = detect(g, tr, AnomalyConfig(L=2, threshold=0.5, block=True))
    assert list(blk.steps) == [1, 3, 5] and list(blk.distance) == [0, 1, 0]


def test_gaps_cost_gap_penalty():
    g = Grammar(T, N, 2)
    tr = symbol_trace(T, N, "AAA", "ccc")
    rep = detect(g, tr, AnomalyConfig(L=3, gap_penalty=1.5))
    assert rep.distance[0] == 4.5 and rep.gaps == [0, 1, 2]
    assert detect(g, tr, AnomalyConfig(L=3)).distance[0] == 3 * 5  # default: insertion cost n


def test_too_short():
    with pytest.raises(TraceTooShort):
        detect(flat_grammar(), symbol_trace(T, N, "AA", "cc"), AnomalyConfig(L=3))


def test_intervals():
    assert intervals([1, 2, 3, 4, 5, 6], [0, 1, 1, 0, 1, 1]) == [(2, 3), (5, 6)]
    assert intervals([], []) == []


def test_report_csv():
    g = flat_grammar()
    rep = detect(g, symbol_trace(T, N, "AAA", "cdc"), AnomalyConfig(L=2, threshold=0.5))
    assert rep.to_csv().splitlines() == [
        "step,distance,flag", "1,1.0,1", "2,1.0,1", "# threshold 0.5", "# flagged 1-2",
    ]
