import numpy as np
import pytest

from ctlgram.experiments import worked_alphabets
from ctlgram.plants import pw_alphabets, simulate_piecewise
from ctlgram.traces import (
    RawTrace, SymbolTrace, TraceError, read_raw_csv, read_symbol_csv, symbol_trace, write_raw_csv,
    write_symbol_csv,
)


def test_symbol_roundtrip_with_resets():
    T, N = pw_alphabets()
    tr = simulate_piecewise(300, seed=1, episode=25).quantize(T, N)
    assert tr.resets
    back = read_symbol_csv(write_symbol_csv(tr, comments=["seed 1"]))
    assert back == tr


def test_raw_roundtrip():
    raw = simulate_piecewise(60, seed=2, episode=7)
    back = read_raw_csv(write_raw_csv(raw))
    assert np.array_equal(back.u, raw.u) and np.array_equal(back.y, raw.y)
    assert np.array_equal(back.history, raw.history)
    assert back.resets.keys() == raw.resets.keys()


def test_contexts_follow_resets():
    T, N = worked_alphabets()
    tr = SymbolTrace(T, N, tuple(N.symbols[:1]) * 3, tuple(T.symbols[:3]), (T.symbol(4),),
                     {2: (T.symbol(3),)})
    assert [[s.label for s in c] for c in tr.contexts(2)] == [["e"], ["e", "a"], ["d"]]


def test_slice_carries_history():
    T, N = worked_alphabets()
    tr = symbol_trace(T, N, "ABAABA", "edcbde")
    part = tr.slice(3, 5, keep=2)
    assert [s.label for s in part.history] == ["d", "c"]
    assert [s.label for s in part.outputs] == ["b", "d"]


def test_errors():
    T, N = worked_alphabets()
    with pytest.raises(TraceError):
        SymbolTrace(T, N, tuple(N.symbols), ())
    with pytest.raises(TraceError, match="line 3"):
        read_symbol_csv("t,U,Y\n0,A,e\n1,Q,d\n", T, N)
    with pytest.raises(TraceError):
        read_symbol_csv("t,U,Y\n0,A,e\n")
    with pytest.raises(TraceError):
        read_raw_csv("a,b\n1,2\n")
