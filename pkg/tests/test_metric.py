import itertools
import random

import pytest
from hypothesis import given, strategies as st

from ctlgram.alphabet import build_uniform_alphabet
from ctlgram.grammar import word
from ctlgram.metric import CostModel, edit_distance, lhs_distance, parse_costmodel_line
from oracles import naive_edit

T = build_uniform_alphabet(1, 5, 5, "T", "exact")
N = build_uniform_alphabet(1, 2, 2, "N", "exact")
CM = CostModel.for_alphabet(T)


def w(s):
    return word(T, s)


def test_examples():
    assert edit_distance(w("ab"), w("ab"), CM) == 0
    assert edit_distance(w("ed"), w("bd"), CM) == 3
    assert edit_distance(w("abc"), w("ab"), CostModel()) == 1


def test_unit_cost_example_is_capped_by_indel():
    # with insertion = deletion = 1, swapping 'e' for 'b' costs at most 2
    assert edit_distance(w("ed"), w("bd"), CostModel()) == 2


def test_lhs_distance():
    A, B = N.symbols
    assert lhs_distance((w("ed"), A), (w("ed"), A), CM) == 0
    assert lhs_distance((w("ed"), A), (w("ed"), B), CM) == 1
    assert lhs_distance((w("ed"), A), (w("bd"), A), CM) == 3


def test_validation():
    with pytest.raises(ValueError):
        CostModel("absdiff", 1, 2)
    with pytest.raises(ValueError):
        CostModel("cubic")
    with pytest.raises(ValueError, match="exceeds"):
        CostModel().check_alphabet(T)
    CM.check_alphabet(T)


def test_costmodel_line_roundtrip():
    for cm in (CM, CostModel("unit", 0.5, 0.5)):
        assert parse_costmodel_line(cm.spec_line()) == cm


@pytest.mark.parametrize("cm", [CostModel("unit"), CostModel("absdiff", 2, 2), CostModel("absdiff")])
def test_agrees_with_recursive_oracle(cm):
    T3 = build_uniform_alphabet(0, 3, 3, name="s")
    words = [()]
    for n in range(1, 5):
        words += list(itertools.product(T3.symbols, repeat=n))
    rng = random.Random(0)
    for x in rng.sample(words, 60):
        for y in words:
            assert edit_distance(x, y, cm) == naive_edit(x, y, cm.sub, cm.insertion, cm.deletion)


words = st.lists(st.integers(0, 4), max_size=8).map(lambda xs: tuple(T.symbol(i) for i in xs))


@given(words, words, words)
def test_axioms(x, y, z):
    dxy = edit_distance(x, y, CM)
    assert (dxy == 0) == (x == y)
    assert dxy == edit_distance(y, x, CM)
    assert edit_distance(x, z, CM) <= dxy + edit_distance(y, z, CM) + 1e-9
