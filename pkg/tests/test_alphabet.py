import numpy as np
import pytest
from hypothesis import given, strategies as st

from ctlgram.alphabet import (
    AlphabetError, build_uniform_alphabet, dequantize, parse_alphabet_line, quantize,
)


def labels(a, values):
    return [quantize(a, v).symbol.label for v in values]


def test_codification_table_via_bins():
    T = build_uniform_alphabet(1, 5, 4, "T")
    assert labels(T, [1, 2, 3, 4]) == list("abcd")
    N = build_uniform_alphabet(-1.5, 1.5, 3, "N")
    assert labels(N, [-1, 0, 1]) == list("ABC")


def test_exact_mode_centers_on_values():
    T = build_uniform_alphabet(1, 4, 4, "T", "exact")
    assert np.allclose(T.centers, [1, 2, 3, 4])
    assert dequantize(T, T.symbol(3)) == 4.0
    assert labels(T, [1, 2, 3, 4]) == list("abcd")


def test_bins_of_equal_partition():
    a = build_uniform_alphabet(0, 6, 3)
    assert a.width == 2.0
    assert quantize(a, 2.5) == (a.symbol(1), False)
    assert quantize(a, 1.999).symbol.index == 0
    assert quantize(a, 2.0).symbol.index == 1


def test_upper_edge_and_clamping():
    a = build_uniform_alphabet(0, 6, 3)
    assert quantize(a, 6.0) == (a.symbol(2), False)
    assert quantize(a, 7.1) == (a.symbol(2), True)
    assert quantize(a, -0.1) == (a.symbol(0), True)


def test_dequantize_midpoint():
    a = build_uniform_alphabet(0, 6, 3)
    assert dequantize(a, a.symbol(0)) == 1.0


@given(st.floats(0, 6, allow_nan=False))
def test_roundtrip_within_half_bin(v):
    a = build_uniform_alphabet(0, 6, 7)
    assert abs(dequantize(a, quantize(a, v).symbol) - v) <= a.width / 2 + 1e-12


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=30))
def test_vectorised_matches_scalar(vals):
    a = build_uniform_alphabet(-3, 4, 9)
    idx, out = a.indices(vals)
    for i, o, v in zip(idx, out, vals):
        q = quantize(a, v)
        assert (q.symbol.index, q.out_of_range) == (i, o)


def test_errors():
    with pytest.raises(AlphabetError, match="invalid-range"):
        build_uniform_alphabet(2, 2, 3)
    with pytest.raises(AlphabetError, match="zero-bins"):
        build_uniform_alphabet(0, 1, 0)
    a = build_uniform_alphabet(0, 1, 2, name="p")
    b = build_uniform_alphabet(0, 1, 2, name="q")
    with pytest.raises(AlphabetError, match="foreign-symbol"):
        dequantize(a, b.symbol(0))


def test_labels_beyond_letters_and_tokenize():
    a = build_uniform_alphabet(0, 1, 60, name="w")
    assert a.labels[0] == "t0" and a.labels[59] == "t59"
    assert [s.index for s in a.tokenize("t27t5t59t1")] == [27, 5, 59, 1]
    assert [s.label for s in build_uniform_alphabet(0, 1, 26).tokenize("az")] == ["a", "z"]


def test_spec_line_roundtrip():
    for a in (build_uniform_alphabet(-1, 1, 3, "N", "exact"),
              build_uniform_alphabet(0.1, 7.3, 60, "T", name="omega"),
              build_uniform_alphabet(0, 1, 2, "T", ["lo", "hi"], name="z")):
        assert parse_alphabet_line(a.spec_line()) == a
