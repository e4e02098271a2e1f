"""Slow, obviously-correct reference implementations used only by tests."""

from functools import lru_cache


def naive_edit(x, y, sub, ins, dele):
    """Plain recursion over the last symbols, memoized only for speed."""
    x, y = tuple(x), tuple(y)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j * ins
        if j == 0:
            return i * dele
        return min(d(i - 1, j) + dele, d(i, j - 1) + ins, d(i - 1, j - 1) + sub(x[i - 1], y[j - 1]))

    return d(len(x), len(y))


def brute_lookup(productions, history, control):
    """Scan every production; keep the longest context that ends ``history``."""
    best = None
    for p in productions:
        n = len(p.context)
        if p.control != control or n > len(history):
            continue
        if tuple(history[len(history) - n:]) == tuple(p.context) if n else True:
            if best is None or n > len(best.context):
                best = p
    return best


def pw_transitions(gain):
    """(y_km1, y_k, u) -> y_next for the piecewise plant, written out directly."""
    table = {}
    for a in (1, 2, 3, 4):
        for b in (1, 2, 3, 4):
            for u in (-1, 0, 1):
                nxt = b - a + gain * u
                if 1 <= nxt <= 4:
                    table[(a, b, u)] = nxt
    return table
