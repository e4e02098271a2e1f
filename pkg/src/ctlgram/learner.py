"""Online grammatical inference from a quantized (control, output) stream.

Each observation either reinforces the longest matching production, creates
a new one at the lowest order that contradicts nothing stored, or resolves a
conflict: the contradicted rules move up one order using the context
recorded at their last occurrence (or are dropped when that context is too
short), and the new observation is stored one order above the conflict.
Conflicts at the maximum order drop the incumbent and keep nothing.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .alphabet import Alphabet, Symbol
from .grammar import Grammar, GrammarError, Key, Production, shadow_conflicts
from .traces import SymbolTrace

CREATED = "created"
REINFORCED = "reinforced"
PROMOTED = "promoted"
DELETED = "deleted"
CAPPED = "capped"


@dataclass(frozen=True)
class LearnEvent:
    step: int
    kind: str
    before: Production | None = None
    after: Production | None = None

    def __str__(self) -> str:
        parts = [f"{self.step}: {self.kind}"]
        if self.before is not None:
            parts.append(str(self.before))
        if self.after is not None:
            parts.append(("=> " if self.before is not None else "") + str(self.after))
        return " ".join(parts)


@dataclass(frozen=True)
class LearnerConfig:
    p_max: int = 2
    window: int | None = None  # defaults to p_max
    min_count: int = 1

    @property
    def window_length(self) -> int:
        return self.p_max if self.window is None else self.window


class LearnerState:
    """Mutable learning state: grammar under construction plus memory window.

    ``window`` holds the last ``W`` (control, output) pairs. Each production
    remembers the window outputs that preceded its most recent occurrence;
    that record is what allows promoting it after a later contradiction.
    """

    def __init__(self, terminals: Alphabet, nonterminals: Alphabet, p_max: int = 2,
                 window: int | None = None):
        if p_max < 0:
            raise ValueError("p_max must be non-negative")
        self.p_max = p_max
        self.W = p_max if window is None else window
        if self.W < 0:
            raise ValueError("window length must be non-negative")
        self.grammar = Grammar(terminals, nonterminals, p_max)
        self.window: deque[tuple[Symbol | None, Symbol]] = deque(maxlen=self.W)
        self.history: deque[Symbol] = deque(maxlen=p_max)
        self.step = 0
        self._past: dict[Key, tuple[Symbol, ...]] = {}

    @property
    def terminals(self) -> Alphabet:
        return self.grammar.terminals

    @property
    def nonterminals(self) -> Alphabet:
        return self.grammar.nonterminals

    def seed(self, outputs: Sequence[Symbol]) -> None:
        """Forget the recent past and start from the given observed outputs."""
        self.window.clear()
        self.history.clear()
        for y in outputs:
            self.terminals.check(y)
            self.window.append((None, y))
            self.history.append(y)

    def observe(self, u: Symbol, y: Symbol) -> list[LearnEvent]:
        return observe(self, u, y)

    # helpers used by observe

    def _conflicts(self, context: tuple[Symbol, ...], control: Symbol, output: Symbol) -> bool:
        return any(p.output != output for p in self.grammar.related(context, control))

    def _store(self, prod: Production, past: tuple[Symbol, ...]) -> None:
        self.grammar.put(prod)
        self._past[prod.key] = past

    def _drop(self, prod: Production) -> None:
        self.grammar.delete(prod.key)
        self._past.pop(prod.key, None)

    def _place(self, lo: int, hist: tuple[Symbol, ...], u: Symbol, y: Symbol,
               past: tuple[Symbol, ...]) -> Production | None:
        for order in range(lo, min(self.p_max, len(hist)) + 1):
            ctx = hist[len(hist) - order:] if order else ()
            if not self._conflicts(ctx, u, y):
                prod = Production(ctx, u, y)
                self._store(prod, past)
                return prod
        return None


def observe(st: LearnerState, u: Symbol, y: Symbol) -> list[LearnEvent]:
    """Feed one (control, output) pair; returns what changed in the grammar."""
    st.nonterminals.check(u)
    st.terminals.check(y)
    g = st.grammar
    hist = tuple(st.history)
    past = tuple(out for _, out in st.window)
    step = st.step
    events: list[LearnEvent] = []

    matches = []
    for p in range(min(st.p_max, len(hist)), -1, -1):
        prod = g.get((hist[len(hist) - p:] if p else (), u))
        if prod is not None:
            matches.append(prod)

    if not matches:
        prod = st._place(0, hist, u, y, past)
        if prod is not None:
            events.append(LearnEvent(step, CREATED, after=prod))
    elif matches[0].output == y:
        res = g.insert(matches[0])
        st._past[res.production.key] = past
        events.append(LearnEvent(step, REINFORCED, after=res.production))
    else:
        q = matches[0].order
        # a stored shorter rule matching here agrees with the longest one,
        # so every match is contradicted by this observation
        losers = [m for m in matches if m.output != y]
        if q >= st.p_max:
            for m in losers:
                st._drop(m)
                events.append(LearnEvent(step, CAPPED, before=m))
            events.append(LearnEvent(step, CAPPED, before=Production(matches[0].context, u, y)))
        else:
            incumbents = [(m, st._past.get(m.key, ())) for m in losers]
            for m in losers:
                st._drop(m)
            new = st._place(q + 1, hist, u, y, past)
            if new is not None:
                events.append(LearnEvent(step, CREATED, after=new))
            for m, mpast in incumbents:
                events.append(_promote(st, m, mpast, step))

    st.window.append((u, y))
    st.history.append(y)
    st.step += 1
    return events


def _promote(st: LearnerState, m: Production, mpast: tuple[Symbol, ...], step: int) -> LearnEvent:
    order = m.order + 1
    if order <= st.p_max and len(mpast) >= order:
        ctx = mpast[len(mpast) - order:]
        existing = st.grammar.get((ctx, m.control))
        if existing is not None and existing.output == m.output:
            return LearnEvent(step, PROMOTED, before=m, after=existing)
        if existing is None and not st._conflicts(ctx, m.control, m.output):
            prod = Production(ctx, m.control, m.output, count=1, provenance=m.provenance)
            st._store(prod, mpast)
            return LearnEvent(step, PROMOTED, before=m, after=prod)
    return LearnEvent(step, DELETED, before=m)


def finalize(st: LearnerState, min_count: int = 1) -> Grammar:
    """Frozen copy keeping productions seen at least ``min_count`` times."""
    if min_count < 1:
        raise ValueError("min_count must be positive")
    g = Grammar(st.terminals, st.nonterminals, st.p_max)
    for prod in st.grammar.productions():
        if prod.count >= min_count:
            g.put(prod)
    bad = shadow_conflicts(g)
    if bad:
        raise GrammarError(f"shadow conflict survived learning: {bad[0][0]} vs {bad[0][1]}")
    return g.freeze()


def learn_trace(trace: SymbolTrace, cfg: LearnerConfig | None = None,
                state: LearnerState | None = None) -> tuple[Grammar, list[LearnEvent]]:
    """Fold :func:`observe` over ``trace`` and filter by ``cfg.min_count``.

    Passing an existing ``state`` continues learning on it (the trace's
    history replaces the state's recent past, as do its resets).
    """
    cfg = cfg or LearnerConfig()
    if state is None:
        state = LearnerState(trace.terminals, trace.nonterminals, cfg.p_max, cfg.window_length)
    state.seed(trace.history)
    log: list[LearnEvent] = []
    for k, (u, y) in enumerate(trace):
        if k in trace.resets:
            state.seed(trace.resets[k])
        log.extend(observe(state, u, y))
    return finalize(state, cfg.min_count), log


def events_csv(events: Sequence[LearnEvent], path_or_buf=None) -> str:
    """``step,kind,order_before,lhs_before,order_after,lhs_after,output``."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["step", "kind", "order_before", "lhs_before", "order_after", "lhs_after", "output"])
    for ev in events:
        b, a = ev.before, ev.after
        output = (a or b).output.label if (a or b) is not None else ""
        w.writerow([
            ev.step, ev.kind,
            "" if b is None else b.order, "" if b is None else b.lhs(),
            "" if a is None else a.order, "" if a is None else a.lhs(),
            output,
        ])
    text = out.getvalue()
    if path_or_buf is not None:
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return text
