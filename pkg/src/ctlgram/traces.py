"""Time-aligned (control, output) traces, raw and quantized, with CSV I/O.

Row ``k`` of a trace pairs the control applied at step ``k`` with the output
it produced. Outputs observed before the first control (the initial state)
are kept as ``history``. A plant that is re-initialized mid-run records the
new initial outputs in ``resets[k]``; they replace the observed past before
step ``k``. In CSV both appear as rows with an empty control cell placed
before the step they precede.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .alphabet import Alphabet, AlphabetError, Symbol, parse_alphabet_line


class TraceError(ValueError):
    pass


@dataclass
class RawTrace:
    t: np.ndarray
    u: np.ndarray
    y: np.ndarray
    history: np.ndarray = field(default_factory=lambda: np.zeros(0))
    extra: dict[str, np.ndarray] = field(default_factory=dict)
    resets: dict[int, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.u)

    def quantize(self, terminals: Alphabet, nonterminals: Alphabet) -> SymbolTrace:
        def syms(a: Alphabet, values) -> tuple[Symbol, ...]:
            idx, _ = a.indices(values)
            return tuple(a.symbol(int(i)) for i in np.atleast_1d(idx))

        return SymbolTrace(
            terminals,
            nonterminals,
            syms(nonterminals, self.u) if len(self.u) else (),
            syms(terminals, self.y) if len(self.y) else (),
            syms(terminals, self.history) if len(self.history) else (),
            {k: syms(terminals, v) for k, v in self.resets.items()},
        )

    def slice(self, start: int, stop: int | None = None, keep: int = 8) -> RawTrace:
        """Steps ``[start, stop)`` with up to ``keep`` preceding outputs as history."""
        stop = len(self) if stop is None else min(stop, len(self))
        prev = list(self.history)
        for k in range(start):
            if k in self.resets:
                prev = list(self.resets[k])
            prev.append(self.y[k])
        if start in self.resets:
            prev = list(self.resets[start])
        return RawTrace(
            self.t[start:stop],
            self.u[start:stop],
            self.y[start:stop],
            np.array(prev[max(0, len(prev) - keep):], dtype=float),
            {k: v[start:stop] for k, v in self.extra.items()},
            {k - start: v for k, v in self.resets.items() if start < k < stop},
        )


@dataclass(frozen=True)
class SymbolTrace:
    terminals: Alphabet
    nonterminals: Alphabet
    controls: tuple[Symbol, ...]
    outputs: tuple[Symbol, ...]
    history: tuple[Symbol, ...] = ()
    resets: dict[int, tuple[Symbol, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.controls) != len(self.outputs):
            raise TraceError("controls and outputs must have equal length")
        for s in self.controls:
            self.nonterminals.check(s)
        for s in (*self.outputs, *self.history):
            self.terminals.check(s)
        for k, hist in self.resets.items():
            if not 0 < k < len(self.controls):
                raise TraceError(f"reset at step {k} outside the trace")
            for s in hist:
                self.terminals.check(s)

    def __len__(self) -> int:
        return len(self.controls)

    def __iter__(self) -> Iterator[tuple[Symbol, Symbol]]:
        return zip(self.controls, self.outputs)

    def contexts(self, depth: int) -> Iterator[tuple[Symbol, ...]]:
        """Observed outputs (at most ``depth``, oldest first) preceding each step."""
        hist: deque[Symbol] = deque(self.history, maxlen=depth)
        for k, y in enumerate(self.outputs):
            if k in self.resets:
                hist = deque(self.resets[k], maxlen=depth)
            yield tuple(hist)
            hist.append(y)

    def slice(self, start: int, stop: int | None = None, keep: int = 8) -> SymbolTrace:
        """Steps ``[start, stop)`` with up to ``keep`` preceding outputs as history."""
        stop = len(self) if stop is None else min(stop, len(self))
        before = ()
        for k, ctx in enumerate(self.contexts(keep)):
            if k == start:
                before = ctx
                break
        else:
            before = self._tail(keep)
        return SymbolTrace(
            self.terminals,
            self.nonterminals,
            self.controls[start:stop],
            self.outputs[start:stop],
            before,
            {k - start: v for k, v in self.resets.items() if start < k < stop},
        )

    def _tail(self, keep: int) -> tuple[Symbol, ...]:
        hist: deque[Symbol] = deque(self.history, maxlen=keep)
        for k, y in enumerate(self.outputs):
            if k in self.resets:
                hist = deque(self.resets[k], maxlen=keep)
            hist.append(y)
        return tuple(hist)


def symbol_trace(terminals: Alphabet, nonterminals: Alphabet, controls: str | Sequence[str],
                 outputs: str | Sequence[str], history: str | Sequence[str] = ()) -> SymbolTrace:
    """Build a trace from label strings, e.g. ``symbol_trace(T, N, "ABAABA", "edcbde")``."""

    def conv(a: Alphabet, labels):
        if isinstance(labels, str):
            return tuple(a.tokenize(labels)) if labels else ()
        return tuple(a.by_label(x) for x in labels)

    return SymbolTrace(terminals, nonterminals, conv(nonterminals, controls), conv(terminals, outputs),
                       conv(terminals, history))


# CSV

def write_raw_csv(tr: RawTrace, path_or_buf=None, comments: Sequence[str] = ()) -> str:
    """``t,u,y[,extra...]``; history rows carry an empty ``u``."""
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "u", "y", *tr.extra])
    pad = [""] * len(tr.extra)
    t0 = float(tr.t[0]) if len(tr.t) else 0.0
    for yh in tr.history:
        w.writerow([repr(t0), "", repr(float(yh)), *pad])
    for k in range(len(tr)):
        for yh in tr.resets.get(k, ()):
            w.writerow([repr(float(tr.t[k])), "", repr(float(yh)), *pad])
        w.writerow([repr(float(tr.t[k])), repr(float(tr.u[k])), repr(float(tr.y[k]))]
                   + [repr(float(v[k])) for v in tr.extra.values()])
    return _emit(out.getvalue(), path_or_buf)


def read_raw_csv(path_or_text) -> RawTrace:
    rows, _ = _read_rows(path_or_text)
    if not rows or rows[0][1][:3] != ["t", "u", "y"]:
        raise TraceError("raw trace must start with columns t,u,y")
    cols = rows[0][1]
    hist, resets, pending = [], {}, []
    t, u, y = [], [], []
    extra = {c: [] for c in cols[3:]}
    for lineno, row in rows[1:]:
        try:
            if row[1] == "":
                pending.append(float(row[2]))
                continue
            if pending:
                if t:
                    resets[len(t)] = np.array(pending)
                else:
                    hist = pending
                pending = []
            t.append(float(row[0]))
            u.append(float(row[1]))
            y.append(float(row[2]))
            for c, v in zip(cols[3:], row[3:]):
                extra[c].append(float(v))
        except (ValueError, IndexError) as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
    return RawTrace(np.array(t), np.array(u), np.array(y), np.array(hist, dtype=float),
                    {k: np.array(v) for k, v in extra.items()}, resets)


def write_symbol_csv(tr: SymbolTrace, path_or_buf=None, comments: Sequence[str] = ()) -> str:
    """``t,U,Y`` with ``# alphabet`` header comments so the file is self-describing."""
    out = io.StringIO()
    for c in (*comments, tr.terminals.spec_line(), tr.nonterminals.spec_line()):
        out.write(f"# {c}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "U", "Y"])
    for s in tr.history:
        w.writerow([0, "", s.label])
    for k, (u, y) in enumerate(tr):
        for s in tr.resets.get(k, ()):
            w.writerow([k, "", s.label])
        w.writerow([k, u.label, y.label])
    return _emit(out.getvalue(), path_or_buf)


def read_symbol_csv(path_or_text, terminals: Alphabet | None = None,
                    nonterminals: Alphabet | None = None) -> SymbolTrace:
    """Read a quantized trace; alphabets come from arguments or ``# alphabet`` headers."""
    rows, comments = _read_rows(path_or_text)
    for lineno, c in comments:
        if c.startswith("alphabet "):
            try:
                a = parse_alphabet_line(c)
            except AlphabetError as exc:
                raise TraceError(f"line {lineno}: {exc}") from None
            if a.kind == "T" and terminals is None:
                terminals = a
            elif a.kind == "N" and nonterminals is None:
                nonterminals = a
    if terminals is None or nonterminals is None:
        raise TraceError("quantized trace needs both alphabets (header comments or arguments)")
    if not rows or rows[0][1][:3] != ["t", "U", "Y"]:
        raise TraceError("quantized trace must start with columns t,U,Y")
    hist, resets, pending, us, ys = (), {}, [], [], []
    for lineno, row in rows[1:]:
        try:
            if row[1] == "":
                pending.append(terminals.by_label(row[2]))
                continue
            if pending:
                if us:
                    resets[len(us)] = tuple(pending)
                else:
                    hist = tuple(pending)
                pending = []
            us.append(nonterminals.by_label(row[1]))
            ys.append(terminals.by_label(row[2]))
        except (AlphabetError, IndexError) as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
    return SymbolTrace(terminals, nonterminals, tuple(us), tuple(ys), hist, resets)


def _read_rows(path_or_text):
    text = _slurp(path_or_text)
    rows, comments = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append((lineno, line[1:].strip()))
            continue
        rows.append((lineno, next(csv.reader([line]))))
    return rows, comments


def _slurp(path_or_text) -> str:
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        return path_or_text
    with open(path_or_text, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, path_or_buf) -> str:
    if path_or_buf is None:
        return text
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
