"""Output prediction from a learned grammar, with grammatical interpolation.

When no production applies, the output is synthesized from the nearest
stored productions of the same order: their output values are averaged with
weights ``1/d`` where ``d`` is the left-hand-side edit distance to the
query, and the average is quantized back to a terminal symbol.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .alphabet import Symbol
from .grammar import INTERPOLATED, Grammar, Production
from .metric import CostModel, lhs_distance
from .traces import SymbolTrace

MATCHED = "matched"
INTERP = "interpolated"
NONE = "none"

TEACHER = "teacher"
FREE = "free"


@dataclass(frozen=True)
class Interpolation:
    """Settings for filling missing productions.

    ``max_distance`` defaults to 2 substitution units per left-hand-side
    symbol, i.e. ``2 * (order + 1)``. ``weighting="literal"`` multiplies the
    unnormalized sum by the total distance instead of dividing by the total
    weight; it exists only for comparison.
    """

    k: int = 4
    max_distance: float | None = None
    order: int | None = None
    cost: CostModel | None = None
    weighting: str = "normalized"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.weighting not in ("normalized", "literal"):
            raise ValueError(f"unknown weighting {self.weighting!r}")

    def radius(self, order: int) -> float:
        return 2.0 * (order + 1) if self.max_distance is None else self.max_distance


@dataclass(frozen=True)
class Prediction:
    step: int
    control: Symbol
    output: Symbol | None
    source: str
    production: Production | None = None


class Recognizer:
    """Prediction over a fixed grammar with a private interpolation cache."""

    def __init__(self, g: Grammar, interp: Interpolation | None = None):
        self.g = g
        self.interp = interp
        self.cost = None
        if interp is not None:
            self.cost = interp.cost or CostModel.for_alphabet(g.terminals)
        self._by_order = [g.productions(p) for p in range(g.p_max + 1)]
        self._cache: dict[tuple, Production | None] = {}

    def predict(self, history: Sequence[Symbol], u: Symbol, step: int = 0) -> Prediction:
        prod = self.g.lookup(history, u)
        if prod is not None:
            return Prediction(step, u, prod.output, MATCHED, prod)
        if self.interp is None:
            return Prediction(step, u, None, NONE)
        prod = self.interpolate(history, u)
        if prod is None:
            return Prediction(step, u, None, NONE)
        return Prediction(step, u, prod.output, INTERP, prod)

    def interpolate(self, history: Sequence[Symbol], u: Symbol) -> Production | None:
        top = min(self.g.p_max, len(history))
        orders = [self.interp.order] if self.interp.order is not None else range(top, -1, -1)
        key = (tuple(history[len(history) - top:]) if top else (), u)
        if key in self._cache:
            return self._cache[key]
        found = None
        for p in orders:
            if p > len(history) or p > self.g.p_max:
                continue
            ctx = tuple(history[len(history) - p:]) if p else ()
            found = self._interpolate_at(ctx, u)
            if found is not None:
                break
        self._cache[key] = found
        return found

    def _interpolate_at(self, ctx: tuple[Symbol, ...], u: Symbol) -> Production | None:
        radius = self.interp.radius(len(ctx))
        cands = []
        for prod in self._by_order[len(ctx)]:
            d = lhs_distance((ctx, u), (prod.context, prod.control), self.cost)
            if 0 < d <= radius:
                cands.append((d, prod))
        if not cands:
            return None
        cands.sort(key=lambda c: (c[0], [s.index for s in c[1].context], c[1].control.index))
        cands = cands[: self.interp.k]
        T = self.g.terminals
        values = [T.dequantize(p.output) for _, p in cands]
        if self.interp.weighting == "normalized":
            w = [1.0 / d for d, _ in cands]
            est = sum(wi * v for wi, v in zip(w, values)) / sum(w)
        else:
            est = sum(d for d, _ in cands) * sum(v / d for (d, _), v in zip(cands, values))
        return Production(ctx, u, T.quantize(est).symbol, count=0, provenance=INTERPOLATED)


def predict_next(g: Grammar, history: Sequence[Symbol], u: Symbol,
                 interp: Interpolation | None = None) -> Prediction:
    return Recognizer(g, interp).predict(history, u)


def recognize_trace(g: Grammar, controls: Sequence[Symbol], seed_history: Sequence[Symbol] = (),
                    interp: Interpolation | None = None, mode: str = TEACHER,
                    true_outputs: Sequence[Symbol] | None = None,
                    resets: dict[int, Sequence[Symbol]] | None = None) -> list[Prediction]:
    """Predict the output word for a control word.

    In ``teacher`` mode each prediction conditions on the true past outputs
    (``true_outputs`` is required); in ``free`` mode on the grammar's own
    predictions, and a step without a prediction clears the running history.
    """
    if mode not in (TEACHER, FREE):
        raise ValueError(f"mode must be {TEACHER!r} or {FREE!r}")
    if mode == TEACHER and (true_outputs is None or len(true_outputs) != len(controls)):
        raise ValueError("teacher-forced recognition needs the true outputs")
    rec = Recognizer(g, interp)
    depth = g.p_max
    hist = list(seed_history)[-depth:] if depth else []
    resets = resets or {}
    out = []
    for k, u in enumerate(controls):
        if k in resets:
            hist = list(resets[k])[-depth:] if depth else []
        pred = rec.predict(hist, u, k)
        out.append(pred)
        if mode == TEACHER:
            nxt = true_outputs[k]
        elif pred.output is None:
            hist = []
            continue
        else:
            nxt = pred.output
        if depth:
            hist.append(nxt)
            del hist[:-depth]
    return out


def recognize(g: Grammar, trace: SymbolTrace, interp: Interpolation | None = None,
              mode: str = TEACHER) -> list[Prediction]:
    """:func:`recognize_trace` over a quantized trace, honouring its resets."""
    return recognize_trace(g, trace.controls, trace.history, interp, mode,
                           trace.outputs if mode == TEACHER else None, trace.resets)


def predictions_csv(preds: Sequence[Prediction], true_outputs: Sequence[Symbol] | None = None,
                    path_or_buf=None) -> str:
    """``step,control,true_output,predicted_output,source``."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["step", "control", "true_output", "predicted_output", "source"])
    for i, p in enumerate(preds):
        true = true_outputs[i].label if true_outputs is not None else ""
        w.writerow([p.step, p.control.label, true, "" if p.output is None else p.output.label, p.source])
    text = out.getvalue()
    if path_or_buf is not None:
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return text
