"""Greedy one-step control toward a word of target output symbols.

At every step each control symbol is scored by how far its predicted output
lies from the current target (in bin-index units) and the closest one is
applied to the real plant. The observed output, not the prediction, extends
the history, so a disturbance is absorbed by simply planning again.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .alphabet import Symbol
from .grammar import Grammar
from .plants import InadmissibleControl
from .recognizer import Interpolation, Recognizer

COMPLETED = "completed"
STALLED = "stalled"

VIABLE_FIRST = "viable-first"
LOWEST_INDEX = "lowest-control-index"
TIE_BREAKS = (VIABLE_FIRST, LOWEST_INDEX)


class NoApplicableProduction(LookupError):
    pass


class Plant(Protocol):
    @property
    def history(self) -> Sequence[Symbol]: ...

    def step(self, u: Symbol) -> Symbol: ...


@dataclass(frozen=True)
class ControlPlan:
    targets: tuple[Symbol, ...]
    max_steps_per_target: int = 20
    tie_break: str = VIABLE_FIRST
    interpolation: Interpolation | None = None

    def __post_init__(self):
        if not self.targets:
            raise ValueError("target word must not be empty")
        if self.max_steps_per_target < 1:
            raise ValueError("max_steps_per_target must be at least 1")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"unknown tie-break {self.tie_break!r}")


@dataclass(frozen=True)
class ControlStep:
    step: int
    target: Symbol
    control: Symbol | None
    predicted: Symbol | None
    output: Symbol | None
    reached: bool


@dataclass
class ControlTrace:
    steps: list[ControlStep] = field(default_factory=list)
    outcome: str = COMPLETED
    reached: list[int] = field(default_factory=list)  # step at which each target was reached

    def to_csv(self, path_or_buf=None, comments: Sequence[str] = ()) -> str:
        """``step,target,control,output,reached``."""
        out = io.StringIO()
        for c in comments:
            out.write(f"# {c}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["step", "target", "control", "output", "reached"])
        for s in self.steps:
            w.writerow([s.step, s.target.label, "" if s.control is None else s.control.label,
                        "" if s.output is None else s.output.label, int(s.reached)])
        out.write(f"# outcome {self.outcome}\n")
        text = out.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
        return text


def candidates(rec: Recognizer, history: Sequence[Symbol], target: Symbol,
               exclude: frozenset[Symbol] = frozenset(),
               tie_break: str = VIABLE_FIRST) -> list[tuple[float, int, int, int, Symbol, Symbol]]:
    """Score every control with an applicable production, best first.

    The distance to the target decides. Among equally close controls the
    one whose predicted next history is a context the grammar knows at full
    order comes first (the plant has states it cannot leave, and the
    grammar never saw them as contexts), then the prediction backed by the
    longer context, then the lowest control index. ``tie_break=LOWEST_INDEX``
    goes straight to the control index.
    """
    g = rec.g
    depth = g.p_max
    known = {p.context for p in g.productions(depth)}
    out = []
    for u in g.nonterminals.symbols:
        if u in exclude:
            continue
        pred = rec.predict(history, u)
        if pred.output is None:
            continue
        dist = abs(pred.output.index - target.index)
        if tie_break == LOWEST_INDEX:
            out.append((dist, 0, 0, u.index, u, pred.output))
            continue
        nxt = (tuple(history) + (pred.output,))[-depth:] if depth else ()
        out.append((dist, int(depth > 0 and nxt not in known), -pred.production.order, u.index, u, pred.output))
    out.sort(key=lambda c: c[:4])
    return out


def plan_step(g: Grammar, history: Sequence[Symbol], target: Symbol,
              interpolation: Interpolation | None = None,
              exclude: frozenset[Symbol] = frozenset(), rec: Recognizer | None = None,
              tie_break: str = VIABLE_FIRST) -> tuple[Symbol, Symbol]:
    """The control whose predicted output is closest to ``target``, with that prediction."""
    g.terminals.check(target)
    for y in history:
        g.terminals.check(y)
    rec = rec or Recognizer(g, interpolation)
    best = candidates(rec, history, target, exclude, tie_break)
    if not best:
        raise NoApplicableProduction(f"no control has an applicable production after {''.join(s.label for s in history)!r}")
    *_, u, y = best[0]
    return u, y


def track_targets(g: Grammar, plant: Plant, plan: ControlPlan,
                  seed_history: Sequence[Symbol] | None = None) -> ControlTrace:
    """Drive ``plant`` through ``plan.targets`` one symbol at a time.

    A target already equal to the current output counts as reached without a
    step. A control the plant refuses (outside its working domain) is struck
    off and planning repeats from the same state. Running out of steps or of
    applicable controls ends the run as stalled.
    """
    rec = Recognizer(g, plan.interpolation)
    depth = g.p_max
    hist = list(plant.history if seed_history is None else seed_history)
    trace = ControlTrace()
    k = 0
    for target in plan.targets:
        if hist and hist[-1] == target:
            trace.reached.append(k)
            continue
        for _ in range(plan.max_steps_per_target):
            refused: set[Symbol] = set()
            while True:
                try:
                    u, pred = plan_step(g, hist[-depth:] if depth else [], target,
                                        exclude=frozenset(refused), rec=rec, tie_break=plan.tie_break)
                except NoApplicableProduction:
                    trace.steps.append(ControlStep(k, target, None, None, None, False))
                    trace.outcome = STALLED
                    return trace
                try:
                    y = plant.step(u)
                    break
                except InadmissibleControl:
                    refused.add(u)
            hist.append(y)
            del hist[:-max(depth, 1)]
            hit = y == target
            trace.steps.append(ControlStep(k, target, u, pred, y, hit))
            k += 1
            if hit:
                trace.reached.append(k)
                break
        else:
            trace.outcome = STALLED
            return trace
    return trace
