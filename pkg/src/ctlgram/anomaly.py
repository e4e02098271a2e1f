"""Fault detection by word distance between plant output and grammar output.

Over a sliding window of ``L`` steps the observed output word is compared
with the word of teacher-forced grammar predictions for the same controls.
A distance above the threshold flags an anomaly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .grammar import Grammar
from .metric import CostModel, edit_distance
from .recognizer import TEACHER, Interpolation, recognize
from .traces import SymbolTrace


class TraceTooShort(ValueError):
    pass


@dataclass(frozen=True)
class AnomalyConfig:
    L: int = 10
    threshold: float = 0.0
    cost: CostModel | None = None
    interpolation: Interpolation | None = None
    gap_penalty: float | None = None  # defaults to the insertion cost
    block: bool = False

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("window length L must be at least 1")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")


@dataclass
class AnomalyReport:
    steps: np.ndarray
    distance: np.ndarray
    threshold: float
    flags: list[tuple[int, int]] = field(default_factory=list)
    gaps: list[int] = field(default_factory=list)

    @property
    def flagged(self) -> np.ndarray:
        return self.distance > self.threshold

    def flagged_steps(self) -> set[int]:
        return {int(s) for s in self.steps[self.flagged]}

    def to_csv(self, path_or_buf=None) -> str:
        """``step,distance,flag`` rows followed by a ``# flagged`` summary."""
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["step", "distance", "flag"])
        for s, d, f in zip(self.steps, self.distance, self.flagged):
            w.writerow([int(s), repr(float(d)), int(f)])
        out.write(f"# threshold {self.threshold!r}\n")
        for a, b in self.flags:
            out.write(f"# flagged {a}-{b}\n")
        text = out.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
        return text


def intervals(steps, mask) -> list[tuple[int, int]]:
    """Maximal runs of consecutive flagged entries as (first step, last step)."""
    out = []
    start = prev = None
    for s, m in zip(steps, mask):
        if m and start is None:
            start = s
        elif not m and start is not None:
            out.append((int(start), int(prev)))
            start = None
        prev = s
    if start is not None:
        out.append((int(start), int(prev)))
    return out


def distance_series(g: Grammar, trace: SymbolTrace, cfg: AnomalyConfig) -> tuple[np.ndarray, np.ndarray, list[int]]:
    n = len(trace)
    if n < cfg.L:
        raise TraceTooShort(f"trace of {n} steps is shorter than the window L={cfg.L}")
    cost = cfg.cost or CostModel.for_alphabet(g.terminals)
    gap = cost.insertion if cfg.gap_penalty is None else cfg.gap_penalty
    preds = recognize(g, trace, cfg.interpolation, TEACHER)
    gaps = [p.step for p in preds if p.output is None]
    ends = range(cfg.L - 1, n, cfg.L) if cfg.block else range(cfg.L - 1, n)
    steps, dist = [], []
    for t in ends:
        window = range(t - cfg.L + 1, t + 1)
        have = [k for k in window if preds[k].output is not None]
        grammar_word = [preds[k].output for k in have]
        system_word = [trace.outputs[k] for k in have]
        d = edit_distance(grammar_word, system_word, cost) + gap * (cfg.L - len(have))
        steps.append(t)
        dist.append(d)
    return np.array(steps, dtype=int), np.array(dist, dtype=float), gaps


def detect(g: Grammar, trace: SymbolTrace, cfg: AnomalyConfig = AnomalyConfig()) -> AnomalyReport:
    """Distance series and flagged intervals for ``trace`` against ``g``.

    ``distance[t]`` compares the windows of steps ``t-L+1 .. t``; steps the
    grammar cannot predict each add ``gap_penalty`` instead of taking part
    in the edit distance.
    """
    steps, dist, gaps = distance_series(g, trace, cfg)
    return AnomalyReport(steps, dist, cfg.threshold, intervals(steps, dist > cfg.threshold), gaps)


def calibrate_threshold(g: Grammar, healthy: SymbolTrace, L: int = 10, q: float = 1.0,
                        factor: float = 1.5, cfg: AnomalyConfig | None = None) -> float:
    """``factor`` times the ``q``-quantile of the distance on a healthy trace."""
    if not 0 <= q <= 1:
        raise ValueError("quantile must lie in [0, 1]")
    base = cfg or AnomalyConfig(L=L)
    if base.L != L:
        base = AnomalyConfig(L, base.threshold, base.cost, base.interpolation, base.gap_penalty, base.block)
    _, dist, _ = distance_series(g, healthy, base)
    return float(np.quantile(dist, q)) * factor
