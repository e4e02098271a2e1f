"""Minimum-cost edit distance between words of quantized symbols."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .alphabet import Alphabet, Symbol


def absdiff(i: int, j: int) -> float:
    return float(abs(i - j))


def unit(i: int, j: int) -> float:
    return 0.0 if i == j else 1.0


SUBSTITUTIONS: dict[str, Callable[[int, int], float]] = {"absdiff": absdiff, "unit": unit}


@dataclass(frozen=True)
class CostModel:
    """Costs of single edit operations.

    Substitution is a function of the two symbols' bin indices; insertion
    and deletion are constants. Symbols of different alphabets are never
    substituted for one another.
    """

    substitution: str = "absdiff"
    insertion: float = 1.0
    deletion: float = 1.0

    def __post_init__(self):
        if self.substitution not in SUBSTITUTIONS:
            raise ValueError(f"unknown substitution cost {self.substitution!r}")
        if self.insertion < 0 or self.deletion < 0:
            raise ValueError("edit costs must be non-negative")
        if self.insertion != self.deletion:
            raise ValueError("insertion and deletion costs must be equal for a symmetric distance")

    @classmethod
    def for_alphabet(cls, a: Alphabet, substitution: str = "absdiff") -> CostModel:
        """Default model: ``|i-j|`` substitutions, length edits cost the alphabet size."""
        return cls(substitution, float(a.n), float(a.n))

    def check_alphabet(self, a: Alphabet) -> None:
        """Reject models where some substitution costs more than delete + insert."""
        fn = SUBSTITUTIONS[self.substitution]
        worst = max(fn(i, j) for i in range(a.n) for j in range(a.n))
        if worst > self.insertion + self.deletion:
            raise ValueError(
                f"substitution cost up to {worst:g} exceeds insertion+deletion "
                f"{self.insertion + self.deletion:g} on alphabet {a.name!r}"
            )

    def sub(self, x: Symbol, y: Symbol) -> float:
        if x.alphabet != y.alphabet:
            return float("inf")
        return SUBSTITUTIONS[self.substitution](x.index, y.index)

    def spec_line(self) -> str:
        return f"costmodel sub={self.substitution} ins={self.insertion!r} del={self.deletion!r}"


def parse_costmodel_line(line: str) -> CostModel:
    """Parse ``costmodel sub=absdiff|unit ins=<f> del=<f>``."""
    parts = line.split()
    if not parts or parts[0] != "costmodel":
        raise ValueError(f"not a costmodel line: {line!r}")
    opts = dict(tok.partition("=")[::2] for tok in parts[1:])
    unknown = opts.keys() - {"sub", "ins", "del"}
    if unknown:
        raise ValueError(f"unknown costmodel options: {', '.join(sorted(unknown))}")
    return CostModel(opts.get("sub", "absdiff"), float(opts.get("ins", 1.0)), float(opts.get("del", 1.0)))


def edit_distance(x: Sequence[Symbol], y: Sequence[Symbol], cm: CostModel = CostModel()) -> float:
    """Cheapest sequence of substitutions, insertions and deletions turning x into y."""
    ins, dele = cm.insertion, cm.deletion
    sub = cm.sub
    prev = [j * ins for j in range(len(y) + 1)]
    for i, xi in enumerate(x, 1):
        cur = [i * dele]
        for j, yj in enumerate(y, 1):
            cur.append(min(prev[j] + dele, cur[j - 1] + ins, prev[j - 1] + sub(xi, yj)))
        prev = cur
    return float(prev[-1])


def lhs_distance(target: tuple[Sequence[Symbol], Symbol], candidate: tuple[Sequence[Symbol], Symbol],
                 cm: CostModel = CostModel()) -> float:
    """Distance between two production left-hand sides ``(context, control)``.

    The context words are compared by edit distance and the controls by
    substitution cost alone.
    """
    (cx, ux), (cy, uy) = target, candidate
    return edit_distance(cx, cy, cm) + cm.sub(ux, uy)
