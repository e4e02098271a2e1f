"""Uniform quantization of signal ranges into ordered symbol alphabets."""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

TERMINAL = "T"
NONTERMINAL = "N"


class AlphabetError(ValueError):
    """Invalid alphabet construction or foreign symbol."""


@dataclass(frozen=True, order=True)
class Symbol:
    """One symbol of a named alphabet.

    Equality uses the alphabet name and the bin index, so symbols of
    different alphabets never compare equal even when their labels match.
    """

    alphabet: str
    index: int
    label: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.label


class Quantized(NamedTuple):
    symbol: Symbol
    out_of_range: bool


def default_labels(n: int, kind: str) -> list[str]:
    if kind not in (TERMINAL, NONTERMINAL):
        raise AlphabetError(f"unknown alphabet kind {kind!r}")
    letters = string.ascii_lowercase if kind == TERMINAL else string.ascii_uppercase
    if n <= len(letters):
        return list(letters[:n])
    prefix = "t" if kind == TERMINAL else "N"
    return [f"{prefix}{i}" for i in range(n)]


@dataclass(frozen=True)
class Alphabet:
    """Equal-width partition of ``[lo, hi]`` into ``n`` labelled bins.

    The upper edge ``hi`` belongs to the last bin. Values outside the range
    are clamped to the nearest end bin and reported as out of range.
    """

    name: str
    kind: str
    lo: float
    hi: float
    n: int
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.lo < self.hi:
            raise AlphabetError(f"invalid-range: lo={self.lo} must be below hi={self.hi}")
        if self.n < 1:
            raise AlphabetError("zero-bins: an alphabet needs at least one symbol")
        if self.kind not in (TERMINAL, NONTERMINAL):
            raise AlphabetError(f"unknown alphabet kind {self.kind!r}")
        if len(self.labels) != self.n:
            raise AlphabetError(f"expected {self.n} labels, got {len(self.labels)}")
        if len(set(self.labels)) != self.n:
            raise AlphabetError("labels must be unique")
        if any(not lab or any(c.isspace() or c in ",|-=#" for c in lab) for lab in self.labels):
            raise AlphabetError("labels must be non-empty and free of whitespace and ',|-=#'")
        object.__setattr__(self, "_by_label", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.n

    @property
    def symbols(self) -> list[Symbol]:
        return [self.symbol(i) for i in range(self.n)]

    @property
    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.n) + 0.5) * self.width

    def symbol(self, index: int) -> Symbol:
        if not 0 <= index < self.n:
            raise AlphabetError(f"index {index} outside alphabet {self.name!r} of size {self.n}")
        return Symbol(self.name, index, self.labels[index])

    def by_label(self, label: str) -> Symbol:
        try:
            return self.symbol(self._by_label[label])
        except KeyError:
            raise AlphabetError(f"unknown label {label!r} in alphabet {self.name!r}") from None

    def __contains__(self, sym: object) -> bool:
        return isinstance(sym, Symbol) and sym.alphabet == self.name and 0 <= sym.index < self.n

    def check(self, sym: Symbol) -> Symbol:
        if sym not in self:
            raise AlphabetError(f"foreign-symbol: {sym!r} does not belong to alphabet {self.name!r}")
        return sym

    def quantize(self, v: float) -> Quantized:
        return quantize(self, v)

    def dequantize(self, sym: Symbol) -> float:
        return dequantize(self, sym)

    def indices(self, values) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised quantization: bin indices and an out-of-range mask."""
        v = np.asarray(values, dtype=float)
        out = (v < self.lo) | (v > self.hi)
        idx = np.floor((v - self.lo) / self.width).astype(int)
        return np.clip(idx, 0, self.n - 1), out

    def tokenize(self, word: str) -> list[Symbol]:
        """Split concatenated labels back into symbols (longest label first)."""
        ordered = sorted(self.labels, key=len, reverse=True)

        def split(pos: int) -> list[str] | None:
            if pos == len(word):
                return []
            for lab in ordered:
                if word.startswith(lab, pos):
                    rest = split(pos + len(lab))
                    if rest is not None:
                        return [lab, *rest]
            return None

        parts = split(0)
        if parts is None:
            raise AlphabetError(f"cannot split {word!r} into labels of alphabet {self.name!r}")
        return [self.by_label(p) for p in parts]

    def spec_line(self) -> str:
        """Header line understood by :func:`parse_alphabet_line`."""
        auto = tuple(default_labels(self.n, self.kind)) == self.labels
        labels = "auto" if auto else ",".join(self.labels)
        return f"alphabet {self.name} kind={self.kind} lo={self.lo!r} hi={self.hi!r} n={self.n} labels={labels}"


def build_uniform_alphabet(
    lo: float,
    hi: float,
    n: int,
    kind: str = TERMINAL,
    labels: str | Sequence[str] = "auto",
    name: str | None = None,
) -> Alphabet:
    """Split ``[lo, hi]`` into ``n`` equal bins.

    ``labels="exact"`` treats ``lo`` and ``hi`` as the first and last of
    ``n`` evenly spaced discrete values and widens the range by half a step
    on each side, so every bin center coincides with one discrete value
    (e.g. ``lo=1, hi=4, n=4`` gives centers 1, 2, 3, 4).
    """
    if n < 1:
        raise AlphabetError("zero-bins: an alphabet needs at least one symbol")
    lo, hi = float(lo), float(hi)
    if isinstance(labels, str):
        if labels == "exact":
            if n == 1:
                if lo != hi:
                    raise AlphabetError("invalid-range: a single exact value needs lo == hi")
                lo, hi = lo - 0.5, hi + 0.5
            else:
                if not lo < hi:
                    raise AlphabetError(f"invalid-range: lo={lo} must be below hi={hi}")
                half = (hi - lo) / (n - 1) / 2
                lo, hi = lo - half, hi + half
            labels = "auto"
        if labels != "auto":
            raise AlphabetError(f"unknown label scheme {labels!r}")
        labs = default_labels(n, kind)
    else:
        labs = list(labels)
    return Alphabet(name or ("y" if kind == TERMINAL else "U"), kind, lo, hi, n, tuple(labs))


def quantize(a: Alphabet, v: float) -> Quantized:
    v = float(v)
    out = not (a.lo <= v <= a.hi)
    if v >= a.hi:
        idx = a.n - 1
    elif v <= a.lo:
        idx = 0
    else:
        idx = min(int((v - a.lo) // a.width), a.n - 1)
    return Quantized(a.symbol(idx), out)


def dequantize(a: Alphabet, s: Symbol) -> float:
    a.check(s)
    return a.lo + (s.index + 0.5) * a.width


def parse_alphabet_line(line: str) -> Alphabet:
    """Parse ``alphabet <name> kind=<T|N> lo=<f> hi=<f> n=<int> [labels=auto|exact|l1,l2,...]``."""
    parts = line.split()
    if len(parts) < 2 or parts[0] != "alphabet":
        raise AlphabetError(f"not an alphabet line: {line!r}")
    name = parts[1]
    opts = {}
    for tok in parts[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise AlphabetError(f"expected key=value, got {tok!r}")
        opts[key] = val
    missing = {"kind", "lo", "hi", "n"} - opts.keys()
    if missing:
        raise AlphabetError(f"alphabet {name!r} missing {', '.join(sorted(missing))}")
    labels = opts.get("labels", "auto")
    if labels not in ("auto", "exact"):
        labels = labels.split(",")
    try:
        lo, hi, n = float(opts["lo"]), float(opts["hi"]), int(opts["n"])
    except ValueError as exc:
        raise AlphabetError(f"alphabet {name!r}: {exc}") from None
    return build_uniform_alphabet(lo, hi, n, opts["kind"], labels, name)
