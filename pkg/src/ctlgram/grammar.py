"""Context-dependent rewriting systems built from p-type productions.

A production ``y1..yp U -> y(p+1)`` says: after the terminal history
``y1..yp``, applying control ``U`` yields output ``y(p+1)``. Its order is
the context length ``p``. The continuation marker of each rule is left
implicit; derivation continues while controls remain to be consumed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Iterator, NamedTuple, Sequence

from .alphabet import Alphabet, AlphabetError, Symbol, parse_alphabet_line

LEARNED = "L"
INTERPOLATED = "I"

Key = tuple[tuple[Symbol, ...], Symbol]


class GrammarError(ValueError):
    pass


class GrammarParseError(GrammarError):
    def __init__(self, lineno: int, reason: str, detail: str = ""):
        self.lineno = lineno
        self.reason = reason
        self.detail = detail
        msg = f"line {lineno}: {reason}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True)
class Production:
    context: tuple[Symbol, ...]
    control: Symbol
    output: Symbol
    count: int = 1
    provenance: str = LEARNED

    @property
    def order(self) -> int:
        return len(self.context)

    @property
    def key(self) -> Key:
        return (self.context, self.control)

    def lhs(self) -> str:
        return "".join(s.label for s in self.context) + self.control.label

    def __str__(self) -> str:
        return f"{self.lhs()} -> {self.output.label}"


class InsertResult(NamedTuple):
    status: str  # "new" | "reinforced" | "conflict"
    production: Production  # stored rule, or the incumbent on conflict


class Grammar:
    """The system {terminals, non-terminals, start marker, productions}.

    At most one production is stored per (context, control) key. Storage is
    one dict per order so lookups cost O(p_max) regardless of grammar size.
    """

    start_symbol = "S"

    def __init__(self, terminals: Alphabet, nonterminals: Alphabet, p_max: int = 2):
        if p_max < 0:
            raise GrammarError("p_max must be non-negative")
        if terminals.name == nonterminals.name:
            raise GrammarError("terminal and non-terminal alphabets need distinct names")
        self.terminals = terminals
        self.nonterminals = nonterminals
        self.p_max = p_max
        self._by_order: list[dict[Key, Production]] = [{} for _ in range(p_max + 1)]
        self.frozen = False

    # storage primitives

    def _check(self, prod: Production) -> None:
        if prod.order > self.p_max:
            raise GrammarError(f"order-exceeds-max: {prod} has order {prod.order} > {self.p_max}")
        try:
            for s in prod.context:
                self.terminals.check(s)
            self.terminals.check(prod.output)
            self.nonterminals.check(prod.control)
        except AlphabetError as exc:
            raise GrammarError(str(exc)) from None

    def _mutable(self) -> None:
        if self.frozen:
            raise GrammarError("grammar is frozen")

    def insert(self, prod: Production) -> InsertResult:
        self._mutable()
        self._check(prod)
        table = self._by_order[prod.order]
        old = table.get(prod.key)
        if old is None:
            table[prod.key] = prod
            return InsertResult("new", prod)
        if old.output != prod.output:
            return InsertResult("conflict", old)
        new = replace(old, count=old.count + 1)
        table[prod.key] = new
        return InsertResult("reinforced", new)

    def put(self, prod: Production) -> None:
        """Store ``prod`` as given, replacing whatever held its key."""
        self._mutable()
        self._check(prod)
        self._by_order[prod.order][prod.key] = prod

    def get(self, key: Key) -> Production | None:
        context, _ = key
        if len(context) > self.p_max:
            return None
        return self._by_order[len(context)].get(key)

    def delete(self, key: Key) -> Production | None:
        self._mutable()
        context, _ = key
        if len(context) > self.p_max:
            return None
        return self._by_order[len(context)].pop(key, None)

    def lookup(self, history: Sequence[Symbol], control: Symbol) -> Production | None:
        """Longest-context production whose context is a suffix of ``history``."""
        top = min(self.p_max, len(history))
        for p in range(top, -1, -1):
            ctx = tuple(history[len(history) - p:]) if p else ()
            prod = self._by_order[p].get((ctx, control))
            if prod is not None:
                return prod
        return None

    # inspection

    def __len__(self) -> int:
        return sum(len(t) for t in self._by_order)

    def __iter__(self) -> Iterator[Production]:
        return iter(self.productions())

    def __contains__(self, key: object) -> bool:
        return isinstance(key, tuple) and len(key) == 2 and self.get(key) is not None

    def productions(self, order: int | None = None) -> list[Production]:
        """Productions sorted by order, then context indices, then control index."""
        tables = self._by_order if order is None else [self._by_order[order]] if order <= self.p_max else []
        prods = [p for t in tables for p in t.values()]
        prods.sort(key=lambda p: (p.order, [s.index for s in p.context], p.control.index))
        return prods

    def related(self, context: Sequence[Symbol], control: Symbol) -> Iterator[Production]:
        """Stored rules with this control whose context is a suffix of, or ends with, ``context``."""
        context = tuple(context)
        for p in range(len(context) + 1):
            ctx = context[len(context) - p:] if p else ()
            prod = self._by_order[p].get((ctx, control))
            if prod is not None:
                yield prod
        for p in range(len(context) + 1, self.p_max + 1):
            for (ctx, ctl), prod in self._by_order[p].items():
                if ctl == control and ctx[p - len(context):] == context:
                    yield prod

    def counts_by_order(self) -> list[int]:
        return [len(t) for t in self._by_order]

    def copy(self) -> Grammar:
        g = Grammar(self.terminals, self.nonterminals, self.p_max)
        g._by_order = [dict(t) for t in self._by_order]
        return g

    def freeze(self) -> Grammar:
        g = self.copy()
        g.frozen = True
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grammar):
            return NotImplemented
        return (
            self.terminals == other.terminals
            and self.nonterminals == other.nonterminals
            and self.p_max == other.p_max
            and self._by_order == other._by_order
        )

    def __repr__(self) -> str:
        return f"Grammar(p_max={self.p_max}, productions={len(self)}, by_order={self.counts_by_order()})"

    # text format

    def serialize(self) -> str:
        lines = [self.terminals.spec_line(), self.nonterminals.spec_line(), f"pmax {self.p_max}"]
        for prod in self.productions():
            ctx = "".join(s.label for s in prod.context) or "-"
            lines.append(
                f"{ctx} {prod.control.label} -> {prod.output.label} count={prod.count} prov={prod.provenance}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> Grammar:
        return parse(text)


def shadow_conflicts(g: Grammar) -> list[tuple[Production, Production]]:
    """Pairs (shorter, longer) where the shorter context is a suffix of the
    longer one, the control is shared and the outputs differ."""
    bad = []
    for b in g.productions():
        for p in range(b.order):
            a = g.get((b.context[b.order - p:] if p else (), b.control))
            if a is not None and a.output != b.output:
                bad.append((a, b))
    return bad


def serialize(g: Grammar) -> str:
    return g.serialize()


def parse(text: str) -> Grammar:
    """Inverse of :meth:`Grammar.serialize`; ``#`` lines and blanks are skipped."""
    alphabets: dict[str, Alphabet] = {}
    p_max = None
    g = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("alphabet "):
            if g is not None:
                raise GrammarParseError(lineno, "malformed", "alphabet declared after productions")
            try:
                a = parse_alphabet_line(line)
            except AlphabetError as exc:
                raise GrammarParseError(lineno, "bad-alphabet", str(exc)) from None
            alphabets[a.kind] = a
            continue
        if line.startswith("pmax"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise GrammarParseError(lineno, "malformed", line)
            p_max = int(parts[1])
            continue
        if g is None:
            if "T" not in alphabets or "N" not in alphabets:
                raise GrammarParseError(lineno, "missing-alphabet", "both kind=T and kind=N headers are required")
            g = Grammar(alphabets["T"], alphabets["N"], 2 if p_max is None else p_max)
        g.put(_parse_production(g, lineno, line))
    if g is None:
        if "T" not in alphabets or "N" not in alphabets:
            raise GrammarParseError(0, "missing-alphabet", "both kind=T and kind=N headers are required")
        g = Grammar(alphabets["T"], alphabets["N"], 2 if p_max is None else p_max)
    return g


def _parse_production(g: Grammar, lineno: int, line: str) -> Production:
    parts = line.split()
    if len(parts) < 4 or parts[2] != "->":
        raise GrammarParseError(lineno, "malformed", line)
    ctx_txt, ctl_txt, _, out_txt, *opts = parts
    try:
        context = () if ctx_txt == "-" else tuple(g.terminals.tokenize(ctx_txt))
        output = g.terminals.by_label(out_txt)
    except AlphabetError as exc:
        raise GrammarParseError(lineno, "unknown-terminal", str(exc)) from None
    try:
        control = g.nonterminals.by_label(ctl_txt)
    except AlphabetError as exc:
        raise GrammarParseError(lineno, "unknown-nonterminal", str(exc)) from None
    if len(context) > g.p_max:
        raise GrammarParseError(lineno, "order-exceeds-max", line)
    count, prov = 1, LEARNED
    for opt in opts:
        key, _, val = opt.partition("=")
        if key == "count" and val.isdigit():
            count = int(val)
        elif key == "prov" and val in (LEARNED, INTERPOLATED):
            prov = val
        else:
            raise GrammarParseError(lineno, "malformed", f"bad option {opt!r}")
    key = (context, control)
    if g.get(key) is not None:
        raise GrammarParseError(lineno, "duplicate-key", line)
    return Production(context, control, output, count, prov)


def word(alphabet: Alphabet, labels: str | Iterable[str]) -> tuple[Symbol, ...]:
    """Symbols from a concatenated label string or an iterable of labels."""
    if isinstance(labels, str):
        return tuple(alphabet.tokenize(labels)) if labels else ()
    return tuple(alphabet.by_label(lab) for lab in labels)
