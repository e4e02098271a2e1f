"""Plain-text experiment configuration.

One setting per line. ``alphabet`` and ``costmodel`` lines use the same
syntax as grammar-file headers; everything else is ``key = value``::

    # piecewise plant, defaults spelled out
    alphabet y kind=T lo=1 hi=4 n=4 labels=exact
    alphabet U kind=N lo=-1 hi=1 n=3 labels=exact
    costmodel sub=absdiff ins=4 del=4
    pmax = 2
    L = 10
    theta = auto

Blank lines and ``#`` comments are ignored. Unknown keys are errors.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .alphabet import Alphabet, AlphabetError, parse_alphabet_line
from .metric import CostModel, parse_costmodel_line


class ConfigError(ValueError):
    def __init__(self, where: str, lineno: int, msg: str):
        super().__init__(f"{where}:{lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class RunConfig:
    terminals: Alphabet | None = None
    nonterminals: Alphabet | None = None
    cost: CostModel | None = None
    seed: int = 0
    # learner
    pmax: int = 2
    window: int | None = None
    min_count: int = 1
    # plants
    plant: str = "pw"
    steps: int = 1000
    gain: int = 2
    episode: int | None = None
    i_ds: float = 5.0
    sample_period: float = 0.02
    tau_r: float = 0.15
    M: float = 0.15
    J: float = 0.05
    L_r: float = 0.16
    B: float = 0.005
    T_ext: float = 0.0
    # recognition and detection
    interp: bool = False
    k: int = 4
    max_distance: float | None = None
    L: int = 10
    theta: float | None = None  # None means calibrate
    quantile: float = 1.0
    factor: float = 1.5
    gap_penalty: float | None = None
    # control
    max_steps: int = 20

    def with_overrides(self, **kw) -> RunConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_OPTIONAL_NONE = {"window", "episode", "max_distance", "gap_penalty"}


def _convert(key: str, value: str):
    kind = _TYPES[key].replace(" | None", "")
    if key == "theta":
        return None if value == "auto" else float(value)
    if key in _OPTIONAL_NONE and value in ("none", "auto"):
        return None
    if kind == "int":
        return int(value)
    if kind == "float":
        return float(value)
    if kind == "bool":
        if value not in ("on", "off", "true", "false", "1", "0"):
            raise ValueError(f"expected on/off, got {value!r}")
        return value in ("on", "true", "1")
    return value


def parse_config(text: str, where: str = "<config>") -> RunConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("alphabet "):
                a = parse_alphabet_line(line)
                values["terminals" if a.kind == "T" else "nonterminals"] = a
            elif line.startswith("costmodel"):
                values["cost"] = parse_costmodel_line(line)
            else:
                key, sep, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if not sep or not value:
                    raise ValueError(f"expected key = value, got {line!r}")
                if key not in _TYPES or key in ("terminals", "nonterminals", "cost"):
                    raise ValueError(f"unknown setting {key!r}")
                values[key] = _convert(key, value)
        except (AlphabetError, ValueError) as exc:
            raise ConfigError(where, lineno, str(exc)) from None
    return RunConfig(**values)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(path, 0, f"cannot read config: {exc.strerror}") from None
    return parse_config(text, path)
