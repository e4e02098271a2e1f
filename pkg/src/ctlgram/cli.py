"""Command-line front end: ``ctlgram <subcommand> ...``.

Every file written starts with a ``# seed <n>`` comment line. Outputs go
to ``--out`` (or stdout); ``repro`` writes ``<figure>.csv`` into
``--out-dir``.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import replace
from typing import Sequence

import numpy as np

from . import experiments as ex
from .alphabet import AlphabetError
from .anomaly import AnomalyConfig, TraceTooShort, calibrate_threshold, detect
from .config import ConfigError, RunConfig, load_config
from .controller import ControlPlan, track_targets
from .grammar import Grammar, GrammarError, GrammarParseError, parse, word
from .learner import LearnerConfig, events_csv, learn_trace
from .plants import (
    ExcitationSpec, MotorParams, MotorRun, PiecewisePlant, pw_alphabets, simulate_motor, simulate_piecewise,
)
from .recognizer import FREE, TEACHER, Interpolation, predictions_csv, recognize
from .traces import SymbolTrace, TraceError, read_raw_csv, read_symbol_csv, write_raw_csv, write_symbol_csv

FIGURES = ("fig3", "fig13", "fig14", "fig15", "fig17", "fig18")


class CliError(Exception):
    pass


def _header(seed: int) -> str:
    return f"# seed {seed}\n"


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None


def load_grammar(path: str) -> Grammar:
    try:
        return parse(_read(path))
    except GrammarParseError as exc:
        raise CliError(f"{path}:{exc.lineno}: {exc.reason}: {exc.detail}") from None


def load_trace(path: str, cfg: RunConfig) -> SymbolTrace:
    """A quantized trace file, or a raw one quantized with the configured alphabets."""
    text = _read(path)
    if "\n" not in text:
        text += "\n"
    header = next((ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")), "")
    try:
        if header.startswith("t,U,Y"):
            return read_symbol_csv(text, cfg.terminals, cfg.nonterminals)
        if cfg.terminals is None or cfg.nonterminals is None:
            raise CliError(f"{path}: raw trace needs alphabet lines in the config")
        return read_raw_csv(text).quantize(cfg.terminals, cfg.nonterminals)
    except TraceError as exc:
        raise CliError(f"{path}: {exc}") from None


# subcommands

def cmd_simulate(args, cfg: RunConfig) -> str:
    rng = np.random.default_rng(cfg.seed)
    if cfg.plant not in ("pw", "motor"):
        raise CliError(f"unknown plant {cfg.plant!r}")
    if cfg.plant == "pw":
        raw = simulate_piecewise(cfg.steps, rng=rng, gain=cfg.gain, episode=cfg.episode)
        T, N = pw_alphabets()
    else:
        # random phases over the standard excitation components
        comps = tuple((a, f, float(rng.uniform(0, 2 * np.pi))) for a, f, _ in ex.MOTOR_TRAIN.components)
        spec = ExcitationSpec(comps, cfg.steps * cfg.sample_period, cfg.sample_period)
        params = MotorParams(cfg.tau_r, cfg.M, cfg.J, cfg.L_r, cfg.B, cfg.T_ext)
        raw = simulate_motor(spec, MotorRun(cfg.i_ds, sample_period=cfg.sample_period, params=params))
        T, N = ex.motor_alphabets(raw)
    T, N = cfg.terminals or T, cfg.nonterminals or N
    if args.raw:
        return write_raw_csv(raw, comments=[f"seed {cfg.seed}"])
    return write_symbol_csv(raw.quantize(T, N), comments=[f"seed {cfg.seed}"])


def cmd_learn(args, cfg: RunConfig) -> str:
    trace = load_trace(args.trace, cfg)
    lc = LearnerConfig(cfg.pmax, cfg.window, cfg.min_count)
    try:
        g, events = learn_trace(trace, lc)
    except GrammarError as exc:
        raise CliError(str(exc)) from None
    if args.events:
        _write(_header(cfg.seed) + events_csv(events), args.events)
    return _header(cfg.seed) + g.serialize()


def _interp(cfg: RunConfig) -> Interpolation | None:
    return Interpolation(cfg.k, cfg.max_distance, cost=cfg.cost) if cfg.interp else None


def cmd_recognize(args, cfg: RunConfig) -> str:
    g = load_grammar(args.grammar)
    trace = load_trace(args.trace, replace(cfg, terminals=cfg.terminals or g.terminals,
                                           nonterminals=cfg.nonterminals or g.nonterminals))
    preds = recognize(g, trace, _interp(cfg), args.mode)
    return _header(cfg.seed) + predictions_csv(preds, trace.outputs)


def cmd_detect(args, cfg: RunConfig) -> str:
    g = load_grammar(args.grammar)
    cfg = replace(cfg, terminals=cfg.terminals or g.terminals, nonterminals=cfg.nonterminals or g.nonterminals)
    trace = load_trace(args.trace, cfg)
    acfg = AnomalyConfig(cfg.L, 0.0, cfg.cost, _interp(cfg), cfg.gap_penalty)
    theta = cfg.theta
    if theta is None:
        if not args.healthy:
            raise CliError("--theta auto needs a healthy reference trace (--healthy)")
        theta = calibrate_threshold(g, load_trace(args.healthy, cfg), cfg.L, cfg.quantile, cfg.factor, acfg)
    try:
        rep = detect(g, trace, replace(acfg, threshold=theta))
    except TraceTooShort as exc:
        raise CliError(str(exc)) from None
    return _header(cfg.seed) + rep.to_csv()


def cmd_control(args, cfg: RunConfig) -> str:
    g = load_grammar(args.grammar)
    if args.plant != "pw":
        raise CliError("closed-loop control is available for the piecewise plant only")
    init = tuple(int(v) for v in args.init.split(","))
    overrides = {}
    for item in args.perturb or ():
        step, _, value = item.partition(":")
        overrides[int(step)] = int(value)
    try:
        targets = word(g.terminals, args.targets)
    except AlphabetError as exc:
        raise CliError(f"bad target word: {exc}") from None
    plan = ControlPlan(targets, cfg.max_steps, interpolation=_interp(cfg))
    tr = track_targets(g, PiecewisePlant(init, cfg.gain, overrides), plan)
    return _header(cfg.seed) + tr.to_csv()


def cmd_repro(args, cfg: RunConfig) -> str:
    text = _header(cfg.seed) + repro(args.figure, cfg.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, f"{args.figure}.csv")
    _write(text, path)
    return f"{path}\n"


def repro(figure: str, seed: int = 0) -> str:
    """CSV body (without the seed line) behind one figure analogue."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    if figure == "fig3":
        # the first data points of a random-input run, one row per grammar change
        _, events = learn_trace(ex.pw_training_trace(100, seed, episode=None))
        return events_csv(events)
    if figure in ("fig13", "fig14", "fig15"):
        res = ex.pw_anomaly(seed=2 + seed, train_seed=seed, calib_seed=1 + seed)
        if figure == "fig15":
            return res.report.to_csv()
        if figure == "fig13":
            w.writerow(["step", "gain", "control", "output"])
            for k, (u, y) in enumerate(res.trace):
                w.writerow([k, res.gains[k], u.label, y.label])
            return out.getvalue()
        preds = recognize(res.grammar, res.trace)
        return predictions_csv(preds, res.trace.outputs)
    if figure == "fig17":
        res = ex.motor_broken_bar()
        out.write(f"# anomaly {res.anomaly.t_start}-{res.anomaly.t_end} s\n")
        w.writerow(["step", "t", "distance", "flag"])
        for s, t, d, f in zip(res.report.steps, res.times, res.report.distance, res.report.flagged):
            w.writerow([int(s), f"{t:.2f}", repr(float(d)), int(f)])
        out.write(f"# threshold {res.report.threshold!r}\n")
        return out.getvalue()
    if figure == "fig18":
        return ex.pw_control(ex.pw_grammar(seed=seed)).to_csv()
    raise CliError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="plain-text config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="ctlgram", description="Learn, check and use symbolic input-output grammars of plants.")
    sub = p.add_subparsers(dest="command", required=True, metavar="subcommand")

    s = sub.add_parser("simulate", parents=[common], help="simulate a plant and write a trace")
    s.add_argument("--plant", choices=("pw", "motor"), default=None)
    s.add_argument("--steps", type=int)
    s.add_argument("--episode", type=int, help="re-initialize the piecewise plant every N steps")
    s.add_argument("--raw", action="store_true", help="write unquantized values")

    s = sub.add_parser("learn", parents=[common], help="learn a grammar from a trace")
    s.add_argument("--trace", required=True)
    s.add_argument("--pmax", type=int)
    s.add_argument("--window", type=int)
    s.add_argument("--min-count", type=int)
    s.add_argument("--events", help="also write the learning event log here")

    s = sub.add_parser("recognize", parents=[common], help="predict a trace's outputs from a grammar")
    s.add_argument("--grammar", required=True)
    s.add_argument("--trace", required=True)
    s.add_argument("--interp", choices=("on", "off"))
    s.add_argument("--mode", choices=(TEACHER, FREE), default=TEACHER)

    s = sub.add_parser("detect", parents=[common], help="flag anomalies in a trace")
    s.add_argument("--grammar", required=True)
    s.add_argument("--trace", required=True)
    s.add_argument("--L", type=int, dest="L")
    s.add_argument("--theta", help="threshold or 'auto'")
    s.add_argument("--healthy", help="healthy trace for --theta auto")
    s.add_argument("--interp", choices=("on", "off"))

    s = sub.add_parser("control", parents=[common], help="closed-loop target tracking")
    s.add_argument("--grammar", required=True)
    s.add_argument("--plant", choices=("pw",), default="pw")
    s.add_argument("--targets", required=True)
    s.add_argument("--init", default="2,1", help="initial y[k-1],y[k]")
    s.add_argument("--max-steps", type=int)
    s.add_argument("--perturb", action="append", metavar="STEP:VALUE",
                   help="force the plant output at STEP (repeatable)")

    s = sub.add_parser("repro", parents=[common], help="regenerate a figure's data series")
    s.add_argument("figure", choices=FIGURES)
    s.add_argument("--out-dir", default=".")
    return p


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    theta = getattr(args, "theta", None)
    over = dict(
        seed=args.seed,
        plant=getattr(args, "plant", None),
        steps=getattr(args, "steps", None),
        episode=getattr(args, "episode", None),
        pmax=getattr(args, "pmax", None),
        window=getattr(args, "window", None),
        min_count=getattr(args, "min_count", None),
        L=getattr(args, "L", None),
        max_steps=getattr(args, "max_steps", None),
    )
    if getattr(args, "interp", None) is not None:
        over["interp"] = args.interp == "on"
    cfg = cfg.with_overrides(**over)
    if theta is not None:
        cfg = replace(cfg, theta=None if theta == "auto" else float(theta))
    return cfg


COMMANDS = {
    "simulate": cmd_simulate,
    "learn": cmd_learn,
    "recognize": cmd_recognize,
    "detect": cmd_detect,
    "control": cmd_control,
    "repro": cmd_repro,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        text = COMMANDS[args.command](args, cfg)
    except (CliError, ConfigError) as exc:
        print(f"ctlgram: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, GrammarError, TraceError, AlphabetError) as exc:
        print(f"ctlgram: error: {exc}", file=sys.stderr)
        return 1
    if args.command == "repro":
        sys.stderr.write(text)
    else:
        _write(text, args.out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
