"""Fixed-seed scenarios shared by the CLI ``repro`` command, tests and demos.

Every function returns plain data (grammars, traces, reports) and takes its
seed explicitly; nothing here writes files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .alphabet import Alphabet, build_uniform_alphabet
from .anomaly import AnomalyConfig, AnomalyReport, calibrate_threshold, detect
from .controller import ControlPlan, ControlTrace, track_targets
from .grammar import Grammar, word
from .learner import LearnerConfig, LearnEvent, learn_trace
from .plants import (
    ExcitationSpec, MotorAnomaly, MotorParams, MotorRun, MotorState, PiecewisePlant,
    pw_alphabets, simulate_motor, simulate_piecewise,
)
from .recognizer import Interpolation, Prediction, recognize
from .traces import RawTrace, SymbolTrace, symbol_trace

# worked example: six observations and the alphabets they are written in

WORKED_CONTROLS = "ABAABA"
WORKED_OUTPUTS = "edcbde"


def worked_alphabets() -> tuple[Alphabet, Alphabet]:
    return (build_uniform_alphabet(1, 5, 5, "T", "exact", name="y"),
            build_uniform_alphabet(1, 2, 2, "N", "exact", name="U"))


def worked_trace() -> SymbolTrace:
    T, N = worked_alphabets()
    return symbol_trace(T, N, WORKED_CONTROLS, WORKED_OUTPUTS)


def worked_example() -> tuple[Grammar, list[LearnEvent]]:
    return learn_trace(worked_trace(), LearnerConfig(p_max=2, window=2, min_count=1))


# piecewise-linear plant

PW_TRAIN_STEPS = 3000
PW_EPISODE = 10
CONTROL_TARGETS = "cbcbaabcccbacc"


def pw_training_trace(steps: int = PW_TRAIN_STEPS, seed: int = 0, episode: int | None = PW_EPISODE) -> SymbolTrace:
    T, N = pw_alphabets()
    return simulate_piecewise(steps, seed, episode=episode).quantize(T, N)


def pw_grammar(steps: int = PW_TRAIN_STEPS, seed: int = 0, episode: int | None = PW_EPISODE,
               cfg: LearnerConfig | None = None) -> Grammar:
    g, _ = learn_trace(pw_training_trace(steps, seed, episode), cfg)
    return g


def gain_schedule(steps: int = 100, sustained: tuple[int, int] = (30, 60),
                  spurious: tuple[int, int] = (80, 85), nominal: int = 2, faulty: int = 3) -> list[int]:
    """Per-step gain, ``faulty`` over both inclusive step ranges."""
    gains = [nominal] * steps
    for a, b in (sustained, spurious):
        for k in range(a, min(b, steps - 1) + 1):
            gains[k] = faulty
    return gains


def misread(trace: SymbolTrace, rate: float, rng: np.random.Generator) -> SymbolTrace:
    """Replace each output with a neighbouring level with probability ``rate``."""
    T = trace.terminals
    out = []
    for y in trace.outputs:
        if rng.random() < rate:
            i = y.index + (1 if rng.random() < 0.5 else -1)
            if not 0 <= i < T.n:
                i = 2 * y.index - i
            y = T.symbol(i)
        out.append(y)
    return replace(trace, outputs=tuple(out))


@dataclass
class PwAnomalyResult:
    grammar: Grammar
    calibration: SymbolTrace
    trace: SymbolTrace
    raw: RawTrace
    gains: list[int]
    report: AnomalyReport


def pw_anomaly(seed: int = 2, train_seed: int = 0, calib_seed: int = 1, steps: int = 100, L: int = 10,
               noise: float = 0.05, grammar: Grammar | None = None) -> PwAnomalyResult:
    """Random-input run with a sustained and a spurious gain change.

    The threshold comes from a healthy run of the same length whose outputs
    are misread by one level with probability ``noise``: a clean healthy run
    has zero distance everywhere and would give a zero threshold.
    """
    T, N = pw_alphabets()
    g = grammar or pw_grammar(seed=train_seed)
    calib = misread(simulate_piecewise(steps, calib_seed).quantize(T, N), noise,
                    np.random.default_rng(calib_seed))
    theta = calibrate_threshold(g, calib, L)
    gains = gain_schedule(steps)
    raw = simulate_piecewise(steps, seed, gain=gains)
    trace = raw.quantize(T, N)
    return PwAnomalyResult(g, calib, trace, raw, gains, detect(g, trace, AnomalyConfig(L, theta)))


def pw_control(grammar: Grammar | None = None, targets: str = CONTROL_TARGETS, init: tuple[int, int] = (2, 1),
               overrides: dict[int, int] | None = None, max_steps: int = 20,
               tie_break: str | None = None) -> ControlTrace:
    T, _ = pw_alphabets()
    g = grammar or pw_grammar()
    plan = ControlPlan(word(T, targets), max_steps)
    if tie_break is not None:
        plan = replace(plan, tie_break=tie_break)
    return track_targets(g, PiecewisePlant(init, overrides=overrides), plan)


# induction motor

MOTOR_SAMPLE = 0.02
MOTOR_B = 0.05  # viscous load: speed settles within about J/B = 1 s
MOTOR_TRAIN = ExcitationSpec(((1.5, 0.4, 0.0), (1.0, 1.0, 1.0), (0.5, 2.2, 2.0)), 100.0, MOTOR_SAMPLE)
MOTOR_TEST = ExcitationSpec(((1.5, 0.29, 0.5), (1.0, 1.13, 2.5), (0.5, 1.9, 0.3)), 20.0, MOTOR_SAMPLE)
MOTOR_TERMINALS = 60
MOTOR_CONTROLS = 24
MOTOR_IQS_RANGE = (-3.0, 3.0)


def motor_run(anomaly: MotorAnomaly | None = None, sample_period: float = MOTOR_SAMPLE) -> MotorRun:
    return MotorRun(sample_period=sample_period, params=MotorParams(B=MOTOR_B, anomaly=anomaly))


def shifted(spec: ExcitationSpec, t0: float, duration: float) -> ExcitationSpec:
    """The same signal continued from time ``t0``."""
    comps = tuple((a, f, ph + 2 * math.pi * f * t0) for a, f, ph in spec.components)
    return ExcitationSpec(comps, duration, spec.sample_period, spec.offset)


def final_state(raw: RawTrace) -> MotorState:
    return MotorState(float(raw.extra["psi_r"][-1]), float(raw.extra["psi_qr"][-1]), float(raw.y[-1]))


def motor_alphabets(train: RawTrace, n_terminals: int = MOTOR_TERMINALS,
                    n_controls: int = MOTOR_CONTROLS) -> tuple[Alphabet, Alphabet]:
    return (build_uniform_alphabet(float(train.y.min()), float(train.y.max()), n_terminals, "T", name="omega"),
            build_uniform_alphabet(*MOTOR_IQS_RANGE, n_controls, "N", name="iqs"))


@dataclass
class MotorRecognition:
    grammar: Grammar
    train: RawTrace
    test: RawTrace
    trace: SymbolTrace
    predictions: list[Prediction]
    covered: np.ndarray  # steps with a matched production and an in-range output
    within_one: float


def motor_recognition(train_spec: ExcitationSpec = MOTOR_TRAIN, test_spec: ExcitationSpec = MOTOR_TEST,
                      interp: Interpolation | None = None) -> MotorRecognition:
    run = motor_run()
    train = simulate_motor(train_spec, run)
    test = simulate_motor(test_spec, run)
    T, N = motor_alphabets(train)
    g, _ = learn_trace(train.quantize(T, N))
    trace = test.quantize(T, N)
    preds = recognize(g, trace, interp)
    _, out = T.indices(test.y)
    covered = np.array([k for k, p in enumerate(preds) if p.output is not None and not out[k]], dtype=int)
    ok = [abs(preds[k].output.index - trace.outputs[k].index) <= 1 for k in covered]
    return MotorRecognition(g, train, test, trace, preds, covered, float(np.mean(ok)) if ok else 0.0)


def interpolation_gain(train_spec: ExcitationSpec = MOTOR_TRAIN) -> tuple[list[Prediction], list[Prediction], SymbolTrace]:
    """Learn from the first half of a run, recognize all of it with and without interpolation."""
    run = motor_run()
    full = simulate_motor(train_spec, run)
    T, N = motor_alphabets(full)
    trace = full.quantize(T, N)
    g, _ = learn_trace(trace.slice(0, len(trace) // 2))
    return recognize(g, trace, None), recognize(g, trace, Interpolation()), trace


@dataclass
class BrokenBarResult:
    grammar: Grammar
    healthy: SymbolTrace
    trace: SymbolTrace
    report: AnomalyReport
    times: np.ndarray  # end time of each distance window
    anomaly: MotorAnomaly


def motor_broken_bar(anomaly: MotorAnomaly = MotorAnomaly(1.0, 2.0, 0.5, 2.0), duration: float = 10.0,
                     L: int = 10) -> BrokenBarResult:
    """Repeating duty cycle: learn healthy cycles, then watch a later one.

    The threshold is calibrated on the healthy continuation of the training
    run; the faulty run continues from the same state with the rotor time
    constant modulated over the anomaly interval (times relative to the
    start of the monitored run).
    """
    run = motor_run()
    train = simulate_motor(MOTOR_TRAIN, run)
    T, N = motor_alphabets(train)
    g, _ = learn_trace(train.quantize(T, N))
    start = final_state(train)
    cont = shifted(MOTOR_TRAIN, MOTOR_TRAIN.duration, duration)
    healthy = simulate_motor(cont, run, start).quantize(T, N)
    faulty = simulate_motor(cont, motor_run(anomaly), start).quantize(T, N)
    cfg = AnomalyConfig(L, interpolation=Interpolation())
    theta = calibrate_threshold(g, healthy, L, cfg=cfg)
    rep = detect(g, faulty, replace(cfg, threshold=theta))
    return BrokenBarResult(g, healthy, faulty, rep, (rep.steps + 1) * MOTOR_SAMPLE, anomaly)


@dataclass
class LocalityResult:
    grammar: Grammar
    trace: SymbolTrace
    predictions: list[Prediction]
    negative: np.ndarray  # steps whose true speed is negative


def generalization_locality() -> LocalityResult:
    """Train with forward rotation only, test a run that reverses.

    The terminal alphabet spans both directions so reverse speeds have
    symbols, but no training sample ever produced one.
    """
    run = motor_run()
    fwd = ExcitationSpec(MOTOR_TRAIN.components, 100.0, MOTOR_SAMPLE, offset=1.0)
    both = ExcitationSpec(MOTOR_TEST.components, 20.0, MOTOR_SAMPLE, offset=0.0)
    train = simulate_motor(fwd, run)
    test = simulate_motor(both, run)
    hi = float(max(train.y.max(), np.abs(test.y).max()))
    T = build_uniform_alphabet(-hi, hi, MOTOR_TERMINALS, "T", name="omega")
    N = build_uniform_alphabet(*MOTOR_IQS_RANGE, MOTOR_CONTROLS, "N", name="iqs")
    g, _ = learn_trace(train.quantize(T, N))
    trace = test.quantize(T, N)
    preds = recognize(g, trace, Interpolation())
    return LocalityResult(g, trace, preds, np.flatnonzero(test.y < 0))
