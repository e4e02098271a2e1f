"""Simulated controlled plants and excitation signals.

Two plants are provided:

* the second-order piecewise-linear system ``y[k+1] = y[k] - y[k-1] + gain*u[k]``
  with outputs restricted to {1, 2, 3, 4} and controls in {-1, 0, 1};
* a reduced third-order induction motor model in the rotor-flux frame, fed
  by ideally controlled stator currents ``(i_ds, i_qs)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .alphabet import Alphabet, Symbol, build_uniform_alphabet
from .traces import RawTrace

PW_OUTPUTS = (1, 2, 3, 4)
PW_CONTROLS = (-1, 0, 1)


class InadmissibleControl(ValueError):
    """The control would drive the plant output outside its working domain."""


class FluxNearZero(ArithmeticError):
    """Rotor flux too small for the rotor-flux frame to be defined."""


# piecewise-linear plant

@dataclass(frozen=True)
class PiecewiseState:
    y_k: int
    y_km1: int
    gain: int = 2

    def __post_init__(self):
        if self.y_k not in PW_OUTPUTS or self.y_km1 not in PW_OUTPUTS:
            raise ValueError(f"outputs must lie in {PW_OUTPUTS}: {self}")


def step_piecewise(st: PiecewiseState, u: int) -> tuple[PiecewiseState, int]:
    if u not in PW_CONTROLS:
        raise ValueError(f"control must lie in {PW_CONTROLS}, got {u}")
    y_next = st.y_k - st.y_km1 + st.gain * u
    if y_next not in PW_OUTPUTS:
        raise InadmissibleControl(f"u={u} from (y_km1={st.y_km1}, y_k={st.y_k}) gives {y_next}")
    return PiecewiseState(y_next, st.y_k, st.gain), y_next


def admissible_controls(st: PiecewiseState) -> list[int]:
    return [u for u in PW_CONTROLS if st.y_k - st.y_km1 + st.gain * u in PW_OUTPUTS]


def enumerate_admissible(gain: int = 2) -> set[tuple[int, int, int, int]]:
    """All ``(y_km1, y_k, u, y_next)`` inside the working domain."""
    out = set()
    for y_km1 in PW_OUTPUTS:
        for y_k in PW_OUTPUTS:
            for u in PW_CONTROLS:
                y_next = y_k - y_km1 + gain * u
                if y_next in PW_OUTPUTS:
                    out.add((y_km1, y_k, u, y_next))
    return out


def pw_alphabets() -> tuple[Alphabet, Alphabet]:
    """Codification 1..4 -> a..d and -1, 0, 1 -> A, B, C."""
    return (
        build_uniform_alphabet(1, 4, 4, "T", "exact", name="y"),
        build_uniform_alphabet(-1, 1, 3, "N", "exact", name="U"),
    )


def live_states(gain: int = 2) -> list[tuple[int, int]]:
    """``(y_km1, y_k)`` pairs from which at least one control is admissible."""
    return sorted({(a, b) for a, b, _, _ in enumerate_admissible(gain)})


def viable_kernel(gain: int = 2) -> set[tuple[int, int]]:
    """Largest set of ``(y_km1, y_k)`` states the plant can be kept inside forever.

    Only 8 of the 16 states qualify for gain 2; every other state reaches a
    dead end within a few steps whatever the controls.
    """
    moves = enumerate_admissible(gain)
    keep = set(live_states(gain))
    while True:
        nxt = {s for s in keep if any((a, b) == s and (b, y) in keep for a, b, _, y in moves)}
        if nxt == keep:
            return keep
        keep = nxt


def simulate_piecewise(steps: int, seed: int | None = 0, init: tuple[int, int] = (2, 1),
                       gain: int | Sequence[int] = 2, controls: Sequence[int] | None = None,
                       rng: np.random.Generator | None = None, episode: int | None = None) -> RawTrace:
    """Random-input run, choosing uniformly among admissible controls.

    Some states admit no control at all (e.g. ``y_km1=3, y_k=1``) and others
    only one that loops back (``y_km1=y_k=2``). On reaching a dead state, and
    every ``episode`` steps if given, the plant is re-initialized to a random
    live state and the new initial outputs are recorded in ``resets``. ``gain`` may be a
    per-step sequence (used to inject anomalies). With ``controls`` given,
    those are applied verbatim and must be admissible. ``init`` is
    ``(y_km1, y_k)``.
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    gains = [gain] * steps if isinstance(gain, int) else list(gain)
    if len(gains) < steps:
        raise ValueError("gain schedule shorter than the run")
    st = PiecewiseState(init[1], init[0], gains[0] if gains else 2)
    us, ys, resets = [], [], {}
    for k in range(steps):
        st = replace(st, gain=gains[k])
        if controls is None:
            options = admissible_controls(st)
            if not options or (episode and k and k % episode == 0):
                live = live_states(st.gain)
                y_km1, y_k = live[int(rng.integers(len(live)))]
                st = PiecewiseState(y_k, y_km1, st.gain)
                resets[k] = np.array([y_km1, y_k], dtype=float)
                options = admissible_controls(st)
            u = options[int(rng.integers(len(options)))]
        else:
            u = controls[k]
        st, y = step_piecewise(st, u)
        us.append(u)
        ys.append(y)
    history = resets.pop(0, np.array(init, dtype=float))
    return RawTrace(np.arange(steps, dtype=float), np.array(us, float), np.array(ys, float),
                    history, resets=resets)


class PiecewisePlant:
    """Symbol-level stepper for closed-loop runs.

    ``overrides`` maps a step number to an output value forced in place of
    the true one (a one-off disturbance); the plant continues from there.
    """

    def __init__(self, init: tuple[int, int] = (2, 1), gain: int = 2,
                 overrides: dict[int, int] | None = None):
        self.terminals, self.nonterminals = pw_alphabets()
        self.state = PiecewiseState(init[1], init[0], gain)
        self.overrides = dict(overrides or {})
        self.steps = 0

    @property
    def history(self) -> tuple[Symbol, Symbol]:
        T = self.terminals
        return (T.quantize(self.state.y_km1).symbol, T.quantize(self.state.y_k).symbol)

    def step(self, u: Symbol) -> Symbol:
        value = int(round(self.nonterminals.dequantize(u)))
        st, y = step_piecewise(self.state, value)
        if self.steps in self.overrides:
            y = self.overrides[self.steps]
            st = PiecewiseState(y, self.state.y_k, self.state.gain)
        self.state = st
        self.steps += 1
        return self.terminals.quantize(y).symbol


# induction motor

@dataclass(frozen=True)
class MotorAnomaly:
    """Rotor time constant modulation ``tau_r * (1 + depth*sin(2*pi*freq*t))``
    active for ``t_start <= t < t_end``."""

    t_start: float
    t_end: float
    depth: float = 0.5
    freq: float = 2.0

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError("anomaly needs t_start < t_end")
        if not 0 <= self.depth < 1:
            raise ValueError("modulation depth must lie in [0, 1)")


@dataclass(frozen=True)
class MotorParams:
    tau_r: float = 0.15
    M: float = 0.15
    J: float = 0.05
    L_r: float = 0.16
    B: float = 0.005
    T_ext: float = 0.0
    anomaly: MotorAnomaly | None = None
    flux_eps: float = 1e-6

    def __post_init__(self):
        for name in ("tau_r", "M", "J", "L_r", "B"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.T_ext < 0:
            raise ValueError("T_ext must be non-negative")

    def rotor_tau(self, t: float) -> float:
        """Actual rotor time constant at time ``t``."""
        a = self.anomaly
        if a is None or not a.t_start <= t < a.t_end:
            return self.tau_r
        return self.tau_r * (1.0 + a.depth * math.sin(2 * math.pi * a.freq * (t - a.t_start)))


@dataclass(frozen=True)
class MotorState:
    psi_dr: float
    psi_qr: float = 0.0
    omega: float = 0.0

    @property
    def psi_r(self) -> float:
        return self.psi_dr


def motor_derivative(x: np.ndarray, i_ds: float, i_qs: float, p: MotorParams, t: float) -> np.ndarray:
    """Rotor-flux-frame dynamics with the frame speed imposed by the controller.

    The frame speed uses the nominal rotor time constant, so with a healthy
    rotor the q-axis flux stays at zero and the model reduces to
    ``dpsi_r = (-psi_r + M*i_ds)/tau_r`` and
    ``domega = M/(J*L_r)*i_qs*psi_r - B/J*omega - T_ext/J``.
    """
    psi_dr, psi_qr, omega = x
    if abs(psi_dr) < p.flux_eps:
        raise FluxNearZero(f"|psi_r|={abs(psi_dr):.3g} below {p.flux_eps:g}")
    slip = p.M / p.tau_r * i_qs / psi_dr  # omega_R - omega
    tau = p.rotor_tau(t)
    d_psi_dr = -psi_dr / tau + slip * psi_qr + p.M / tau * i_ds
    d_psi_qr = -slip * psi_dr - psi_qr / tau + p.M / tau * i_qs
    d_omega = p.M / (p.J * p.L_r) * (i_qs * psi_dr - i_ds * psi_qr) - p.B / p.J * omega - p.T_ext / p.J
    return np.array([d_psi_dr, d_psi_qr, d_omega])


def step_motor(st: MotorState, i_ds: float, i_qs: float, dt: float, p: MotorParams,
               t: float = 0.0) -> MotorState:
    """One classical RK4 step of length ``dt`` with currents held constant."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    x = np.array([st.psi_dr, st.psi_qr, st.omega])
    k1 = motor_derivative(x, i_ds, i_qs, p, t)
    k2 = motor_derivative(x + dt / 2 * k1, i_ds, i_qs, p, t + dt / 2)
    k3 = motor_derivative(x + dt / 2 * k2, i_ds, i_qs, p, t + dt / 2)
    k4 = motor_derivative(x + dt * k3, i_ds, i_qs, p, t + dt)
    x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return MotorState(*x)


# excitation

@dataclass(frozen=True)
class ExcitationSpec:
    components: tuple[tuple[float, float, float], ...]  # (amplitude, frequency Hz, phase rad)
    duration: float
    sample_period: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.components:
            raise ValueError("excitation needs at least one component")
        if not self.sample_period > 0:
            raise ValueError("sample period must be positive")
        if not self.duration > 0:
            raise ValueError("duration must be positive")

    @property
    def times(self) -> np.ndarray:
        return np.arange(int(round(self.duration / self.sample_period))) * self.sample_period


def excitation(spec: ExcitationSpec, t):
    """Sum of the sinusoidal components (plus offset) at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    v = np.full(t.shape, float(spec.offset))
    for amp, freq, phase in spec.components:
        v = v + amp * np.sin(2 * np.pi * freq * t + phase)
    return float(v) if v.ndim == 0 else v


@dataclass(frozen=True)
class MotorRun:
    """Settings of a sampled motor simulation."""

    i_ds: float = 5.0
    dt: float = 1e-3
    sample_period: float = 0.01
    params: MotorParams = field(default_factory=MotorParams)


def simulate_motor(i_qs: Iterable[float] | ExcitationSpec, run: MotorRun = MotorRun(),
                   init: MotorState | None = None) -> RawTrace:
    """Sampled motor run: ``u`` is the applied ``i_qs``, ``y`` the speed.

    The current reference is held over each sample period and integrated in
    ``dt`` sub-steps. The returned history holds the initial speed.
    """
    if isinstance(i_qs, ExcitationSpec):
        if not math.isclose(i_qs.sample_period, run.sample_period):
            raise ValueError("excitation and run sample periods differ")
        i_qs = excitation(i_qs, i_qs.times)
    i_qs = np.asarray(list(i_qs), dtype=float)
    sub = max(1, int(round(run.sample_period / run.dt)))
    h = run.sample_period / sub
    p = run.params
    st = init or MotorState(p.M * run.i_ds)
    n = len(i_qs)
    omega = np.empty(n)
    psi_r = np.empty(n)
    psi_qr = np.empty(n)
    t = 0.0
    w0 = st.omega
    for k in range(n):
        for j in range(sub):
            st = step_motor(st, run.i_ds, i_qs[k], h, p, t)
            t = (k * sub + j + 1) * h
        omega[k], psi_r[k], psi_qr[k] = st.omega, st.psi_dr, st.psi_qr
    times = (np.arange(n) + 1) * run.sample_period
    return RawTrace(times, i_qs, omega, np.array([w0]),
                    {"i_ds": np.full(n, run.i_ds), "i_qs": i_qs.copy(), "omega": omega,
                     "psi_r": psi_r, "psi_qr": psi_qr})
