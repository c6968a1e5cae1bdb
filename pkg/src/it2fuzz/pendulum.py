"""Inverted pendulum on a cart, balanced by a fuzzy controller.

The plant is the classic pole-balancing model with a first-order
actuator lag: the controller commands a force f, the force actually
applied follows d(fa)/dt = -100 fa + 100 f.  The control loop scales
angle error and error rate into the engine's [-1, 1] input range, runs
one inference, and scales the crisp output up to a commanded force.

Integration is classical fixed-step RK4 with the commanded force held
constant across the four stages of each step (the controller runs once
per step, zero-order hold).  The actuator pole at -100 1/s puts the RK4
stability limit near h = 0.0278 s; LoopConfig rejects steps that large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import InferenceResult

__all__ = [
    "GRAVITY",
    "ACTUATOR_RATE",
    "RK4_MAX_STEP",
    "PlantState",
    "LoopConfig",
    "SimTrace",
    "NumericalBlowup",
    "plant_derivatives",
    "controller_step",
    "simulate",
    "settle_time",
    "write_trace_csv",
]

GRAVITY = 9.81
ACTUATOR_RATE = 100.0
# RK4 is stable for |h * lambda| < 2.785; with lambda = -100 that means
# h < 0.02785 s.  Configs at or above this bound are rejected.
RK4_MAX_STEP = 0.0278
BLOWUP_LIMIT = 1e6


class NumericalBlowup(RuntimeError):
    """State left the sane range; carries the partial trace as .trace."""

    def __init__(self, message: str, trace: "SimTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class PlantState:
    """Pendulum angle (rad, 0 = upright), angular velocity, and lagged force."""

    angle: float
    angular_velocity: float
    actuator_force: float


@dataclass(frozen=True)
class LoopConfig:
    error_gain: float = 4.0 / math.pi
    rate_gain: float = 0.4 / math.pi
    force_gain: float = 100.0
    step: float = 1e-3
    duration: float = 5.0
    initial_angle: float = 0.1
    initial_velocity: float = 0.0
    setpoint: float = 0.0

    def __post_init__(self) -> None:
        for name in ("error_gain", "rate_gain", "force_gain", "step", "duration",
                     "initial_angle", "initial_velocity", "setpoint"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if self.step >= RK4_MAX_STEP:
            raise ValueError(
                f"step {self.step} is at or above the RK4 stability bound {RK4_MAX_STEP}"
            )
        if self.duration < self.step:
            raise ValueError("duration must cover at least one step")


@dataclass
class SimTrace:
    """Fixed-step simulation record; all arrays share one length."""

    times: np.ndarray
    angles: np.ndarray
    angular_velocities: np.ndarray
    forces: np.ndarray
    controller_inputs: np.ndarray  # shape (n, 2), scaled (x1, x2)
    controller_outputs: np.ndarray  # crisp engine outputs, pre force gain
    degenerate_flags: np.ndarray
    failed: bool = False


def _derivs(angle: float, velocity: float, lagged: float,
            commanded: float) -> tuple[float, float, float]:
    s = math.sin(angle)
    c = math.cos(angle)
    accel = (GRAVITY * s + c * ((-lagged - 0.25 * velocity * velocity * s) / 1.5)) \
        / (2.0 / 3.0 - c * c / 6.0)
    return velocity, accel, -ACTUATOR_RATE * lagged + ACTUATOR_RATE * commanded


def plant_derivatives(state: PlantState, commanded_force: float) -> tuple[float, float, float]:
    """Time derivatives (d_angle, d_velocity, d_force) at a state.

    ``commanded_force`` is the controller output f; the state carries the
    lagged force actually applied to the cart.
    """
    return _derivs(state.angle, state.angular_velocity,
                   state.actuator_force, commanded_force)


def _clamp(v: float) -> float:
    return min(1.0, max(-1.0, v))


def _control(engine, cfg: LoopConfig, error: float,
             error_rate: float) -> tuple[float, float, float, float, bool]:
    x1 = _clamp(cfg.error_gain * error)
    x2 = _clamp(cfg.rate_gain * error_rate)
    result: InferenceResult = engine.infer((x1, x2))
    return x1, x2, result.value, cfg.force_gain * result.value, result.degenerate


def controller_step(engine, cfg: LoopConfig, error: float,
                    error_rate: float) -> tuple[float, bool]:
    """One controller evaluation: scaled inputs -> inference -> commanded force.

    Inputs are clamped to [-1, 1] after gain scaling.  Returns the
    commanded force and the engine's degeneracy flag; engines never raise
    here, so the loop always keeps running.
    """
    _, _, _, force, degenerate = _control(engine, cfg, error, error_rate)
    return force, degenerate


def simulate(engine, cfg: LoopConfig | None = None) -> SimTrace:
    """Closed-loop run over floor(duration / step) RK4 steps.

    The trace has one row per step boundary including t = 0, with the
    controller quantities evaluated at that row's state.  Raises
    NumericalBlowup (carrying the partial trace) if any state magnitude
    passes 1e6 or stops being finite.
    """
    cfg = cfg if cfg is not None else LoopConfig()
    n_steps = int(math.floor(cfg.duration / cfg.step))
    n_rows = n_steps + 1
    times = np.empty(n_rows)
    angles = np.empty(n_rows)
    velocities = np.empty(n_rows)
    forces = np.empty(n_rows)
    inputs = np.empty((n_rows, 2))
    outputs = np.empty(n_rows)
    flags = np.zeros(n_rows, dtype=bool)

    h = cfg.step
    y = float(cfg.initial_angle)
    w = float(cfg.initial_velocity)
    fa = 0.0
    for i in range(n_rows):
        ok = all(math.isfinite(v) and abs(v) <= BLOWUP_LIMIT for v in (y, w, fa))
        if not ok:
            trace = SimTrace(times[:i].copy(), angles[:i].copy(), velocities[:i].copy(),
                             forces[:i].copy(), inputs[:i].copy(), outputs[:i].copy(),
                             flags[:i].copy(), failed=True)
            raise NumericalBlowup(
                f"state left the sane range at t = {i * h:.6g} s "
                f"(angle {y:.6g}, velocity {w:.6g}, force {fa:.6g})",
                trace,
            )
        x1, x2, u, f, degenerate = _control(engine, cfg, cfg.setpoint - y, -w)
        times[i] = i * h
        angles[i] = y
        velocities[i] = w
        forces[i] = f
        inputs[i, 0] = x1
        inputs[i, 1] = x2
        outputs[i] = u
        flags[i] = degenerate
        if i == n_steps:
            break
        # Classical RK4; the commanded force f is held for the whole step.
        k1 = _derivs(y, w, fa, f)
        k2 = _derivs(y + 0.5 * h * k1[0], w + 0.5 * h * k1[1], fa + 0.5 * h * k1[2], f)
        k3 = _derivs(y + 0.5 * h * k2[0], w + 0.5 * h * k2[1], fa + 0.5 * h * k2[2], f)
        k4 = _derivs(y + h * k3[0], w + h * k3[1], fa + h * k3[2], f)
        y += h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        w += h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
        fa += h * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0

    return SimTrace(times, angles, velocities, forces, inputs, outputs, flags)


def settle_time(trace: SimTrace, threshold: float = 0.01) -> float | None:
    """First trace time after which |angle| stays below threshold.

    Returns 0.0 if the whole trace is below threshold and None if the
    final sample is not.
    """
    above = np.abs(trace.angles) >= threshold
    if above[-1]:
        return None
    idx = np.nonzero(above)[0]
    if idx.size == 0:
        return 0.0
    return float(trace.times[idx[-1] + 1])


def write_trace_csv(trace: SimTrace, path: str | Path) -> None:
    """Write the trace with a fixed header at 17 significant digits."""
    lines = ["t,angle,angular_velocity,force,x1,x2,u,degenerate"]
    for i in range(trace.times.size):
        lines.append(
            f"{trace.times[i]:.17g},{trace.angles[i]:.17g},"
            f"{trace.angular_velocities[i]:.17g},{trace.forces[i]:.17g},"
            f"{trace.controller_inputs[i, 0]:.17g},{trace.controller_inputs[i, 1]:.17g},"
            f"{trace.controller_outputs[i]:.17g},{int(trace.degenerate_flags[i])}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
