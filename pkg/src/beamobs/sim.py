"""Joint plant/observer time integration and trajectory persistence.

Plant and observer are integrated as one coupled linear system with
classical fixed-step RK4; the observer consumes the plant output inside
every stage evaluation, so no sample-and-hold dynamics is introduced.
Runs are deterministic: identical inputs give bit-identical trajectories.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .galerkin import ReducedModel
from .model import BeamSystem
from .observer import ObserverGain, error_system, lyapunov_value

# Default step: 200 steps per period of the fastest retained mode.  RK4
# loses oscillator energy at a relative rate theta^6/72 per step with
# theta = omega dt; 200 steps/period keeps the drift of a 1e4-step run
# near 1e-7, well inside the 1e-6 budget (50 steps/period would not).
STEPS_PER_FASTEST_PERIOD = 200

# Cap on stored samples for default runs; longer runs are thinned.
MAX_STORED_SAMPLES = 20_000


class SimulationError(RuntimeError):
    """Integration produced a non-finite state."""


@dataclass(frozen=True)
class ForcingSignal:
    """One input channel: zero, a sinusoid, or a piecewise-constant table."""

    kind: str = "zero"
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("zero", "sinusoid", "table"):
            raise ValueError(f"unknown forcing kind {self.kind!r}")
        if self.kind == "sinusoid" and self.omega < 0.0:
            raise ValueError("sinusoid angular frequency must be >= 0")
        if self.kind == "table":
            if len(self.times) != len(self.values) or not self.times:
                raise ValueError("table forcing needs matching, non-empty times and values")
            if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
                raise ValueError("table times must be strictly increasing")

    @classmethod
    def zero(cls) -> "ForcingSignal":
        return cls()

    @classmethod
    def sinusoid(cls, amplitude: float, omega: float, phase: float = 0.0) -> "ForcingSignal":
        return cls(kind="sinusoid", amplitude=float(amplitude), omega=float(omega),
                   phase=float(phase))

    @classmethod
    def table(cls, times, values) -> "ForcingSignal":
        return cls(kind="table", times=tuple(float(t) for t in times),
                   values=tuple(float(v) for v in values))

    @classmethod
    def from_spec(cls, spec: dict) -> "ForcingSignal":
        kind = spec.get("kind", "zero")
        if kind == "zero":
            return cls.zero()
        if kind == "sinusoid":
            return cls.sinusoid(spec.get("amplitude", 1.0), spec.get("omega", 0.0),
                                spec.get("phase", 0.0))
        if kind == "table":
            return cls.table(spec.get("times", ()), spec.get("values", ()))
        raise ValueError(f"unknown forcing kind {kind!r}")

    def __call__(self, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "sinusoid":
            return self.amplitude * math.sin(self.omega * t + self.phase)
        idx = np.searchsorted(self.times, t, side="right") - 1
        if idx < 0:
            return 0.0
        return self.values[idx]


@dataclass(frozen=True)
class Trajectory:
    """Sampled run: plant states, optional observer states, diagnostics.

    All arrays share the first (sample) dimension and the time grid is
    uniform.  ``err_weighted``/``mode_errors`` use the configured shaker
    stiffness and mass as weights and are None for plant-only runs or when
    those weights were not supplied.
    """

    times: np.ndarray
    plant: np.ndarray
    observer: np.ndarray | None
    outputs: np.ndarray
    err_weighted: np.ndarray | None
    lyapunov: np.ndarray | None
    mode_errors: np.ndarray | None
    kappa: float | None = None
    mass: float | None = None

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def n_modes(self) -> int:
        return self.plant.shape[1] // 2


def default_dt(model: ReducedModel) -> float:
    """Step-size rule: 200 steps per period of the fastest retained mode."""
    omega_max = math.sqrt(float(np.max(model.lambdas)))
    return 2.0 * math.pi / (STEPS_PER_FASTEST_PERIOD * omega_max)


def weighted_error(traj: Trajectory) -> np.ndarray:
    """Per-sample (kappa/2) sum Delta_j^2 + (m/2) sum delta_j^2."""
    if traj.observer is None:
        raise ValueError("trajectory has no observer states")
    if traj.kappa is None or traj.mass is None:
        raise ValueError("trajectory carries no stiffness/mass weights")
    e = traj.plant - traj.observer
    return 0.5 * traj.kappa * np.sum(e[:, 0::2] ** 2, axis=1) + \
        0.5 * traj.mass * np.sum(e[:, 1::2] ** 2, axis=1)


def _mode_errors(traj: Trajectory) -> np.ndarray:
    e = traj.plant - traj.observer
    return 0.5 * traj.kappa * e[:, 0::2] ** 2 + 0.5 * traj.mass * e[:, 1::2] ** 2


def integrate(model: ReducedModel, gain: ObserverGain | None, forcing, z0,
              zbar0=None, t_final: float = 20.0, dt: float | None = None,
              stride: int | None = None, sys: BeamSystem | None = None) -> Trajectory:
    """Fixed-step RK4 run of the plant, optionally coupled with its observer.

    ``forcing`` is a sequence of ForcingSignal, one per input channel
    (missing channels are treated as zero).  With a gain, the observer
    state starts at ``zbar0`` (zeros when None) and receives y = C z
    continuously.  Samples are stored every ``stride`` steps; the run is
    extended to a whole number of strides so the stored grid stays
    uniform.
    """
    if dt is None:
        dt = default_dt(model)
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if t_final < dt:
        raise ValueError("t_final must be at least one step")

    dim = model.state_dim
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (dim,):
        raise ValueError(f"z0 must have shape ({dim},)")

    n_inputs = model.n_inputs
    signals = list(forcing)
    if len(signals) > n_inputs:
        raise ValueError(f"got {len(signals)} forcing channels for {n_inputs} inputs")
    signals += [ForcingSignal.zero()] * (n_inputs - len(signals))

    if gain is not None:
        zbar = np.zeros(dim) if zbar0 is None else np.asarray(zbar0, dtype=float)
        if zbar.shape != (dim,):
            raise ValueError(f"zbar0 must have shape ({dim},)")
        # coupled matrix [[A, 0], [FC, A - FC]]; both halves see B u(t)
        fc = gain.f_matrix @ model.c_matrix
        drift = np.zeros((2 * dim, 2 * dim))
        drift[:dim, :dim] = model.a_matrix
        drift[dim:, :dim] = fc
        drift[dim:, dim:] = error_system(model, gain)
        input_map = np.vstack([model.b_matrix, model.b_matrix])
        state = np.concatenate([z0, zbar])
    else:
        if zbar0 is not None:
            raise ValueError("zbar0 given without an observer gain")
        drift = model.a_matrix
        input_map = model.b_matrix
        state = z0.copy()

    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    if stride is None:
        stride = max(1, math.ceil((n_steps + 1) / MAX_STORED_SAMPLES))
    elif stride < 1:
        raise ValueError("stride must be >= 1")
    stride = min(stride, n_steps)
    n_steps = stride * math.ceil(n_steps / stride)

    def u_at(t: float) -> np.ndarray:
        return np.array([sig(t) for sig in signals])

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        return drift @ x + input_map @ u_at(t)

    n_stored = n_steps // stride + 1
    stored = np.empty((n_stored, len(state)))
    stored[0] = state
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        t = (step - 1) * dt
        k1 = rhs(t, state)
        k2 = rhs(t + half, state + half * k1)
        k3 = rhs(t + half, state + half * k2)
        k4 = rhs(t + dt, state + dt * k3)
        state = state + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if step % stride == 0:
            if not np.all(np.isfinite(state)):
                raise SimulationError(f"non-finite state at t = {step * dt!r}")
            stored[step // stride] = state

    times = np.arange(n_stored) * (stride * dt)
    plant = stored[:, :dim]
    observer_states = stored[:, dim:] if gain is not None else None
    outputs = plant @ model.c_matrix.T

    kappa = sys.shaker_stiffness_kappa if sys is not None else None
    mass = sys.shaker_mass_m if sys is not None else None
    traj = Trajectory(
        times=times,
        plant=plant,
        observer=observer_states,
        outputs=outputs,
        err_weighted=None,
        lyapunov=None,
        mode_errors=None,
        kappa=kappa,
        mass=mass,
    )
    if observer_states is None:
        return traj

    lyap = lyapunov_value(plant - observer_states, model)
    err = weighted_error(traj) if kappa is not None else None
    per_mode = _mode_errors(traj) if kappa is not None else None
    return Trajectory(
        times=times,
        plant=plant,
        observer=observer_states,
        outputs=outputs,
        err_weighted=err,
        lyapunov=lyap,
        mode_errors=per_mode,
        kappa=kappa,
        mass=mass,
    )


def trajectory_header(traj: Trajectory) -> list[str]:
    n = traj.n_modes
    cols = ["t"]
    cols += [f"q_{j}" for j in range(1, n + 1)]
    cols += [f"p_{j}" for j in range(1, n + 1)]
    if traj.observer is not None:
        cols += [f"qhat_{j}" for j in range(1, n + 1)]
        cols += [f"phat_{j}" for j in range(1, n + 1)]
    cols += [f"y_{s}" for s in range(traj.outputs.shape[1])]
    if traj.observer is not None:
        cols += ["err_weighted", "lyapunov"]
        cols += [f"errmode_{j}" for j in range(1, n + 1)]
    return cols


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Persist a trajectory; floats carry 17 significant digits.

    Column order: t, q, p, (qhat, phat,) y, (err_weighted, lyapunov,
    errmode).  Observer columns appear only for observer runs.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(trajectory_header(traj))
        for i in range(traj.n_samples):
            row = [traj.times[i]]
            row += list(traj.plant[i, 0::2])
            row += list(traj.plant[i, 1::2])
            if traj.observer is not None:
                row += list(traj.observer[i, 0::2])
                row += list(traj.observer[i, 1::2])
            row += list(traj.outputs[i])
            if traj.observer is not None:
                row += [traj.err_weighted[i], traj.lyapunov[i]]
                row += list(traj.mode_errors[i])
            writer.writerow(format(v, ".17g") for v in row)
