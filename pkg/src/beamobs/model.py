"""Physical description of the plant and plain-text configuration I/O.

The plant is a uniform beam hinged at both ends, a point spring-mass body
(shaker) attached at an interior point, optional piecewise-polynomial
actuator patches, and optional strain sensors.  All quantities are SI:
lengths in m, Young's modulus in Pa, second moment of area in m^4, linear
density in kg/m, mass in kg, stiffness in N/m.

Configuration files are JSON with sections ``beam``, ``shaker``,
``actuators``, ``sensors``, ``simulation``, ``observer``.  Unknown keys
produce a warning, not an error.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """Configuration file failed to parse or violates a model invariant."""


def _require_number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class PolynomialPiece:
    """One interval [lo, hi] carrying a polynomial in the global coordinate x.

    ``coeffs`` are ascending powers, degree at most 3.
    """

    lo: float
    hi: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(f"piece interval [{self.lo}, {self.hi}] must have lo < hi")
        if not 1 <= len(self.coeffs) <= 4:
            raise ConfigError("piece needs 1 to 4 polynomial coefficients (degree <= 3)")

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


@dataclass(frozen=True)
class ActuatorShape:
    """Spatial influence function of one distributed actuator.

    The value is the listed polynomial on each piece and exactly 0
    elsewhere.  Pieces must be sorted and pairwise disjoint; whether their
    closures stay away from the beam ends and the attachment point is
    checked by BeamSystem, which knows the geometry.
    """

    pieces: tuple[PolynomialPiece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        for prev, cur in zip(self.pieces, self.pieces[1:]):
            if not prev.hi < cur.lo:
                raise ConfigError(
                    f"actuator pieces [{prev.lo}, {prev.hi}] and [{cur.lo}, {cur.hi}] "
                    "must be sorted and disjoint"
                )


def eval_shape(shape: ActuatorShape, x: float) -> float:
    """Evaluate an actuator shape at x; 0 outside the listed pieces."""
    for piece in shape.pieces:
        if piece.lo <= x <= piece.hi:
            return piece(x)
        if x < piece.lo:
            break
    return 0.0


@dataclass(frozen=True)
class BeamSystem:
    """Immutable description of the beam, the attached body and the I/O hardware."""

    length_l: float
    attach_l0: float
    young_E: float
    inertia_I: float
    density_rho: float
    shaker_mass_m: float
    shaker_stiffness_kappa: float
    actuators: tuple[ActuatorShape, ...] = ()
    sensors: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "actuators", tuple(self.actuators))
        object.__setattr__(self, "sensors", tuple(float(s) for s in self.sensors))
        if not self.length_l > 0.0:
            raise ConfigError("length_l must be positive")
        if not self.young_E > 0.0:
            raise ConfigError("young_E must be positive")
        if not self.inertia_I > 0.0:
            raise ConfigError("inertia_I must be positive")
        if not self.density_rho > 0.0:
            raise ConfigError("density_rho must be positive")
        if not 0.0 < self.attach_l0 < self.length_l:
            raise ConfigError("attach_l0 must lie strictly inside (0,l)")
        if not self.shaker_mass_m >= 0.0:
            raise ConfigError("shaker_mass_m must be non-negative")
        if not self.shaker_stiffness_kappa >= 0.0:
            raise ConfigError("shaker_stiffness_kappa must be non-negative")
        for s in self.sensors:
            if not 0.0 < s < self.length_l:
                raise ConfigError(f"sensor position {s} must lie strictly inside (0,l)")
        for i, act in enumerate(self.actuators):
            for piece in act.pieces:
                inside = 0.0 < piece.lo and piece.hi < self.length_l
                clears_attach = piece.hi < self.attach_l0 or piece.lo > self.attach_l0
                if not (inside and clears_attach):
                    raise ConfigError(
                        f"actuator {i} piece [{piece.lo}, {piece.hi}]: the support "
                        "closure must exclude the beam ends and the attachment "
                        "point (supp psi must avoid {0, attach_l0, length_l})"
                    )

    @property
    def flexural_rigidity(self) -> float:
        """EI, the bending stiffness in N*m^2."""
        return self.young_E * self.inertia_I

    @property
    def n_actuators(self) -> int:
        return len(self.actuators)

    @property
    def n_sensors(self) -> int:
        return len(self.sensors)


@dataclass(frozen=True)
class RunSettings:
    """Defaults for the pipeline, read from the optional config sections.

    CLI flags override these.  ``dt`` / ``t_final`` of None mean "use the
    integrator's rule".  Forcing entries are kept as plain dicts; the sim
    module turns them into ForcingSignal values.
    """

    modes: int = 6
    t_final: float | None = None
    dt: float | None = None
    gammas: tuple[float, ...] | None = None
    forcing: tuple[dict, ...] = ()
    initial_q: tuple[float, ...] = ()
    initial_p: tuple[float, ...] = ()
    initial_observer: tuple[float, ...] | None = None


_TOP_KEYS = {"beam", "shaker", "actuators", "sensors", "simulation", "observer"}
_BEAM_KEYS = ("length", "young_modulus", "second_moment", "linear_density")
_SHAKER_KEYS = ("position", "mass", "stiffness")
_SIM_KEYS = {"modes", "t_final", "dt", "forcing", "initial_q", "initial_p", "initial_observer"}
_OBS_KEYS = {"gamma"}


def _warn_unknown(mapping: dict, known: set, where: str):
    for key in mapping:
        if key not in known:
            warnings.warn(f"unknown config key {where}.{key} ignored", stacklevel=3)


def _section(data: dict, name: str, required: bool) -> dict:
    sec = data.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"config section '{name}' is required")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"config section '{name}' must be an object")
    return sec


def _parse_actuator(entry, index: int) -> ActuatorShape:
    if not isinstance(entry, dict):
        raise ConfigError(f"actuators[{index}] must be an object with a 'pieces' list")
    _warn_unknown(entry, {"pieces"}, f"actuators[{index}]")
    pieces_raw = entry.get("pieces")
    if not isinstance(pieces_raw, list):
        raise ConfigError(f"actuators[{index}].pieces must be a list")
    pieces = []
    for j, p in enumerate(pieces_raw):
        if not isinstance(p, dict):
            raise ConfigError(f"actuators[{index}].pieces[{j}] must be an object")
        _warn_unknown(p, {"span", "coeffs"}, f"actuators[{index}].pieces[{j}]")
        span = p.get("span")
        coeffs = p.get("coeffs")
        if not (isinstance(span, list) and len(span) == 2):
            raise ConfigError(f"actuators[{index}].pieces[{j}].span must be [lo, hi]")
        if not (isinstance(coeffs, list) and coeffs):
            raise ConfigError(f"actuators[{index}].pieces[{j}].coeffs must be a non-empty list")
        lo = _require_number(span[0], f"actuators[{index}].pieces[{j}].span[0]")
        hi = _require_number(span[1], f"actuators[{index}].pieces[{j}].span[1]")
        cs = tuple(
            _require_number(c, f"actuators[{index}].pieces[{j}].coeffs[{k}]")
            for k, c in enumerate(coeffs)
        )
        pieces.append(PolynomialPiece(lo, hi, cs))
    return ActuatorShape(tuple(pieces))


def _broadcast(value, n: int, name: str) -> tuple[float, ...]:
    if isinstance(value, list):
        out = tuple(_require_number(v, f"{name}[{i}]") for i, v in enumerate(value))
        if len(out) != n:
            raise ConfigError(f"{name} must have {n} entries, got {len(out)}")
        return out
    return (_require_number(value, name),) * n


def load_settings(path) -> tuple[BeamSystem, RunSettings]:
    """Parse a config file into the plant description plus run defaults."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    _warn_unknown(data, _TOP_KEYS, "config")

    beam = _section(data, "beam", required=True)
    shaker = _section(data, "shaker", required=True)
    _warn_unknown(beam, _BEAM_KEYS, "beam")
    _warn_unknown(shaker, _SHAKER_KEYS, "shaker")
    for key in _BEAM_KEYS:
        if key not in beam:
            raise ConfigError(f"beam.{key} is required")
    for key in _SHAKER_KEYS:
        if key not in shaker:
            raise ConfigError(f"shaker.{key} is required")

    actuators_raw = data.get("actuators", [])
    if not isinstance(actuators_raw, list):
        raise ConfigError("actuators must be a list")
    sensors_raw = data.get("sensors", [])
    if not isinstance(sensors_raw, list):
        raise ConfigError("sensors must be a list")

    system = BeamSystem(
        length_l=_require_number(beam["length"], "beam.length"),
        attach_l0=_require_number(shaker["position"], "shaker.position"),
        young_E=_require_number(beam["young_modulus"], "beam.young_modulus"),
        inertia_I=_require_number(beam["second_moment"], "beam.second_moment"),
        density_rho=_require_number(beam["linear_density"], "beam.linear_density"),
        shaker_mass_m=_require_number(shaker["mass"], "shaker.mass"),
        shaker_stiffness_kappa=_require_number(shaker["stiffness"], "shaker.stiffness"),
        actuators=tuple(_parse_actuator(a, i) for i, a in enumerate(actuators_raw)),
        sensors=tuple(_require_number(s, f"sensors[{i}]") for i, s in enumerate(sensors_raw)),
    )

    sim = _section(data, "simulation", required=False)
    obs = _section(data, "observer", required=False)
    _warn_unknown(sim, _SIM_KEYS, "simulation")
    _warn_unknown(obs, _OBS_KEYS, "observer")

    modes = sim.get("modes", 6)
    if isinstance(modes, bool) or not isinstance(modes, int) or modes < 1:
        raise ConfigError("simulation.modes must be a positive integer")

    t_final = sim.get("t_final")
    if t_final is not None:
        t_final = _require_number(t_final, "simulation.t_final")
    dt = sim.get("dt")
    if dt is not None:
        dt = _require_number(dt, "simulation.dt")

    forcing_raw = sim.get("forcing", [])
    if not isinstance(forcing_raw, list):
        raise ConfigError("simulation.forcing must be a list")
    for i, entry in enumerate(forcing_raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"simulation.forcing[{i}] must be an object")

    gammas = None
    if "gamma" in obs:
        raw = obs["gamma"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("observer.gamma must be a non-empty list")
        gammas = tuple(_require_number(g, f"observer.gamma[{i}]") for i, g in enumerate(raw))

    initial_q = _broadcast(sim.get("initial_q", 0.0), modes, "simulation.initial_q")
    initial_p = _broadcast(sim.get("initial_p", 0.0), modes, "simulation.initial_p")
    initial_observer = None
    if sim.get("initial_observer") is not None:
        raw = sim["initial_observer"]
        if not isinstance(raw, list) or len(raw) != 2 * modes:
            raise ConfigError("simulation.initial_observer must be a list of 2*modes entries")
        initial_observer = tuple(
            _require_number(v, f"simulation.initial_observer[{i}]") for i, v in enumerate(raw)
        )

    settings = RunSettings(
        modes=modes,
        t_final=t_final,
        dt=dt,
        gammas=gammas,
        forcing=tuple(forcing_raw),
        initial_q=initial_q,
        initial_p=initial_p,
        initial_observer=initial_observer,
    )
    return system, settings


def load_config(path) -> BeamSystem:
    """Read a configuration file and return the validated BeamSystem."""
    system, _ = load_settings(path)
    return system


def save_config(system: BeamSystem, path, *, simulation: dict | None = None,
                observer: dict | None = None) -> None:
    """Write a config file that loads back to an equal BeamSystem."""
    data = {
        "beam": {
            "length": system.length_l,
            "young_modulus": system.young_E,
            "second_moment": system.inertia_I,
            "linear_density": system.density_rho,
        },
        "shaker": {
            "position": system.attach_l0,
            "mass": system.shaker_mass_m,
            "stiffness": system.shaker_stiffness_kappa,
        },
        "actuators": [
            {"pieces": [{"span": [p.lo, p.hi], "coeffs": list(p.coeffs)} for p in act.pieces]}
            for act in system.actuators
        ],
        "sensors": list(system.sensors),
    }
    if simulation is not None:
        data["simulation"] = simulation
    if observer is not None:
        data["observer"] = observer
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
