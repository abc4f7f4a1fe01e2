"""Command-line pipeline: config -> spectrum -> model -> observer -> simulation.

Exit codes are stable API: 0 success (or observable), 1 negative verdict,
2 usage or validation error, 3 numeric solver failure.  Every run that
writes an output file also writes a manifest next to it; re-running from
the manifest reproduces the outputs bit for bit.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys as _sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .galerkin import build_reduced_model
from .model import ConfigError, load_settings
from .observer import observability_report, synthesize_gain
from .sim import ForcingSignal, SimulationError, default_dt, integrate, write_trajectory_csv
from .spectral import SolverError, compute_modes, mode_eval

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_SPECTRUM_COLUMNS = ["mode_index", "lambda", "mu", "frequency_hz", "norm_h_sq", "W_at_l0"]


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI run byte for byte."""

    subcommand: str
    config_path: str
    config_sha256: str
    toolkit_version: str
    parameters: dict

    def write(self, out_path: Path) -> Path:
        manifest_path = Path(str(out_path) + ".manifest.json")
        manifest_path.write_text(json.dumps(asdict(self), indent=2) + "\n", encoding="utf-8")
        return manifest_path

    @classmethod
    def read(cls, path) -> "RunManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**data)


def _config_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _default_out(name: str) -> Path:
    return Path(os.environ.get("BEAMOBS_SEED_DIR", ".")) / name


def _parse_gammas(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"invalid --gamma list {text!r}") from exc


def _spectrum_rows(system, modes):
    rows = []
    for j, mode in enumerate(modes, start=1):
        rows.append([
            j,
            mode.lam,
            mode.mu,
            math.sqrt(mode.lam) / (2.0 * math.pi),
            mode.norm_h_sq,
            mode_eval(mode, system.attach_l0),
        ])
    return rows


def cmd_spectrum(args) -> int:
    system, settings = load_settings(args.config)
    n = args.modes if args.modes is not None else settings.modes
    if n < 1:
        print("error: --modes must be a positive integer", file=_sys.stderr)
        return EXIT_USAGE
    modes = compute_modes(system, n)
    rows = _spectrum_rows(system, modes)

    if args.json:
        payload = [dict(zip(_SPECTRUM_COLUMNS, row)) for row in rows]
        print(json.dumps(payload, indent=2))
    else:
        header = f"{'mode':>4} {'lambda':>16} {'mu':>12} {'freq_hz':>10} {'norm_h_sq':>12} {'W(l0)':>10}"
        print(header)
        for row in rows:
            print(f"{row[0]:>4} {row[1]:>16.8g} {row[2]:>12.8g} "
                  f"{row[3]:>10.5g} {row[4]:>12.6g} {row[5]:>10.6g}")
    if args.out:
        out = Path(args.out)
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(_SPECTRUM_COLUMNS)
            for row in rows:
                writer.writerow([row[0]] + [format(v, ".17g") for v in row[1:]])
        _manifest(args, "spectrum", {"modes": n, "out": str(out)}).write(out)
    return EXIT_OK


def cmd_assemble(args) -> int:
    system, settings = load_settings(args.config)
    n = args.modes if args.modes is not None else settings.modes
    if n < 1:
        print("error: --modes must be a positive integer", file=_sys.stderr)
        return EXIT_USAGE
    modes = compute_modes(system, n)
    model = build_reduced_model(system, modes)
    bundle = {
        "n_modes": model.n_modes,
        "n_inputs": model.n_inputs,
        "n_outputs": model.n_outputs,
        "lambdas": model.lambdas.tolist(),
        "norms_h_sq": model.norms_h_sq.tolist(),
        "frequencies_hz": [math.sqrt(l) / (2 * math.pi) for l in model.lambdas],
        "a_matrix": model.a_matrix.tolist(),
        "b_matrix": model.b_matrix.tolist(),
        "c_matrix": model.c_matrix.tolist(),
    }
    text = json.dumps(bundle, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        _manifest(args, "assemble", {"modes": n, "out": str(out)}).write(out)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_check_obsv(args) -> int:
    system, settings = load_settings(args.config)
    n = args.modes if args.modes is not None else settings.modes
    if n < 1:
        print("error: --modes must be a positive integer", file=_sys.stderr)
        return EXIT_USAGE
    modes = compute_modes(system, n)
    model = build_reduced_model(system, modes)
    report = observability_report(model)
    if args.json:
        payload = {
            "rank": report.rank,
            "state_dim": model.state_dim,
            "observable": report.observable,
            "distinct_lambdas": report.distinct_lambdas,
            "mode_coverage": [list(c) for c in report.mode_coverage],
            "vandermonde_dets": list(report.vandermonde_dets)
            if report.vandermonde_dets is not None else None,
            "singular_values": report.singular_values.tolist(),
        }
        print(json.dumps(payload, indent=2))
    else:
        for line in report.summary_lines():
            print(line)
    return EXIT_OK if report.observable else EXIT_NEGATIVE


def cmd_simulate(args) -> int:
    system, settings = load_settings(args.config)
    n = args.modes if args.modes is not None else settings.modes
    if n < 1:
        print("error: --modes must be a positive integer", file=_sys.stderr)
        return EXIT_USAGE

    modes = compute_modes(system, n)
    model = build_reduced_model(system, modes)
    t_final = args.t_final if args.t_final is not None else (settings.t_final or 20.0)
    dt = args.dt if args.dt is not None else (settings.dt or default_dt(model))
    if dt <= 0.0 or t_final < dt:
        print("error: need dt > 0 and t_final >= dt", file=_sys.stderr)
        return EXIT_USAGE

    forcing = [ForcingSignal.from_spec(spec) for spec in settings.forcing]

    z0 = np.zeros(model.state_dim)
    if settings.initial_q:
        z0[0::2] = settings.initial_q
    if settings.initial_p:
        z0[1::2] = settings.initial_p

    gain = None
    gammas: list[float] = []
    if not args.no_observer:
        if args.gamma is not None:
            gammas = _parse_gammas(args.gamma)
        elif settings.gammas is not None:
            gammas = list(settings.gammas)
        else:
            gammas = [1.0] * model.n_outputs
        if len(gammas) != model.n_outputs or any(g <= 0.0 for g in gammas):
            print(f"error: need {model.n_outputs} strictly positive gamma value(s)",
                  file=_sys.stderr)
            return EXIT_USAGE
        report = observability_report(model)
        if not report.observable and not args.force:
            print(f"model is not observable (rank {report.rank} of {model.state_dim}); "
                  "pass --force to run the observer anyway", file=_sys.stderr)
            return EXIT_NEGATIVE
        import warnings

        with warnings.catch_warnings():
            if args.force:
                warnings.simplefilter("ignore")
            gain = synthesize_gain(model, gammas)

    zbar0 = None
    if gain is not None and settings.initial_observer is not None:
        zbar0 = np.asarray(settings.initial_observer, dtype=float)

    traj = integrate(model, gain, forcing, z0, zbar0,
                     t_final=t_final, dt=dt, sys=system)

    out = Path(args.out) if args.out else _default_out("trajectory.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out)
    _manifest(args, "simulate", {
        "modes": n,
        "t_final": t_final,
        "dt": dt,
        "gammas": gammas if gain is not None else None,
        "no_observer": bool(args.no_observer),
        "force": bool(args.force),
        "out": str(out),
    }).write(out)
    print(f"wrote {traj.n_samples} samples to {out}")
    return EXIT_OK


def _manifest(args, subcommand: str, parameters: dict) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        config_path=str(args.config),
        config_sha256=_config_hash(args.config),
        toolkit_version=__version__,
        parameters=parameters,
    )


def run_from_manifest(path) -> int:
    """Re-execute a recorded run; the config file must be unchanged."""
    manifest = RunManifest.read(path)
    if _config_hash(manifest.config_path) != manifest.config_sha256:
        print("error: config file changed since the manifest was written",
              file=_sys.stderr)
        return EXIT_USAGE
    params = manifest.parameters
    argv = [manifest.subcommand, "--config", manifest.config_path]
    if params.get("modes") is not None:
        argv += ["--modes", str(params["modes"])]
    if manifest.subcommand == "simulate":
        argv += ["--t-final", repr(params["t_final"]), "--dt", repr(params["dt"])]
        if params.get("no_observer"):
            argv += ["--no-observer"]
        elif params.get("gammas"):
            argv += ["--gamma", ",".join(repr(g) for g in params["gammas"])]
        if params.get("force"):
            argv += ["--force"]
    if params.get("out"):
        argv += ["--out", params["out"]]
    return main(argv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamobs",
        description="Modal analysis, observability checks and observer "
                    "simulation for a hinged beam with an attached body",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument("--modes", type=int, default=None, help="number of retained modes")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--out", default=None, help="output file path")

    p_spec = sub.add_parser("spectrum", help="eigenvalue/eigenfunction table")
    add_common(p_spec)
    p_spec.set_defaults(func=cmd_spectrum)

    p_asm = sub.add_parser("assemble", help="dump the reduced state-space model")
    add_common(p_asm)
    p_asm.set_defaults(func=cmd_assemble)

    p_obs = sub.add_parser("check-obsv", help="observability report")
    add_common(p_obs)
    p_obs.set_defaults(func=cmd_check_obsv)

    p_sim = sub.add_parser("simulate", help="integrate plant and observer, write CSV")
    add_common(p_sim)
    p_sim.add_argument("--gamma", default=None,
                       help="comma-separated per-output observer gains")
    p_sim.add_argument("--t-final", type=float, default=None, dest="t_final")
    p_sim.add_argument("--dt", type=float, default=None)
    p_sim.add_argument("--no-observer", action="store_true", dest="no_observer",
                       help="plant-only run")
    p_sim.add_argument("--force", action="store_true",
                       help="run the observer even if the model is unobservable")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except (SolverError, SimulationError) as exc:
        print(f"numeric failure: {exc}", file=_sys.stderr)
        return EXIT_NUMERIC


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
