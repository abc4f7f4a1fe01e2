"""Beam-with-attached-body modal analysis and observer design toolkit."""

from .model import (
    ActuatorShape,
    BeamSystem,
    ConfigError,
    PolynomialPiece,
    RunSettings,
    eval_shape,
    load_config,
    load_settings,
    save_config,
)
from .spectral import (
    DegenerateRootError,
    Mode,
    SolverError,
    char_det,
    compute_modes,
    eigenfunction,
    find_eigenvalues,
    inner_h,
    mode_eval,
)
from .galerkin import (
    ReducedModel,
    assemble_A,
    assemble_B,
    assemble_C,
    build_reduced_model,
)
from .observer import (
    ObservabilityReport,
    ObserverGain,
    error_system,
    lyapunov_rate,
    lyapunov_value,
    observability_report,
    synthesize_gain,
    vandermonde_det,
)
from .sim import (
    ForcingSignal,
    SimulationError,
    Trajectory,
    integrate,
    weighted_error,
    write_trajectory_csv,
)

__version__ = "0.1.0"
