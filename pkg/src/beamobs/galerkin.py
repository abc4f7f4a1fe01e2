"""Finite-dimensional state-space model projected onto N computed modes.

State ordering z = (q_1, p_1, ..., q_N, p_N).  The drift matrix is block
diagonal with per-mode oscillator blocks [[0, 1], [-lam_j, 0]]; inputs act
on the velocity rows, outputs read the position columns.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .model import ActuatorShape, BeamSystem
from .spectral import Mode, mode_eval

_GL8_NODES, _GL8_WEIGHTS = leggauss(8)
_GL16_NODES, _GL16_WEIGHTS = leggauss(16)


@dataclass(frozen=True)
class ReducedModel:
    """State-space triple (A, B, C) with per-mode metadata.

    A is 2N x 2N, B is 2N x (k+1) (column 0 is the point-force channel,
    the rest are actuator channels), C is (r+1) x 2N (row 0 is the
    attachment-point displacement, the rest are curvature sensors).
    """

    n_modes: int
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    c_matrix: np.ndarray
    lambdas: np.ndarray
    norms_h_sq: np.ndarray

    @property
    def state_dim(self) -> int:
        return 2 * self.n_modes

    @property
    def n_inputs(self) -> int:
        return self.b_matrix.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c_matrix.shape[0]


def assemble_A(lambdas) -> np.ndarray:
    """Block-diagonal drift matrix from the eigenvalue list."""
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas <= 0.0):
        raise ValueError("eigenvalues must be strictly positive")
    if len(np.unique(lambdas)) != len(lambdas):
        warnings.warn(
            "repeated eigenvalues: the reduced model is valid but cannot be "
            "observable from any output set",
            stacklevel=2,
        )
    n = len(lambdas)
    a = np.zeros((2 * n, 2 * n))
    for j, lam in enumerate(lambdas):
        a[2 * j, 2 * j + 1] = 1.0
        a[2 * j + 1, 2 * j] = -lam
    return a


def _piece_integral(piece, mode: Mode, nodes, weights) -> float:
    """Composite Gauss-Legendre integral of psi * W'' over one piece.

    The support rule keeps every piece strictly on one side of the
    attachment point, so W'' is smooth on the whole piece.  The piece is
    subdivided into panels no longer than ~1.5/mu; one order-8 panel per
    wavelength-and-a-half keeps the rule effectively exact for cubic psi
    (a single panel would lose digits once mu * width / 2 approaches pi).
    """
    n_panels = max(1, math.ceil(mode.mu * (piece.hi - piece.lo) / 1.5))
    edges = np.linspace(piece.lo, piece.hi, n_panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        xs = 0.5 * (hi + lo) + half * nodes
        psi = np.array([piece(x) for x in xs])
        wpp = mode_eval(mode, xs, 2)
        total += half * np.dot(weights, psi * wpp)
    return float(total)


def coupling_integral(shape: ActuatorShape, mode: Mode, *, check_quadrature: bool = False) -> float:
    """integral over the beam of psi(x) W''(x) dx for one actuator shape.

    Composite order-8 Gauss-Legendre per piece is exact to roundoff for
    cubic psi against the smooth mode curvature; ``check_quadrature``
    re-evaluates at order 16 and insists on relative agreement 1e-9.
    """
    total = sum(_piece_integral(p, mode, _GL8_NODES, _GL8_WEIGHTS) for p in shape.pieces)
    if check_quadrature:
        refined = sum(_piece_integral(p, mode, _GL16_NODES, _GL16_WEIGHTS) for p in shape.pieces)
        scale = max(abs(refined), mode.mu**2 * sum(p.hi - p.lo for p in shape.pieces) * 1e-3)
        if abs(total - refined) > 1e-9 * scale:
            raise ArithmeticError(
                f"quadrature refinement check failed: order 8 gives {total!r}, "
                f"order 16 gives {refined!r}"
            )
    return total


def assemble_B(modes: list[Mode], actuators, sys: BeamSystem, *,
               check_quadrature: bool = False) -> np.ndarray:
    """Input matrix: velocity row 2j holds (b_j0, ..., b_jk).

    b_j0 = W_j(l0) / norm_j for the point force; b_ji is the actuator
    coupling integral over norm_j.
    """
    n = len(modes)
    k = len(actuators)
    b = np.zeros((2 * n, k + 1))
    for j, mode in enumerate(modes):
        b[2 * j + 1, 0] = mode_eval(mode, sys.attach_l0) / mode.norm_h_sq
        for i, act in enumerate(actuators):
            b[2 * j + 1, i + 1] = (
                coupling_integral(act, mode, check_quadrature=check_quadrature)
                / mode.norm_h_sq
            )
    return b


def assemble_C(modes: list[Mode], sensor_positions, sys: BeamSystem) -> np.ndarray:
    """Output matrix: row 0 reads W_j(l0), row s reads W_j''(l_s)."""
    for pos in sensor_positions:
        if not 0.0 < pos < sys.length_l:
            raise ValueError(f"sensor position {pos} must lie strictly inside (0,l)")
    n = len(modes)
    r = len(sensor_positions)
    c = np.zeros((r + 1, 2 * n))
    for j, mode in enumerate(modes):
        c[0, 2 * j] = mode_eval(mode, sys.attach_l0)
        for s, pos in enumerate(sensor_positions, start=1):
            c[s, 2 * j] = mode_eval(mode, pos, 2)
    return c


def build_reduced_model(sys: BeamSystem, modes: list[Mode], *,
                        check_quadrature: bool = False) -> ReducedModel:
    """Assemble the full reduced model from computed modes."""
    lambdas = np.array([m.lam for m in modes])
    return ReducedModel(
        n_modes=len(modes),
        a_matrix=assemble_A(lambdas),
        b_matrix=assemble_B(modes, sys.actuators, sys, check_quadrature=check_quadrature),
        c_matrix=assemble_C(modes, sys.sensors, sys),
        lambdas=lambdas,
        norms_h_sq=np.array([m.norm_h_sq for m in modes]),
    )


def modal_energy(model: ReducedModel, z) -> np.ndarray:
    """Per-mode energy norm_j (p_j^2 + lam_j q_j^2) / 2; conserved when unforced."""
    z = np.asarray(z, dtype=float)
    q = z[..., 0::2]
    p = z[..., 1::2]
    return 0.5 * model.norms_h_sq * (p**2 + model.lambdas * q**2)


def total_energy(model: ReducedModel, z) -> float | np.ndarray:
    e = modal_energy(model, z).sum(axis=-1)
    return float(e) if np.ndim(e) == 0 else e
