"""Eigenvalue problem of the hinged beam with an attached spring-mass body.

Separation of variables with a two-segment sin/sinh ansatz

    W(x) = C1 sin(mu x)     + C2 sinh(mu x),        x <= l0,
    W(x) = B1 sin(mu (x-l)) + B2 sinh(mu (x-l)),    x >  l0,

satisfies the hinged end conditions identically; matching W, W', W'' and
the third-derivative jump (kappa - lambda m)/EI * W(l0) at the attachment
point gives a homogeneous 4x4 system in (C1, C2, B1, B2).  Eigenvalues are
the parameter values where its determinant vanishes.

Numerics notes:

* The sinh/cosh columns of the 4x4 matrix are rescaled by 1/cosh of their
  arguments before taking the determinant.  The factors are positive, so
  the zero set is unchanged, and the entries stay bounded where raw sinh
  would overflow (mu*l beyond ~700).
* Roots are located by a sign-change scan in mu (step pi/(200 l)) and
  refined by bisection to relative width 1e-12.
* Inner products and bending-energy integrals use closed-form
  antiderivatives of sin/sinh products, never quadrature, so orthogonality
  checks are meaningful at tight tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BeamSystem

# Relative tolerance for the continuity / interface residuals of a
# constructed eigenfunction.  Null-space extraction at double precision
# delivers ~1e-10; the slack leaves headroom at large mu.
TAU_C = 1e-7

# Singular values below this fraction of the largest one count as zero
# when extracting the eigenfunction coefficients.
_NULLSPACE_TOL = 1e-6

_SCAN_POINTS_PER_SPACING = 200
_BISECT_REL_WIDTH = 1e-12
_BISECT_MAX_ITER = 200
_NORMALIZATION_GRID = 2001


class SolverError(RuntimeError):
    """Root finding or eigenfunction construction failed."""


class DegenerateRootError(SolverError):
    """The 4x4 interface system has a (numerically) two-dimensional null space."""


@dataclass(frozen=True)
class Mode:
    """One eigenpair of the beam-body system.

    ``lam`` is the eigenvalue (1/s^2), ``mu`` the wavenumber (1/m) with
    lam = mu^4 EI / rho.  The four amplitudes refer to the two-segment
    sin/sinh form; ``norm_h_sq`` is the mass-weighted norm
    integral(rho W^2) + m W(l0)^2 for this coefficient choice.  The
    geometry is carried along so the mode can be evaluated on its own.
    """

    lam: float
    mu: float
    coeff_c1: float
    coeff_c2: float
    coeff_b1: float
    coeff_b2: float
    norm_h_sq: float
    attach_l0: float
    length_l: float


def _check_system_mu(mu) -> None:
    if np.any(np.asarray(mu) <= 0.0):
        raise ValueError("mu must be strictly positive")


def _system_matrix(mu, sys: BeamSystem) -> np.ndarray:
    """Rescaled 4x4 interface matrix, vectorized over mu (shape (..., 4, 4)).

    Columns 2 and 4 (the sinh amplitudes) are divided by cosh of their
    arguments, turning sinh into tanh and cosh into 1.
    """
    mu = np.asarray(mu, dtype=float)
    ei = sys.flexural_rigidity
    lam = mu**4 * ei / sys.density_rho
    beta = (sys.shaker_stiffness_kappa - sys.shaker_mass_m * lam) / (ei * mu**3)

    d0 = mu * sys.attach_l0
    d1 = mu * (sys.attach_l0 - sys.length_l)
    s0, c0, t0 = np.sin(d0), np.cos(d0), np.tanh(d0)
    s1, c1, t1 = np.sin(d1), np.cos(d1), np.tanh(d1)
    one = np.ones_like(mu)

    rows = [
        [s0, -t0, -s1, t1],
        [s0, t0, -s1, -t1],
        [c0, one, -c1, -one],
        [c0 + beta * s0, beta * t0 - one, -c1, one],
    ]
    mat = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
    return mat


def char_det(mu, sys: BeamSystem):
    """Rescaled characteristic determinant; same zero set as the raw one.

    Accepts a scalar or an array of wavenumbers.  Finite for mu*l well
    beyond 200 thanks to the column rescaling.
    """
    _check_system_mu(mu)
    det = np.linalg.det(_system_matrix(mu, sys))
    if np.isscalar(mu) or np.asarray(mu).ndim == 0:
        return float(det)
    return det


def lambda_from_mu(mu: float, sys: BeamSystem) -> float:
    return mu**4 * sys.flexural_rigidity / sys.density_rho


def mu_from_lambda(lam: float, sys: BeamSystem) -> float:
    return (lam * sys.density_rho / sys.flexural_rigidity) ** 0.25


def _bisect_root(f, a: float, b: float, fa: float, fb: float) -> float:
    """Refine a sign-change bracket to relative width 1e-12."""
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (a + b)
        if (b - a) <= _BISECT_REL_WIDTH * mid:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fa * fm < 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    raise SolverError(
        f"bisection did not reach relative width {_BISECT_REL_WIDTH:g} "
        f"within {_BISECT_MAX_ITER} iterations on bracket ({a!r}, {b!r})"
    )


def find_eigenvalues(sys: BeamSystem, count_n: int) -> list[tuple[float, float]]:
    """Locate the count_n smallest positive eigenvalues.

    Returns [(lam_1, mu_1), ...] sorted increasingly, each mu refined to
    relative tolerance 1e-12.  The scan window is mu in
    (1e-6/l, (count_n + 4) pi / l]; hinged roots are spaced pi/l apart and
    the attached body perturbs them by less than one spacing, so the +4
    margin covers clustering near the stiffness/inertia crossover.
    """
    if count_n < 1:
        raise ValueError("count_n must be >= 1")
    length = sys.length_l
    mu_lo = 1e-6 / length
    mu_hi = (count_n + 4) * math.pi / length
    n_grid = (count_n + 4) * _SCAN_POINTS_PER_SPACING + 1
    grid = np.linspace(mu_lo, mu_hi, n_grid)
    vals = char_det(grid, sys)

    def f(mu):
        return char_det(float(mu), sys)

    roots: list[float] = []
    for i in range(n_grid - 1):
        if len(roots) == count_n:
            break
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            if not roots or abs(roots[-1] - a) > 1e-12 * a:
                roots.append(float(a))
            continue
        if fa * fb < 0.0:
            roots.append(_bisect_root(f, float(a), float(b), float(fa), float(fb)))
    if len(roots) < count_n:
        raise SolverError(
            f"found only {len(roots)} of {count_n} eigenvalues scanning "
            f"mu in ({mu_lo:g}, {mu_hi:g}); widen the window or check the parameters"
        )
    return [(lambda_from_mu(mu, sys), mu) for mu in roots]


def _segment_eval(mu, amp_sin, amp_sinh, offset, x, order: int):
    """Derivative of amp_sin*sin(mu(x-off)) + amp_sinh*sinh(mu(x-off))."""
    u = mu * (np.asarray(x, dtype=float) - offset)
    scale = mu**order
    if order == 0:
        return amp_sin * np.sin(u) + amp_sinh * np.sinh(u)
    if order == 1:
        return scale * (amp_sin * np.cos(u) + amp_sinh * np.cosh(u))
    if order == 2:
        return scale * (-amp_sin * np.sin(u) + amp_sinh * np.sinh(u))
    if order == 3:
        return scale * (-amp_sin * np.cos(u) + amp_sinh * np.cosh(u))
    raise ValueError("derivative order must be 0, 1, 2 or 3")


def mode_eval(mode: Mode, x, derivative_order: int = 0, side: str | None = None):
    """Evaluate W or one of its first three spatial derivatives.

    W, W' and W'' are continuous, so the segment choice at the attachment
    point is immaterial for orders 0-2 (the left form is used).  W''' jumps
    there; order-3 evaluation at exactly x = l0 needs side="left" or
    side="right".
    """
    if derivative_order not in (0, 1, 2, 3):
        raise ValueError("derivative order must be 0, 1, 2 or 3")
    if side not in (None, "left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    xs = np.asarray(x, dtype=float)
    at_join = xs == mode.attach_l0
    if derivative_order == 3 and side is None and np.any(at_join):
        raise ValueError(
            "third derivative is discontinuous at the attachment point; "
            "pass side='left' or side='right'"
        )
    if side == "right":
        use_left = xs < mode.attach_l0
    else:
        use_left = xs <= mode.attach_l0
    left = _segment_eval(mode.mu, mode.coeff_c1, mode.coeff_c2, 0.0, xs, derivative_order)
    right = _segment_eval(
        mode.mu, mode.coeff_b1, mode.coeff_b2, mode.length_l, xs, derivative_order
    )
    out = np.where(use_left, left, right)
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(out)
    return out


def eigenfunction(sys: BeamSystem, lam: float) -> Mode:
    """Construct the eigenfunction for a located eigenvalue.

    The coefficient vector spans the null space of the rescaled interface
    matrix; the result is normalized so that max |W| over a 2001-point
    uniform grid equals 1 and the sign convention W'(0) > 0 holds.
    Raises SolverError if lam is not actually a root, and
    DegenerateRootError if two singular values vanish at once.
    """
    mu = mu_from_lambda(lam, sys)
    mat = _system_matrix(mu, sys)
    _, svals, vt = np.linalg.svd(mat)
    if svals[3] > _NULLSPACE_TOL * svals[0]:
        raise SolverError(
            f"lambda={lam!r} is not an eigenvalue: smallest singular value "
            f"{svals[3]:.3e} exceeds {_NULLSPACE_TOL:g} x {svals[0]:.3e}"
        )
    if svals[2] <= _NULLSPACE_TOL * svals[0]:
        raise DegenerateRootError(
            f"two-dimensional null space at lambda={lam!r}; the root appears "
            "degenerate and no eigenfunction basis is selected automatically"
        )
    v = vt[3]
    d0 = mu * sys.attach_l0
    d1 = mu * (sys.attach_l0 - sys.length_l)
    # undo the column rescaling of the interface matrix
    c1, c2 = v[0], v[1] / math.cosh(d0)
    b1, b2 = v[2], v[3] / math.cosh(d1)

    xs = np.linspace(0.0, sys.length_l, _NORMALIZATION_GRID)
    left = xs <= sys.attach_l0
    w = np.where(
        left,
        _segment_eval(mu, c1, c2, 0.0, xs, 0),
        _segment_eval(mu, b1, b2, sys.length_l, xs, 0),
    )
    peak = float(np.max(np.abs(w)))
    if peak == 0.0:
        raise SolverError(f"null vector at lambda={lam!r} evaluates to the zero shape")
    c1, c2, b1, b2 = c1 / peak, c2 / peak, b1 / peak, b2 / peak

    slope0 = mu * (c1 + c2)
    if slope0 < 0.0 or (slope0 == 0.0 and w[int(np.argmax(np.abs(w)))] < 0.0):
        c1, c2, b1, b2 = -c1, -c2, -b1, -b2

    mode = Mode(
        lam=float(lam),
        mu=float(mu),
        coeff_c1=float(c1),
        coeff_c2=float(c2),
        coeff_b1=float(b1),
        coeff_b2=float(b2),
        norm_h_sq=math.nan,
        attach_l0=sys.attach_l0,
        length_l=sys.length_l,
    )
    _check_mode_consistency(mode, sys)
    norm = inner_h(mode, mode, sys)
    if not norm > 0.0:
        raise SolverError(f"non-positive mode norm {norm!r} at lambda={lam!r}")
    return Mode(
        lam=mode.lam,
        mu=mode.mu,
        coeff_c1=mode.coeff_c1,
        coeff_c2=mode.coeff_c2,
        coeff_b1=mode.coeff_b1,
        coeff_b2=mode.coeff_b2,
        norm_h_sq=float(norm),
        attach_l0=sys.attach_l0,
        length_l=sys.length_l,
    )


def _check_mode_consistency(mode: Mode, sys: BeamSystem) -> None:
    """Continuity at l0 for W, W', W'' and the third-derivative jump."""
    l0 = sys.attach_l0
    mu = mode.mu
    for order in (0, 1, 2):
        lhs = _segment_eval(mu, mode.coeff_c1, mode.coeff_c2, 0.0, l0, order)
        rhs = _segment_eval(mu, mode.coeff_b1, mode.coeff_b2, mode.length_l, l0, order)
        if abs(lhs - rhs) > TAU_C * mu**order:
            raise SolverError(
                f"order-{order} continuity residual {abs(lhs - rhs):.3e} at the "
                f"attachment point exceeds tolerance; lambda={mode.lam!r}"
            )
    jump = mode_eval(mode, l0, 3, side="left") - mode_eval(mode, l0, 3, side="right")
    expected = (
        (sys.shaker_stiffness_kappa - mode.lam * sys.shaker_mass_m)
        / sys.flexural_rigidity
        * mode_eval(mode, l0, 0)
    )
    if abs(jump - expected) > TAU_C * mu**3:
        raise SolverError(
            f"interface jump residual {abs(jump - expected):.3e} exceeds tolerance; "
            f"lambda={mode.lam!r}"
        )


def compute_modes(sys: BeamSystem, count_n: int) -> list[Mode]:
    """find_eigenvalues + eigenfunction for each root."""
    return [eigenfunction(sys, lam) for lam, _ in find_eigenvalues(sys, count_n)]


# ---------------------------------------------------------------------------
# closed-form integrals of sin/sinh products
# ---------------------------------------------------------------------------

_EQUAL_FREQ_RTOL = 1e-9


def _basis_integral(kind_f: str, p: float, a: float,
                    kind_g: str, q: float, b: float,
                    x0: float, x1: float) -> float:
    """integral over [x0, x1] of f(x) g(x) where f, g are sin or sinh
    of p(x-a) and q(x-b).  Exact antiderivatives, no quadrature."""
    if kind_f != kind_g:
        if kind_f == "sinh":  # product is symmetric; put the circular factor first
            kind_f, p, a, kind_g, q, b = kind_g, q, b, kind_f, p, a
        den = p * p + q * q

        def anti(x):
            return (
                q * math.sin(p * (x - a)) * math.cosh(q * (x - b))
                - p * math.cos(p * (x - a)) * math.sinh(q * (x - b))
            ) / den

        return anti(x1) - anti(x0)

    if abs(p - q) > _EQUAL_FREQ_RTOL * max(p, q):
        if kind_f == "sin":
            den = q * q - p * p

            def anti(x):
                return (
                    p * math.cos(p * (x - a)) * math.sin(q * (x - b))
                    - q * math.sin(p * (x - a)) * math.cos(q * (x - b))
                ) / den

        else:
            den = p * p - q * q

            def anti(x):
                return (
                    p * math.cosh(p * (x - a)) * math.sinh(q * (x - b))
                    - q * math.sinh(p * (x - a)) * math.cosh(q * (x - b))
                ) / den

        return anti(x1) - anti(x0)

    # coincident frequencies (the self-product case)
    pm = 0.5 * (p + q)
    if kind_f == "sin":

        def anti(x):
            return 0.5 * (math.cos(pm * (b - a)) * x - math.sin(pm * (2 * x - a - b)) / (2 * pm))

    else:

        def anti(x):
            return 0.5 * (math.sinh(pm * (2 * x - a - b)) / (2 * pm) - math.cosh(pm * (b - a)) * x)

    return anti(x1) - anti(x0)


def _segment_product_integral(mu_i, amps_i, off_i, mu_j, amps_j, off_j, x0, x1) -> float:
    """integral of (amps_i . basis(mu_i, x-off_i)) (amps_j . basis(mu_j, x-off_j))."""
    total = 0.0
    for amp_f, kind_f in ((amps_i[0], "sin"), (amps_i[1], "sinh")):
        if amp_f == 0.0:
            continue
        for amp_g, kind_g in ((amps_j[0], "sin"), (amps_j[1], "sinh")):
            if amp_g == 0.0:
                continue
            total += amp_f * amp_g * _basis_integral(
                kind_f, mu_i, off_i, kind_g, mu_j, off_j, x0, x1
            )
    return total


def _pair_integral(mode_i: Mode, mode_j: Mode, sys: BeamSystem, order: int) -> float:
    """integral over [0, l] of d^order W_i * d^order W_j, split at l0.

    Only even orders appear (0 for mass terms, 2 for bending energy,
    and order 4 reduces to mu^4 times order 0).
    """
    if order == 0:
        amps_left_i = (mode_i.coeff_c1, mode_i.coeff_c2)
        amps_right_i = (mode_i.coeff_b1, mode_i.coeff_b2)
        amps_left_j = (mode_j.coeff_c1, mode_j.coeff_c2)
        amps_right_j = (mode_j.coeff_b1, mode_j.coeff_b2)
    elif order == 2:
        si, sj = mode_i.mu**2, mode_j.mu**2
        amps_left_i = (-mode_i.coeff_c1 * si, mode_i.coeff_c2 * si)
        amps_right_i = (-mode_i.coeff_b1 * si, mode_i.coeff_b2 * si)
        amps_left_j = (-mode_j.coeff_c1 * sj, mode_j.coeff_c2 * sj)
        amps_right_j = (-mode_j.coeff_b1 * sj, mode_j.coeff_b2 * sj)
    else:
        raise ValueError("only orders 0 and 2 are integrated directly")
    l0, length = sys.attach_l0, sys.length_l
    left = _segment_product_integral(
        mode_i.mu, amps_left_i, 0.0, mode_j.mu, amps_left_j, 0.0, 0.0, l0
    )
    right = _segment_product_integral(
        mode_i.mu, amps_right_i, length, mode_j.mu, amps_right_j, length, l0, length
    )
    return left + right


def inner_h(mode_i: Mode, mode_j: Mode, sys: BeamSystem) -> float:
    """Mass-weighted inner product integral(rho W_i W_j) + m W_i(l0) W_j(l0).

    Distinct modes are orthogonal in this product; the self-value is the
    mode's norm_h_sq.
    """
    mass_term = (
        sys.shaker_mass_m
        * mode_eval(mode_i, sys.attach_l0)
        * mode_eval(mode_j, sys.attach_l0)
    )
    return sys.density_rho * _pair_integral(mode_i, mode_j, sys, 0) + mass_term


def stiffness_form(mode_i: Mode, mode_j: Mode, sys: BeamSystem) -> float:
    """Potential-energy bilinear form integral(EI W_i'' W_j'') + kappa W_i(l0) W_j(l0).

    For an eigenfunction, stiffness_form(W, W) = lam * inner_h(W, W).
    """
    spring = (
        sys.shaker_stiffness_kappa
        * mode_eval(mode_i, sys.attach_l0)
        * mode_eval(mode_j, sys.attach_l0)
    )
    return sys.flexural_rigidity * _pair_integral(mode_i, mode_j, sys, 2) + spring


def operator_inner(mode_i: Mode, mode_j: Mode, sys: BeamSystem) -> float:
    """Inner product of the applied beam-body operator with another mode.

    Uses the fourth-derivative form EI mu_i^4 integral(W_i W_j) plus the
    spring term and the third-derivative jump at the attachment point.
    Symmetric in its arguments when both are eigenfunctions, which is the
    self-adjointness check.
    """
    l0 = sys.attach_l0
    ei = sys.flexural_rigidity
    jump = mode_eval(mode_i, l0, 3, side="left") - mode_eval(mode_i, l0, 3, side="right")
    return (
        ei * mode_i.mu**4 * _pair_integral(mode_i, mode_j, sys, 0)
        + sys.shaker_stiffness_kappa * mode_eval(mode_i, l0) * mode_eval(mode_j, l0)
        - ei * jump * mode_eval(mode_j, l0)
    )
