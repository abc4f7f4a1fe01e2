import math

import numpy as np
import pytest

from beamobs.galerkin import build_reduced_model
from beamobs.model import BeamSystem
from beamobs.observer import synthesize_gain
from beamobs.spectral import compute_modes


def reference_system(**overrides) -> BeamSystem:
    params = dict(
        length_l=1.875,
        attach_l0=1.4,
        young_E=7.1e10,
        inertia_I=1.6875e-10,
        density_rho=0.5985,
        shaker_mass_m=0.045,
        shaker_stiffness_kappa=2630.0,
    )
    params.update(overrides)
    return BeamSystem(**params)


def hinged_lambda(n: int, sys: BeamSystem) -> float:
    """Analytic eigenvalue (n pi / l)^4 EI / rho of the plain hinged beam."""
    return (n * math.pi / sys.length_l) ** 4 * sys.flexural_rigidity / sys.density_rho


@pytest.fixture(scope="session")
def ref_beam():
    return reference_system()


@pytest.fixture(scope="session")
def hinged():
    return reference_system(shaker_mass_m=0.0, shaker_stiffness_kappa=0.0)


@pytest.fixture(scope="session")
def ref_modes(ref_beam):
    return compute_modes(ref_beam, 6)


@pytest.fixture(scope="session")
def hinged_modes(hinged):
    return compute_modes(hinged, 6)


@pytest.fixture(scope="session")
def ref_model(ref_beam, ref_modes):
    return build_reduced_model(ref_beam, ref_modes, check_quadrature=True)


@pytest.fixture(scope="session")
def ref_gain(ref_model):
    return synthesize_gain(ref_model, [3.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
