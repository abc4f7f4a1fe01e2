import json

import pytest
from hypothesis import given, strategies as st

from beamobs.model import (
    ActuatorShape,
    ConfigError,
    PolynomialPiece,
    eval_shape,
    load_config,
    load_settings,
    save_config,
)

from conftest import reference_system


REFERENCE_JSON = {
    "beam": {"length": 1.875, "young_modulus": 7.1e10,
             "second_moment": 1.6875e-10, "linear_density": 0.5985},
    "shaker": {"position": 1.4, "mass": 0.045, "stiffness": 2630.0},
    "actuators": [],
    "sensors": [],
}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestLoadConfig:
    def test_reference_values(self, tmp_path):
        sys = load_config(write_config(tmp_path, REFERENCE_JSON))
        assert sys.length_l == 1.875
        assert sys.attach_l0 == 1.4
        assert sys.young_E == 7.1e10
        assert sys.inertia_I == 1.6875e-10
        # linear density is stored pre-multiplied: 2660 * 2.25e-4 kg/m
        assert sys.density_rho == pytest.approx(2660 * 2.25e-4, rel=1e-15)
        assert sys.shaker_mass_m == 0.045
        assert sys.shaker_stiffness_kappa == 2630.0
        assert sys.actuators == ()
        assert sys.sensors == ()

    def test_attach_point_on_boundary_rejected(self, tmp_path):
        bad = json.loads(json.dumps(REFERENCE_JSON))
        bad["shaker"]["position"] = 1.875
        with pytest.raises(ConfigError, match=r"attach_l0 must lie strictly inside \(0,l\)"):
            load_config(write_config(tmp_path, bad))

    def test_actuator_piece_covering_attach_point_rejected(self, tmp_path):
        bad = json.loads(json.dumps(REFERENCE_JSON))
        bad["actuators"] = [{"pieces": [{"span": [1.3, 1.5], "coeffs": [1.0]}]}]
        with pytest.raises(ConfigError, match="support"):
            load_config(write_config(tmp_path, bad))

    def test_parse_failure(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_missing_required_key(self, tmp_path):
        bad = {"beam": {"length": 1.0}, "shaker": REFERENCE_JSON["shaker"]}
        with pytest.raises(ConfigError, match="beam.young_modulus is required"):
            load_config(write_config(tmp_path, bad))

    def test_unknown_key_warns_but_loads(self, tmp_path):
        noisy = json.loads(json.dumps(REFERENCE_JSON))
        noisy["beam"]["colour"] = "red"
        noisy["comment"] = "hello"
        with pytest.warns(UserWarning, match="unknown config key"):
            sys = load_config(write_config(tmp_path, noisy))
        assert sys.length_l == 1.875

    def test_settings_sections(self, tmp_path):
        data = json.loads(json.dumps(REFERENCE_JSON))
        data["simulation"] = {
            "modes": 6, "t_final": 20.0, "initial_q": 0.1, "initial_p": 0.1,
            "forcing": [{"kind": "sinusoid", "amplitude": 1.0, "omega": 4.0}],
        }
        data["observer"] = {"gamma": [3.0]}
        _, settings = load_settings(write_config(tmp_path, data))
        assert settings.modes == 6
        assert settings.t_final == 20.0
        assert settings.gammas == (3.0,)
        assert settings.initial_q == (0.1,) * 6
        assert settings.initial_p == (0.1,) * 6
        assert settings.forcing[0]["omega"] == 4.0


class TestValidation:
    def test_negative_density(self):
        with pytest.raises(ConfigError, match="density_rho must be positive"):
            reference_system(density_rho=-1.0)

    def test_sensor_outside_beam(self):
        with pytest.raises(ConfigError, match="sensor position"):
            reference_system(sensors=(2.0,))

    def test_zero_mass_and_stiffness_allowed(self):
        sys = reference_system(shaker_mass_m=0.0, shaker_stiffness_kappa=0.0)
        assert sys.shaker_mass_m == 0.0

    def test_actuator_piece_touching_end_rejected(self):
        shape = ActuatorShape((PolynomialPiece(0.0, 0.5, (1.0,)),))
        with pytest.raises(ConfigError, match="support"):
            reference_system(actuators=(shape,))

    def test_overlapping_pieces_rejected(self):
        with pytest.raises(ConfigError, match="disjoint"):
            ActuatorShape((
                PolynomialPiece(0.1, 0.3, (1.0,)),
                PolynomialPiece(0.2, 0.4, (1.0,)),
            ))


class TestEvalShape:
    def test_constant_patch(self):
        shape = ActuatorShape((PolynomialPiece(0.2, 0.5, (1.0,)),))
        assert eval_shape(shape, 0.3) == 1.0

    def test_outside_support(self):
        shape = ActuatorShape((PolynomialPiece(0.2, 0.5, (1.0,)),))
        assert eval_shape(shape, 0.7) == 0.0

    def test_linear_ramp(self):
        shape = ActuatorShape((PolynomialPiece(0.1, 0.2, (0.0, 2.0)),))
        assert eval_shape(shape, 0.15) == pytest.approx(0.3, rel=1e-15)

    @given(
        lo=st.floats(min_value=0.01, max_value=0.6),
        width=st.floats(min_value=0.01, max_value=0.5),
        coeffs=st.lists(st.floats(-5, 5), min_size=1, max_size=4),
    )
    def test_zero_at_special_points(self, lo, width, coeffs):
        # pieces built strictly inside (0, l0) so the closure rule holds
        sys_l, sys_l0 = 1.875, 1.4
        hi = min(lo + width, sys_l0 - 0.01)
        if hi <= lo:
            return
        shape = ActuatorShape((PolynomialPiece(lo, hi, tuple(coeffs)),))
        reference_system(actuators=(shape,))  # must validate
        for x in (0.0, sys_l0, sys_l):
            assert eval_shape(shape, x) == 0.0


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        shape = ActuatorShape((
            PolynomialPiece(0.2, 0.5, (1.0, -0.25, 0.0, 2e-3)),
            PolynomialPiece(0.6, 0.9, (0.5,)),
        ))
        original = reference_system(actuators=(shape,), sensors=(0.3, 1.1))
        path = tmp_path / "roundtrip.json"
        save_config(original, path)
        assert load_config(path) == original
