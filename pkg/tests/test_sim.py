import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beamobs.galerkin import ReducedModel, total_energy
from beamobs.sim import (
    ForcingSignal,
    SimulationError,
    Trajectory,
    default_dt,
    integrate,
    trajectory_header,
    weighted_error,
    write_trajectory_csv,
)

from test_observer import toy_model


class TestForcingSignal:
    def test_zero(self):
        assert ForcingSignal.zero()(12.3) == 0.0

    def test_sinusoid(self):
        sig = ForcingSignal.sinusoid(2.0, 4.0, 0.5)
        assert sig(0.7) == pytest.approx(2.0 * math.sin(4.0 * 0.7 + 0.5))

    def test_negative_frequency_rejected(self):
        with pytest.raises(ValueError):
            ForcingSignal.sinusoid(1.0, -2.0)

    def test_table_lookup(self):
        sig = ForcingSignal.table([0.0, 1.0, 2.5], [5.0, -1.0, 2.0])
        assert sig(-0.1) == 0.0
        assert sig(0.0) == 5.0
        assert sig(0.99) == 5.0
        assert sig(1.0) == -1.0
        assert sig(7.0) == 2.0

    def test_table_times_strictly_increasing(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            ForcingSignal.table([0.0, 0.0], [1.0, 2.0])

    def test_from_spec(self):
        sig = ForcingSignal.from_spec({"kind": "sinusoid", "amplitude": 1.0, "omega": 4.0})
        assert sig(math.pi / 8) == pytest.approx(1.0)
        with pytest.raises(ValueError, match="unknown forcing kind"):
            ForcingSignal.from_spec({"kind": "sawtooth"})


class TestIntegrate:
    def test_equilibrium_stays_zero(self, ref_model, ref_gain, ref_beam):
        traj = integrate(ref_model, ref_gain, [], np.zeros(12), np.zeros(12),
                         t_final=0.5, sys=ref_beam)
        assert np.all(traj.plant == 0.0)
        assert np.all(traj.observer == 0.0)
        assert np.all(traj.err_weighted == 0.0)

    def test_free_oscillation_closed_form(self):
        model = toy_model([4.0])
        traj = integrate(model, None, [], np.array([1.0, 0.0]),
                         t_final=10.0, dt=1e-3, stride=1)
        err = np.max(np.abs(traj.plant[:, 0] - np.cos(2.0 * traj.times)))
        assert err <= 1e-8

    def test_forced_oscillation_closed_form(self):
        lam = 9.0
        model = toy_model([lam])
        traj = integrate(model, None, [ForcingSignal.sinusoid(1.0, 4.0)],
                         np.zeros(2), t_final=10.0, dt=1e-3, stride=1)
        root = math.sqrt(lam)
        exact = (np.sin(4.0 * traj.times)
                 - (4.0 / root) * np.sin(root * traj.times)) / (lam - 16.0)
        rel = np.max(np.abs(traj.plant[:, 0] - exact)) / np.max(np.abs(exact))
        assert rel <= 1e-6

    def test_energy_drift_budget(self, ref_model):
        dt = default_dt(ref_model)
        z0 = 0.1 * np.ones(12)
        traj = integrate(ref_model, None, [], z0, t_final=10_000 * dt, dt=dt, stride=1)
        energy = total_energy(ref_model, traj.plant)
        assert np.max(np.abs(energy - energy[0])) / energy[0] <= 1e-6

    def test_default_dt_rule(self, ref_model):
        expected = 2.0 * math.pi / (200.0 * math.sqrt(ref_model.lambdas.max()))
        assert default_dt(ref_model) == pytest.approx(expected, rel=1e-15)

    def test_lyapunov_monotone_along_error_flow(self, ref_model, ref_gain, ref_beam):
        traj = integrate(ref_model, ref_gain, [], 0.1 * np.ones(12), np.zeros(12),
                         t_final=2.0, sys=ref_beam)
        increases = np.diff(traj.lyapunov)
        assert np.all(increases <= 1e-9 * traj.lyapunov[0])

    def test_error_independent_of_forcing(self, ref_model, ref_gain, ref_beam):
        z0 = 0.1 * np.ones(12)
        forced = integrate(ref_model, ref_gain, [ForcingSignal.sinusoid(1.0, 4.0)],
                           z0, np.zeros(12), t_final=2.0, sys=ref_beam)
        unforced = integrate(ref_model, ref_gain, [], z0, np.zeros(12),
                             t_final=2.0, sys=ref_beam)
        e_forced = forced.plant - forced.observer
        e_unforced = unforced.plant - unforced.observer
        scale = np.max(np.abs(e_unforced))
        assert np.max(np.abs(e_forced - e_unforced)) <= 1e-9 * scale

    def test_deterministic(self, ref_model, ref_gain, ref_beam):
        runs = [
            integrate(ref_model, ref_gain, [ForcingSignal.sinusoid(1.0, 4.0)],
                      0.1 * np.ones(12), np.zeros(12), t_final=1.0, sys=ref_beam)
            for _ in range(2)
        ]
        assert np.array_equal(runs[0].plant, runs[1].plant)
        assert np.array_equal(runs[0].observer, runs[1].observer)

    def test_uniform_grid_and_lengths(self, ref_model, ref_gain, ref_beam):
        traj = integrate(ref_model, ref_gain, [], 0.1 * np.ones(12), None,
                         t_final=1.0, sys=ref_beam)
        steps = np.diff(traj.times)
        assert np.allclose(steps, steps[0], rtol=1e-12)
        for arr in (traj.plant, traj.observer, traj.outputs,
                    traj.err_weighted, traj.lyapunov, traj.mode_errors):
            assert len(arr) == traj.n_samples

    def test_nonfinite_state_aborts(self):
        # hand-built runaway system (not constructible via assemble_A)
        a = np.array([[60.0, 0.0], [0.0, 60.0]])
        model = ReducedModel(n_modes=1, a_matrix=a, b_matrix=np.zeros((2, 1)),
                             c_matrix=np.array([[1.0, 0.0]]),
                             lambdas=np.array([1.0]), norms_h_sq=np.ones(1))
        with np.errstate(over="ignore"), \
                pytest.raises(SimulationError, match="non-finite state at t"):
            integrate(model, None, [], np.ones(2), t_final=50.0, dt=0.1, stride=1)

    def test_dimension_checks(self, ref_model):
        with pytest.raises(ValueError, match="z0"):
            integrate(ref_model, None, [], np.zeros(3), t_final=1.0)
        with pytest.raises(ValueError, match="t_final"):
            integrate(ref_model, None, [], np.zeros(12), t_final=1e-9, dt=1e-3)
        with pytest.raises(ValueError, match="forcing channels"):
            integrate(ref_model, None, [ForcingSignal.zero()] * 3, np.zeros(12),
                      t_final=1.0)
        with pytest.raises(ValueError, match="zbar0"):
            integrate(ref_model, None, [], np.zeros(12), np.zeros(12), t_final=1.0)


class TestWeightedError:
    def test_zero_error(self, ref_model, ref_gain, ref_beam):
        traj = integrate(ref_model, ref_gain, [], np.zeros(12), np.zeros(12),
                         t_final=0.1, sys=ref_beam)
        assert np.all(weighted_error(traj) == 0.0)

    def test_hand_value(self):
        # one mode, kappa = m = 2, Delta = delta = 1 -> kappa/2 + m/2 = 2
        traj = Trajectory(
            times=np.array([0.0]),
            plant=np.array([[1.0, 1.0]]),
            observer=np.array([[0.0, 0.0]]),
            outputs=np.zeros((1, 1)),
            err_weighted=None, lyapunov=None, mode_errors=None,
            kappa=2.0, mass=2.0)
        assert weighted_error(traj)[0] == pytest.approx(2.0)

    def test_requires_observer(self, ref_model):
        traj = integrate(ref_model, None, [], np.zeros(12), t_final=0.1)
        with pytest.raises(ValueError, match="no observer"):
            weighted_error(traj)

    def test_matches_stored_diagnostics(self, ref_model, ref_gain, ref_beam):
        traj = integrate(ref_model, ref_gain, [ForcingSignal.sinusoid(1.0, 4.0)],
                         0.1 * np.ones(12), np.zeros(12), t_final=1.0, sys=ref_beam)
        assert np.array_equal(weighted_error(traj), traj.err_weighted)
        assert traj.mode_errors.sum(axis=1) == pytest.approx(traj.err_weighted, rel=1e-12)


class TestCsv:
    def _read(self, path):
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        return rows[0], rows[1:]

    def test_empty_trajectory_header_only(self, tmp_path):
        traj = Trajectory(
            times=np.zeros(0), plant=np.zeros((0, 4)), observer=None,
            outputs=np.zeros((0, 1)), err_weighted=None, lyapunov=None,
            mode_errors=None)
        path = tmp_path / "empty.csv"
        write_trajectory_csv(traj, path)
        header, rows = self._read(path)
        assert header == ["t", "q_1", "q_2", "p_1", "p_2", "y_0"]
        assert rows == []

    def test_three_samples_four_lines(self, ref_model, tmp_path):
        traj = integrate(ref_model, None, [], 0.1 * np.ones(12),
                         t_final=2e-4, dt=1e-4, stride=1)
        assert traj.n_samples == 3
        path = tmp_path / "short.csv"
        write_trajectory_csv(traj, path)
        assert len(path.read_text().splitlines()) == 4  # header + 3 samples

    def test_schema_with_observer(self, ref_model, ref_gain, ref_beam, tmp_path):
        traj = integrate(ref_model, ref_gain, [], 0.1 * np.ones(12), None,
                         t_final=0.01, sys=ref_beam)
        path = tmp_path / "obs.csv"
        write_trajectory_csv(traj, path)
        header, rows = self._read(path)
        n = 6
        expected = (["t"]
                    + [f"q_{j}" for j in range(1, n + 1)]
                    + [f"p_{j}" for j in range(1, n + 1)]
                    + [f"qhat_{j}" for j in range(1, n + 1)]
                    + [f"phat_{j}" for j in range(1, n + 1)]
                    + ["y_0", "err_weighted", "lyapunov"]
                    + [f"errmode_{j}" for j in range(1, n + 1)])
        assert header == expected
        assert len(rows) == traj.n_samples

    def test_plant_only_schema(self, ref_model, tmp_path):
        traj = integrate(ref_model, None, [], 0.1 * np.ones(12), t_final=0.01)
        path = tmp_path / "plant.csv"
        write_trajectory_csv(traj, path)
        header, _ = self._read(path)
        assert header == trajectory_header(traj)
        assert not any(col.startswith(("qhat", "phat", "err", "lyap")) for col in header)

    def test_roundtrip_17_digits(self, ref_model, ref_gain, ref_beam, tmp_path):
        traj = integrate(ref_model, ref_gain, [ForcingSignal.sinusoid(1.0, 4.0)],
                         0.1 * np.ones(12), np.zeros(12), t_final=0.05, sys=ref_beam)
        path = tmp_path / "round.csv"
        write_trajectory_csv(traj, path)
        header, rows = self._read(path)
        parsed = np.array([[float(v) for v in row] for row in rows])
        n = 6
        assert np.array_equal(parsed[:, 0], traj.times)
        assert np.array_equal(parsed[:, 1:1 + n], traj.plant[:, 0::2])
        assert np.array_equal(parsed[:, 1 + n:1 + 2 * n], traj.plant[:, 1::2])
        y_col = header.index("y_0")
        assert np.array_equal(parsed[:, y_col], traj.outputs[:, 0])
        assert np.array_equal(parsed[:, header.index("err_weighted")],
                              traj.err_weighted)


@settings(max_examples=20, deadline=None)
@given(amplitude=st.floats(0.1, 10), omega=st.floats(0.0, 50),
       phase=st.floats(-3, 3))
def test_sinusoid_evaluation_property(amplitude, omega, phase):
    sig = ForcingSignal.sinusoid(amplitude, omega, phase)
    for t in (0.0, 0.31, 2.7):
        assert sig(t) == amplitude * math.sin(omega * t + phase)
