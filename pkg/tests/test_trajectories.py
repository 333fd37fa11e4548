"""Monte-Carlo trajectory sampler: step rule, seeding, and ensemble statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from zenoscope import (
    AtomState,
    DriveConfig,
    MemoryKernel,
    SpectralDensity,
    a_bar_from_memory,
    child_seed,
    ensemble_average,
    gamma_eff,
    gamma_rectangular,
    make_drive_config,
    make_rng,
    mc_step,
    run_ensemble,
    simulate_trajectory,
    unitary_drive,
)
from zenoscope.trajectories import _advance

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def detection_config(x=0.2, omega=1.0, t_max=10.0):
    gx = gamma_rectangular(x)
    return make_drive_config(gx, omega=omega, t_max=t_max)


class TestAtomState:
    def test_rejects_unnormalised(self):
        with pytest.raises(ValueError):
            AtomState(1.0, 1.0)

    def test_factories(self):
        assert AtomState.excited().p_excited == 1.0
        assert AtomState.ground().p_excited == 0.0


class TestUnitaryDrive:
    def test_zero_drive_is_identity(self):
        state = AtomState(0.6, 0.8j)
        out = unitary_drive(state, omega=0.0, dt=0.3)
        assert out.alpha == state.alpha
        assert out.beta == state.beta

    def test_quarter_period_swaps_excited_into_ground(self):
        out = unitary_drive(AtomState.excited(), omega=1.0, dt=math.pi / 2)
        assert out.alpha == pytest.approx(0.0, abs=1e-15)
        assert out.beta == pytest.approx(-1j, abs=1e-15)

    @pytest.mark.parametrize("angle", [0.1, 0.9, 2.3])
    def test_matches_matrix_exponential(self, angle):
        state = AtomState(0.6, 0.8j)
        propagator = expm(-1j * angle * SIGMA_X)
        expected = propagator @ np.array([state.alpha, state.beta])
        out = unitary_drive(state, omega=1.0, dt=angle)
        assert out.alpha == pytest.approx(expected[0], abs=1e-14)
        assert out.beta == pytest.approx(expected[1], abs=1e-14)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 2 * math.pi), st.floats(-3.0, 3.0))
    @settings(max_examples=50, deadline=None)
    def test_preserves_norm(self, weight, phase, angle):
        alpha = math.sqrt(weight) * np.exp(1j * phase)
        beta = math.sqrt(1.0 - weight)
        out = unitary_drive(AtomState(complex(alpha), complex(beta)), omega=1.0, dt=angle)
        assert abs(out.alpha) ** 2 + abs(out.beta) ** 2 == pytest.approx(1.0, abs=1e-12)


class TestMcStep:
    def make_cfg(self, omega=0.0):
        return DriveConfig(omega=omega, gamma_eff=0.4, dt_step=0.1, n_steps=10)

    def test_no_click_contracts_and_renormalises(self):
        cfg = self.make_cfg()
        s = 1.0 / math.sqrt(2.0)
        a_bar = 0.98
        state, jumped = mc_step(AtomState(s, s), cfg, a_bar, epsilon=0.99)
        assert not jumped
        norm = math.sqrt((a_bar * s) ** 2 + s ** 2)
        assert state.alpha == pytest.approx(a_bar * s / norm, rel=1e-14)
        assert state.beta == pytest.approx(s / norm, rel=1e-14)

    def test_click_resets_to_ground(self):
        cfg = self.make_cfg()
        s = 1.0 / math.sqrt(2.0)
        state, jumped = mc_step(AtomState(s * 1j, s), cfg, 0.98, epsilon=0.0)
        assert jumped
        assert state.alpha == 0.0
        assert state.beta == 1.0

    def test_vanishing_coupling_is_inert(self):
        cfg = DriveConfig(omega=0.0, gamma_eff=0.0, dt_step=0.1, n_steps=5)
        s = 1.0 / math.sqrt(2.0)
        state, jumped = mc_step(AtomState(s, s * 1j), cfg, 1.0, epsilon=0.5)
        assert not jumped
        assert state.alpha == pytest.approx(s, rel=1e-15)
        assert state.beta == pytest.approx(s * 1j, rel=1e-15)

    def test_click_probability_scales_with_occupation(self):
        cfg = self.make_cfg()
        p1 = cfg.gamma_eff * cfg.dt_step  # occupation 1
        _, jumped = mc_step(AtomState.excited(), cfg, 0.98, epsilon=p1 * 0.999)
        assert jumped
        _, jumped = mc_step(AtomState.excited(), cfg, 0.98, epsilon=p1 * 1.001)
        assert not jumped
        # half occupation halves the threshold
        s = 1.0 / math.sqrt(2.0)
        _, jumped = mc_step(AtomState(s, s), cfg, 0.98, epsilon=p1 * 0.6)
        assert not jumped

    def test_overcoarse_step_rejected_in_config(self):
        with pytest.raises(ValueError, match="at-most-one-photon"):
            DriveConfig(omega=0.0, gamma_eff=1.0, dt_step=0.1, n_steps=1)
        with pytest.raises(ValueError, match="omega"):
            DriveConfig(omega=1.0, gamma_eff=0.0, dt_step=0.1, n_steps=1)

    def test_saturated_click_probability_rejected(self):
        with pytest.raises(ValueError, match="p1"):
            _advance(1.0 + 0.0j, 0.0j, 0.5, 1.0 + 0.0j, 1.5, 1.0, 0.0)


class TestSimulateTrajectory:
    def test_seeded_repeatability(self):
        cfg, a_bar = detection_config()
        rec1 = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed=7)
        rec2 = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed=7)
        assert np.array_equal(rec1.p_e, rec2.p_e)
        assert np.array_equal(rec1.jumps, rec2.jumps)
        rec3 = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed=8)
        assert not np.array_equal(rec3.jumps, rec1.jumps)

    def test_matches_stepwise_updates(self):
        cfg, a_bar = detection_config(t_max=2.0)
        seed = 123
        record = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed)
        eps = make_rng(seed).random(cfg.n_steps)
        state = AtomState.excited()
        for k in range(cfg.n_steps):
            state, jumped = mc_step(state, cfg, a_bar, eps[k])
            assert jumped == record.jumps[k]
            assert state.p_excited == pytest.approx(record.p_e[k + 1], abs=1e-12)

    def test_rabi_oscillation_with_resets(self):
        # driven trajectory: a click projects to the ground state, so the
        # occupation right after a click step is exactly sin^2(omega dt)
        cfg, a_bar = detection_config(x=2.0, omega=1.0, t_max=10.0)
        record = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed=8)
        assert record.jump_count >= 2
        post_click = math.sin(cfg.omega * cfg.dt_step) ** 2
        for k in np.flatnonzero(record.jumps):
            assert record.p_e[k + 1] == pytest.approx(post_click, abs=1e-12)
        assert np.max(record.p_e) > 0.5  # Rabi peaks survive between clicks

    def test_undriven_survival_follows_effective_decay(self):
        # without drive the no-click ensemble survival is (|a_bar|^2)^k, which
        # tracks exp(-gamma_eff t) to first order in the step
        gx = gamma_rectangular(0.2).real
        dt = 0.01 / gx
        a_bar = math.exp(-0.5 * gx * dt)
        geff = gamma_eff(a_bar, dt)
        n_steps = 100
        cfg = DriveConfig(omega=0.0, gamma_eff=geff, dt_step=dt, n_steps=n_steps)
        t = dt * np.arange(n_steps + 1)
        law = (a_bar ** 2) ** np.arange(n_steps + 1)
        assert np.max(np.abs(law - np.exp(-geff * t))) < 0.01
        result = run_ensemble(AtomState.excited(), cfg, a_bar, 2000, master_seed=5)
        noise = np.max(result.p_e_stderr)
        assert np.max(np.abs(result.p_e_mean - law)) < 5 * noise

    def test_record_layout(self):
        cfg, a_bar = detection_config(t_max=1.0)
        record = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed=1)
        assert len(record.p_e) == cfg.n_steps + 1
        assert len(record.jumps) == cfg.n_steps
        assert record.p_e[0] == 1.0
        assert record.times[-1] == pytest.approx(cfg.t_max)
        assert np.all((record.p_e >= 0.0) & (record.p_e <= 1.0 + 1e-9))

    def test_first_jump_time(self):
        cfg, a_bar = detection_config(x=2.0, omega=1.0, t_max=10.0)
        record = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed=3)
        first = record.first_jump_time()
        if record.jump_count:
            k = int(np.flatnonzero(record.jumps)[0])
            assert first == pytest.approx((k + 1) * cfg.dt_step)
        else:
            assert first is None

    def test_rejects_expanding_contraction(self):
        cfg, _ = detection_config()
        with pytest.raises(ValueError):
            simulate_trajectory(AtomState.excited(), cfg, 1.0 + 1e-4, seed=0)

    def test_csv_export(self, tmp_path):
        cfg, a_bar = detection_config(t_max=1.0)
        record = simulate_trajectory(AtomState.excited(), cfg, a_bar, seed=11)
        path = tmp_path / "traj.csv"
        record.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,p_e,jump"
        assert len(lines) == cfg.n_steps + 2
        assert lines[1].endswith(",0")
        for k, line in enumerate(lines[2:]):
            assert line.split(",")[2] == str(int(record.jumps[k]))


class TestEnsemble:
    def test_single_trajectory_reduction(self):
        cfg, a_bar = detection_config(t_max=1.0)
        mean = ensemble_average(AtomState.excited(), cfg, a_bar, 1, master_seed=42)
        record = simulate_trajectory(AtomState.excited(), cfg, a_bar, child_seed(42, 0))
        np.testing.assert_array_equal(mean, record.p_e)

    def test_child_seeds_are_stable_and_distinct(self):
        seeds = [child_seed(9, i) for i in range(100)]
        assert len(set(seeds)) == 100
        assert seeds == [child_seed(9, i) for i in range(100)]

    def test_parallel_equals_serial(self):
        cfg, a_bar = detection_config(t_max=1.0)
        serial = run_ensemble(AtomState.excited(), cfg, a_bar, 40, master_seed=1, n_jobs=1)
        parallel = run_ensemble(AtomState.excited(), cfg, a_bar, 40, master_seed=1, n_jobs=3)
        np.testing.assert_array_equal(serial.p_e_mean, parallel.p_e_mean)
        np.testing.assert_array_equal(serial.p_e_stderr, parallel.p_e_stderr)
        np.testing.assert_array_equal(serial.jump_counts, parallel.jump_counts)

    def test_jump_counts_increase_with_x(self):
        means = []
        for x in (0.02, 0.2, 2.0):
            cfg, a_bar = detection_config(x=x, omega=1.0, t_max=10.0)
            result = run_ensemble(AtomState.excited(), cfg, a_bar, 400, master_seed=17)
            means.append(result.jump_count_mean)
        assert means[0] < means[1] < means[2]

    def test_rejects_empty_ensemble(self):
        cfg, a_bar = detection_config(t_max=1.0)
        with pytest.raises(ValueError):
            run_ensemble(AtomState.excited(), cfg, a_bar, 0, master_seed=0)

    def test_csv_export(self, tmp_path):
        cfg, a_bar = detection_config(t_max=1.0)
        result = run_ensemble(AtomState.excited(), cfg, a_bar, 10, master_seed=2)
        path = tmp_path / "ensemble.csv"
        result.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,p_e_mean,p_e_stderr"
        assert len(lines) == cfg.n_steps + 2


class TestDriveConfigFactory:
    def test_step_respects_both_rate_caps(self):
        gx = gamma_rectangular(2.0)  # Re ~ 0.31
        cfg, a_bar = make_drive_config(gx, omega=1.0, t_max=10.0)
        assert cfg.gamma_eff * cfg.dt_step <= 0.05 + 1e-12
        assert cfg.omega * cfg.dt_step <= 0.05 + 1e-12
        assert cfg.n_steps == pytest.approx(10.0 / cfg.dt_step)
        assert a_bar == pytest.approx(np.exp(-0.5 * gx * cfg.dt_step))
        assert gamma_eff(a_bar, cfg.dt_step) == pytest.approx(cfg.gamma_eff)

    def test_undriven_step_set_by_rate(self):
        gx = gamma_rectangular(2.0)
        cfg, _ = make_drive_config(gx, omega=0.0, t_max=10.0)
        assert cfg.dt_step == pytest.approx(0.05 / gx.real)

    def test_step_snaps_to_interval_multiple(self):
        gx = gamma_rectangular(0.2)
        tau = 0.012
        cfg, _ = make_drive_config(gx, omega=1.0, t_max=10.0, tau=tau)
        ratio = cfg.dt_step / tau
        assert ratio == pytest.approx(round(ratio))

    def test_interval_coarser_than_step_rejected(self):
        with pytest.raises(ValueError, match="tau"):
            make_drive_config(0.3 + 0j, omega=1.0, t_max=10.0, tau=1.0)
        with pytest.raises(ValueError):
            make_drive_config(0.3 + 0j, omega=1.0, t_max=0.0)

    def test_memory_contraction_matches_scaling_form_for_wide_band(self):
        lam, x = 100.0, 0.2
        tau = x / lam
        kernel = MemoryKernel(SpectralDensity.rectangular(1.0, lam))
        gx = gamma_rectangular(x)
        cfg, a_scaling = make_drive_config(gx, omega=1.0, t_max=10.0, tau=tau)
        n_per_step = int(round(cfg.dt_step / tau))
        a_memory = a_bar_from_memory(kernel, tau, n_per_step)
        assert a_memory == pytest.approx(a_scaling, rel=1e-3)
