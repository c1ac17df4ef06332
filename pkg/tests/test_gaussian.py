"""Second-moment flow: drift/diffusion, fixed points, regime signatures."""
import numpy as np
import pytest

from ptdimer import (
    count_prominent_extrema,
    dimer_mode_eigenvalues,
    evolve_moments,
    fit_decay_rate,
    moment_rhs,
    steady_state_moments,
    thermal_moment_state,
)
from ptdimer.gaussian import check_moment_state, diffusion_matrix, drift_matrix, \
    moment_flow_rhs
from conftest import GAMMA_A, GAMMA_B, G_BALANCED, G_STRONG, G_WEAK, OMEGA_B, \
    ROOM_T, make_params


def _random_moment_state(rng, scale=1.0):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    n = a @ a.conj().T
    return n * (scale / np.abs(n).max())


class TestDriftAndDiffusion:
    def test_drift_entries(self):
        m = drift_matrix(make_params())
        assert m[0, 0] == OMEGA_B - 0.5j * GAMMA_A
        assert m[1, 1] == OMEGA_B - 0.5j * GAMMA_B
        assert m[0, 1] == m[1, 0] == G_STRONG

    def test_drift_spectrum_matches_mode_eigenvalues(self):
        for g in (G_STRONG, G_WEAK):
            p = make_params(g=g)
            lam = sorted(dimer_mode_eigenvalues(p), key=lambda w: (w.real, w.imag))
            ev = sorted(np.linalg.eigvals(drift_matrix(p)),
                        key=lambda w: (w.real, w.imag))
            for a, b in zip(lam, ev):
                assert abs(a - b) < 1e-12 * abs(a)

    def test_diffusion_cold_and_room(self):
        p = make_params()
        assert np.all(diffusion_matrix(p, 0.0) == 0.0)
        d = diffusion_matrix(p, ROOM_T)
        assert d[0, 0] == pytest.approx(1.2258e9, rel=1e-2)
        assert d[1, 1] == pytest.approx(7.2377e8, rel=1e-2)
        assert d[0, 1] == d[1, 0] == 0.0

    def test_diffusion_monotone_in_temperature(self):
        p = make_params()
        cold = diffusion_matrix(p, 200.0)
        hot = diffusion_matrix(p, 350.0)
        assert hot[0, 0] > cold[0, 0]
        assert hot[1, 1] > cold[1, 1]

    def test_thermal_moment_state_room(self):
        n = thermal_moment_state(make_params(), ROOM_T)
        assert n[0, 0].real == pytest.approx(3760.25, rel=1e-2)
        assert n[1, 1].real == pytest.approx(2.41256e6, rel=1e-2)
        assert n[0, 1] == 0.0


class TestMomentFlowRhs:
    def test_matches_scalar_moment_system(self):
        rng = np.random.default_rng(31)
        for temp in (0.0, ROOM_T):
            p = make_params(temperature=temp)
            m = drift_matrix(p)
            d = diffusion_matrix(p, temp)
            for _ in range(50):
                n = _random_moment_state(rng, scale=2.5)
                dn = moment_flow_rhs(n, m, d)
                dx, dy, dz = moment_rhs(
                    np.array([n[0, 0], n[1, 1], n[0, 1]]), p, temperature=temp)
                scale = max(np.abs(dn).max(), 1.0)
                assert abs(dn[0, 0] - dx) < 1e-13 * scale
                assert abs(dn[1, 1] - dy) < 1e-13 * scale
                assert abs(dn[0, 1] - dz) < 1e-13 * scale

    def test_rotation_shift_is_neutral(self):
        rng = np.random.default_rng(7)
        p = make_params()
        m = drift_matrix(p)
        d = diffusion_matrix(p, ROOM_T)
        n = _random_moment_state(rng, scale=1e4)
        shifted = moment_flow_rhs(n, m - OMEGA_B * np.eye(2), d)
        scale = np.abs(shifted).max()
        assert np.abs(moment_flow_rhs(n, m, d) - shifted).max() < 1e-12 * scale

    def test_preserves_hermiticity(self):
        rng = np.random.default_rng(11)
        p = make_params()
        m = drift_matrix(p)
        d = diffusion_matrix(p, ROOM_T)
        n = _random_moment_state(rng, scale=1e3)
        dn = moment_flow_rhs(n, m, d)
        assert np.abs(dn - dn.conj().T).max() < 1e-12 * np.abs(dn).max()


class TestCheckMomentState:
    def test_valid_passes(self):
        out = check_moment_state(np.array([[2.0, 1j], [-1j, 3.0]]))
        assert out.dtype == complex

    def test_wrong_shape(self):
        with pytest.raises(ValueError, match="2x2"):
            check_moment_state(np.eye(3))

    def test_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            check_moment_state(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_indefinite(self):
        with pytest.raises(ValueError, match="semidefinite"):
            check_moment_state(np.diag([-1.0, 1.0]))

    def test_rounding_level_asymmetry_tolerated(self):
        n = np.array([[2.0, 0.5 + 1e-13j], [0.5, 3.0]])
        check_moment_state(n)


class TestRegimeSignatures:
    def _run(self, g, horizon_rate, samples=2000):
        p = make_params(g=g)
        n0 = thermal_moment_state(p, ROOM_T)
        times = np.linspace(0.0, 5.0 / horizon_rate, samples)
        return p, times, evolve_moments(n0, p, ROOM_T, times)

    def test_oscillating_phase_shows_beats(self):
        pair_rate = 0.5 * (GAMMA_A + GAMMA_B)
        _, _, traj = self._run(G_STRONG, pair_rate)
        assert count_prominent_extrema(traj.n_b_raw) >= 3

    def test_critical_phase_is_monotone(self):
        pair_rate = 0.5 * (GAMMA_A + GAMMA_B)
        _, _, traj = self._run(G_BALANCED, pair_rate)
        assert count_prominent_extrema(traj.n_b_raw) == 0

    def test_overdamped_phase_tail_rate(self):
        contrast = 0.25 * (GAMMA_A - GAMMA_B)
        slow = 2.0 * (0.25 * (GAMMA_A + GAMMA_B)
                      - np.sqrt(contrast ** 2 - G_WEAK ** 2))
        p, times, traj = self._run(G_WEAK, slow)
        n_ss = steady_state_moments(p, ROOM_T)[1, 1].real
        fitted = fit_decay_rate(times, traj.n_b_raw, asymptote=n_ss)
        assert fitted == pytest.approx(slow, rel=0.05)

    def test_gaussian_weight_is_unity(self):
        pair_rate = 0.5 * (GAMMA_A + GAMMA_B)
        _, _, traj = self._run(G_STRONG, pair_rate, samples=64)
        assert np.all(traj.weight == 1.0)


class TestSteadyState:
    def test_uncoupled_is_thermal(self):
        p = make_params(g=0.0)
        n_ss = steady_state_moments(p, ROOM_T)
        ref = thermal_moment_state(p, ROOM_T)
        assert np.abs(n_ss - ref).max() < 1e-10 * np.abs(ref).max()

    def test_cold_baths_empty(self):
        n_ss = steady_state_moments(make_params(), 0.0)
        assert np.abs(n_ss).max() < 1e-12

    def test_fixed_point_residual(self):
        p = make_params()
        n_ss = steady_state_moments(p, ROOM_T)
        d = diffusion_matrix(p, ROOM_T)
        res = moment_flow_rhs(n_ss, drift_matrix(p), d)
        assert np.abs(res).max() < 1e-12 * np.abs(d).max()

    def test_steady_state_is_physical(self):
        n_ss = steady_state_moments(make_params(), ROOM_T)
        check_moment_state(n_ss)

    def test_random_starts_converge(self):
        p = make_params()
        n_ss = steady_state_moments(p, ROOM_T)
        rate = 0.5 * (GAMMA_A + GAMMA_B)
        times = np.linspace(0.0, 24.0 / rate, 400)
        rng = np.random.default_rng(17)
        for _ in range(2):
            n0 = _random_moment_state(rng, scale=3e5)
            traj = evolve_moments(n0, p, ROOM_T, times, rtol=1e-11, atol=1e-8)
            final = np.array([[traj.n_a_raw[-1], traj.coherence[-1]],
                              [np.conj(traj.coherence[-1]), traj.n_b_raw[-1]]])
            rel = np.abs(final - n_ss).max() / np.abs(n_ss).max()
            assert rel < 1e-6

    def test_undamped_rejected(self):
        with pytest.raises(ValueError, match="steady state"):
            steady_state_moments(make_params(gamma_a=0.0, gamma_b=0.0), ROOM_T)

    def test_undamped_decoupled_mode_rejected(self):
        with pytest.raises(ValueError, match="singular"):
            steady_state_moments(make_params(gamma_a=0.0, g=0.0), ROOM_T)


class TestExtremaCounter:
    def test_sine_periods(self):
        t = np.linspace(0.0, 3 * 2 * np.pi, 1500)
        assert count_prominent_extrema(np.sin(t)) == 6

    def test_monotone_and_constant(self):
        t = np.linspace(0.0, 4.0, 300)
        assert count_prominent_extrema(np.exp(-t)) == 0
        assert count_prominent_extrema(np.ones(50)) == 0
        assert count_prominent_extrema([1.0, 2.0]) == 0

    def test_small_ripple_filtered(self):
        # the ripple wins over the decaying slope only in the tail, giving
        # real turning points whose swing stays under the default floor
        t = np.linspace(0.0, 8.0, 4000)
        v = np.exp(-t) + 3e-5 * np.sin(40 * t)
        assert count_prominent_extrema(v) == 0
        assert count_prominent_extrema(v, rel_prominence=1e-8) > 0

    def test_plateau_counts_once(self):
        assert count_prominent_extrema([0.0, 1.0, 1.0, 0.0]) == 1


class TestDecayFit:
    def test_pure_exponential(self):
        t = np.linspace(0.0, 5.0, 200)
        assert fit_decay_rate(t, 3e-2 * np.exp(-3.0 * t)) == pytest.approx(
            3.0, rel=1e-10)

    def test_with_asymptote(self):
        t = np.linspace(0.0, 6.0, 200)
        v = 0.7 + 2.0 * np.exp(-1.5 * t)
        assert fit_decay_rate(t, v, asymptote=0.7) == pytest.approx(
            1.5, rel=1e-10)

    def test_too_few_points(self):
        with pytest.raises(ValueError, match="fit window"):
            fit_decay_rate([0.0, 1.0, 2.0], [1.0, 0.5, 0.25])
