"""Phase distributions: quadrature against analytic radial moments,
closed forms against independent arithmetic, and the amplified kernel
against the explicit channel composition."""

import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from phasekit import channels, fock, phase


def analytic_paul_kernel(cutoff: int) -> np.ndarray:
    """Independent oracle for the radial moments:
    (1/pi) int_0^inf r^{m+n+1} e^{-r^2} dr / sqrt(m! n!)
        = Gamma((m+n)/2 + 1) / (2 pi sqrt(m! n!))."""
    w = np.empty((cutoff + 1, cutoff + 1))
    for m in range(cutoff + 1):
        for n in range(cutoff + 1):
            w[m, n] = gamma_fn((m + n) / 2.0 + 1.0) / (
                2.0 * np.pi * math.sqrt(math.factorial(m) * math.factorial(n)))
    return w


def paul_by_pointwise_husimi(rho, phi, r_max=14.0, steps=40000):
    """Second oracle: trapezoid over pointwise Husimi evaluations."""
    r = np.linspace(1e-9, r_max, steps)
    q = np.array([phase.husimi_q(rho, rr * np.exp(1j * phi)) for rr in r])
    return np.trapezoid(r * q, r) / np.pi


class TestHusimiQ:
    def test_vacuum_at_unit_amplitude(self):
        vac = fock.pure_density(fock.fock_basis_state(0, 10))
        assert phase.husimi_q(vac, 1.0) == pytest.approx(math.exp(-1.0), abs=1e-14)

    def test_origin_reads_ground_population(self):
        rho = fock.random_hs_density(4, 3, seed=2)
        assert phase.husimi_q(rho, 0.0) == pytest.approx(
            rho.entries[0, 0].real, abs=1e-14)

    def test_coherent_overlap_closed_form(self):
        r_p, psi = 1.2, 2.0
        rho = fock.pure_density(fock.coherent_state(r_p * np.exp(1j * psi), 45))
        for r, phi in [(0.5, 0.3), (1.5, 2.0), (2.0, 5.5)]:
            expected = math.exp(-r**2 - r_p**2 + 2 * r * r_p * math.cos(phi - psi))
            assert phase.husimi_q(rho, r * np.exp(1j * phi)) == pytest.approx(
                expected, rel=1e-10)


class TestPaulQuadrature:
    def test_kernel_matches_analytic_moments(self):
        cfg = phase.QuadratureConfig(radial_nodes=32, r_max=14.0)
        quad = phase.paul_kernel_matrix(25, cfg)
        np.testing.assert_allclose(quad, analytic_paul_kernel(25), atol=1e-13)

    def test_thermal_is_flat(self):
        dist = phase.paul_distribution(fock.thermal_state(math.log(2.0), 40))
        np.testing.assert_allclose(2 * np.pi * dist.density, 1.0, atol=1e-8)

    def test_number_state_is_flat(self):
        dist = phase.paul_distribution(fock.pure_density(fock.fock_basis_state(3, 6)))
        np.testing.assert_allclose(2 * np.pi * dist.density, 1.0, atol=1e-10)

    def test_coherent_peak_value(self):
        rho = fock.pure_density(fock.coherent_state(2.0 * np.exp(1j * np.pi), 40))
        value = phase.paul_density_at(rho, np.pi)
        assert value == pytest.approx(1.1287, abs=2e-4)
        assert value == pytest.approx(
            phase.paul_coherent_closed_form(2.0, np.pi, np.pi), abs=1e-10)

    def test_agrees_with_pointwise_husimi_integration(self):
        rho = fock.random_hs_density(4, 3, seed=9)
        for phi in (0.0, 1.1):
            assert phase.paul_density_at(rho, phi) == pytest.approx(
                paul_by_pointwise_husimi(rho, phi), abs=1e-8)

    def test_normalization_within_quad_error(self):
        for rho in [fock.pure_density(fock.coherent_state(1.5, 40)),
                    fock.thermal_state(0.7, 50),
                    fock.random_hs_density(5, 8, seed=3)]:
            dist = phase.paul_distribution(rho)
            budget = 1e-6 + dist.quad_error + rho.trace_deficit
            assert abs(dist.integral() - 1.0) <= budget

    def test_warns_when_r_max_too_small(self):
        rho = fock.pure_density(fock.coherent_state(2.0, 40))
        with pytest.warns(fock.NumericsWarning):
            phase.paul_distribution(rho, phase.QuadratureConfig(r_max=2.0))


class TestPaulCoherentClosedForm:
    def test_vacuum_limit_is_flat(self):
        assert phase.paul_coherent_closed_form(0.0, 0.0, 1.0) == pytest.approx(
            1.0 / (2 * np.pi), abs=1e-15)

    def test_peak_arithmetic(self):
        # direct evaluation with scipy-independent math.erf
        r_p = 2.0
        expected = math.exp(-4.0) / (2 * math.pi) * (
            1.0 + math.sqrt(math.pi) * r_p * math.exp(4.0) * (math.erf(2.0) + 1.0))
        assert phase.paul_coherent_closed_form(2.0, np.pi, np.pi) == pytest.approx(
            expected, rel=1e-14)
        assert expected == pytest.approx(1.1287, abs=2e-4)

    def test_grid_normalization(self):
        grid = phase.PhaseGrid(512)
        vals = np.array([phase.paul_coherent_closed_form(2.0, np.pi, p)
                         for p in grid.points])
        assert np.sum(vals) * grid.spacing == pytest.approx(1.0, abs=1e-8)


class TestPaulExpectation:
    def test_constant_function_normalization(self):
        rho = fock.pure_density(fock.coherent_state(1.0, 40))
        value = phase.paul_expectation(rho, phase.PhaseFunction.constant(1.0))
        assert value == pytest.approx(1.0, abs=1e-8)

    def test_flat_state_kills_first_harmonic(self):
        rho = fock.thermal_state(math.log(2.0), 40)
        value = phase.paul_expectation(rho, phase.PhaseFunction.harmonic(1))
        assert abs(value) < 1e-8

    def test_coherent_mean_phase(self):
        rho = fock.pure_density(fock.coherent_state(2.0 * np.exp(1j * np.pi), 40))
        value = phase.paul_expectation(rho, phase.PhaseFunction.harmonic(1))
        assert abs(abs(np.angle(value)) - np.pi) < 1e-3


class TestPeggBarnettDistributions:
    def test_point_mass_on_phase_state(self):
        s, t = 5, 2
        rho = fock.pure_density(fock.number_phase_state(t, s))
        probs = phase.pb_discrete_distribution(rho, s)
        expected = np.zeros(s + 1)
        expected[t] = 1.0
        np.testing.assert_allclose(probs, expected, atol=1e-12)

    def test_number_state_uniform(self):
        for s in (4, 9):
            rho = fock.pure_density(fock.fock_basis_state(2, 2))
            probs = phase.pb_discrete_distribution(rho, s)
            np.testing.assert_allclose(probs, 1.0 / (s + 1), atol=1e-13)

    def test_coherent_completeness(self):
        rho = fock.pure_density(fock.coherent_state(1.0, 40))
        probs = phase.pb_discrete_distribution(rho, 40)
        assert probs.sum() == pytest.approx(1.0, abs=1e-8)

    def test_requires_covering_dimension(self):
        rho = fock.pure_density(fock.coherent_state(1.0, 20))
        with pytest.raises(ValueError):
            phase.pb_discrete_distribution(rho, 10)

    def test_continuous_flat_for_number_state(self):
        rho = fock.pure_density(fock.fock_basis_state(2, 5))
        for s in (5, 20):
            assert phase.pb_continuous_density(rho, s, 0.7) == pytest.approx(
                1.0 / (2 * np.pi), abs=1e-14)

    def test_continuous_matches_discrete_on_grid(self):
        rho = fock.random_hs_density(4, 3, seed=12)
        s = 9
        probs = phase.pb_discrete_distribution(rho, s)
        for t in range(s + 1):
            theta = 2 * np.pi * t / (s + 1)
            assert phase.pb_continuous_density(rho, s, theta) == pytest.approx(
                (s + 1) / (2 * np.pi) * probs[t] / (s + 1) * (s + 1), abs=1e-12)

    def test_continuous_matches_truncated_series(self):
        # coherent state: the block sum IS the truncated series squared
        rho = fock.pure_density(fock.coherent_state(2.0 * np.exp(1j * np.pi), 99))
        for phi in (np.pi, 2.0):
            series = phase.pb_coherent_series(2.0, np.pi, phi, 100)
            assert phase.pb_continuous_density(rho, 100, phi) == pytest.approx(
                series, abs=1e-6)

    def test_expectation_trivial_cases(self):
        rho = fock.pure_density(fock.coherent_state(1.0, 30))
        total = phase.pb_expectation(rho, 30, phase.PhaseFunction.constant(1.0))
        assert total.real == pytest.approx(float(np.sum(
            phase.pb_discrete_distribution(rho, 30))), abs=1e-13)

        s, t = 5, 2
        point = fock.pure_density(fock.number_phase_state(t, s))
        value = phase.pb_expectation(point, s, phase.PhaseFunction.harmonic(1))
        assert value == pytest.approx(np.exp(2j * np.pi * t / (s + 1)), abs=1e-12)

    def test_number_state_harmonic_vanishes(self):
        rho = fock.pure_density(fock.fock_basis_state(2, 2))
        for s in (3, 8):
            value = phase.pb_expectation(rho, s, phase.PhaseFunction.harmonic(1))
            assert abs(value) < 1e-12


class TestPbCoherentSeries:
    def test_vacuum_flat(self):
        assert phase.pb_coherent_series(0.0, 0.0, 1.3, 50) == pytest.approx(
            1.0 / (2 * np.pi), abs=1e-15)

    def test_peak_exceeds_flat_level(self):
        peak = phase.pb_coherent_series(2.0, np.pi, np.pi, 100)
        assert peak > 1.0 / (2 * np.pi)
        # independent arithmetic for the peak value
        total = sum(2.0**n / math.sqrt(math.factorial(n)) for n in range(100))
        assert peak == pytest.approx(
            math.exp(-4.0) / (2 * math.pi) * total**2, rel=1e-12)

    def test_truncation_converged_at_hundred_terms(self):
        a = phase.pb_coherent_series(2.0, np.pi, 1.0, 100)
        b = phase.pb_coherent_series(2.0, np.pi, 1.0, 200)
        assert abs(a - b) < 1e-10


class TestAmplifiedKernel:
    def test_vacuum_flat_scaling(self):
        psi = fock.fock_basis_state(0, 1)
        for s, eps in [(7, 1.0), (50, 0.1), (200, 0.05)]:
            q = s * eps / (1.0 + s * eps)
            expected = (1.0 - q ** (s + 1)) / (2 * np.pi)
            for phi in (0.0, 1.2):
                assert phase.pb_amplified_density(psi, s, eps, phi) == pytest.approx(
                    expected, rel=1e-12)

    def test_cross_path_agreement_pure_states(self):
        rng = np.random.default_rng(5)
        for s, eps in [(60, 0.1), (120, 0.5), (200, 0.1)]:
            amps = rng.standard_normal(11) + 1j * rng.standard_normal(11)
            amps /= np.linalg.norm(amps)
            psi = fock.FockVector(amps, 10, 0.0)
            kappa = 1.0 + s * eps
            out_cut = max(s, channels.default_out_cutoff(kappa, 10))
            amped = channels.qla_apply(fock.pure_density(psi), kappa, out_cut)
            for phi in (0.4, 3.0):
                fast = phase.pb_amplified_density(psi, s, eps, phi)
                slow = phase.pb_continuous_density(amped, s, phi)
                assert abs(fast - slow) < 1e-8

    def test_thermal_mixture_closed_form(self):
        s, eps = 100, 0.1
        rho = fock.thermal_state(math.log(2.0), 60)
        kernel = phase.amplified_kernel_matrix(rho.cutoff, s, eps)
        value = phase.amplified_density_from_kernel(kernel, rho.entries, 0.3)
        expected = (1.0 - (10.5 / 11.0) ** 101) / (2 * np.pi)
        assert value == pytest.approx(expected, abs=1e-8)

    def test_coherent_ratio_near_one_at_large_s(self):
        psi = fock.coherent_state(2.0 * np.exp(1j * np.pi), 99)
        value = phase.pb_amplified_density(psi, 10**4 - 1, 0.01, np.pi)
        paul = phase.paul_coherent_closed_form(2.0, np.pi, np.pi)
        assert abs(value / paul - 1.0) < 0.05

    def test_kernel_matrix_matches_profile(self):
        psi = fock.coherent_state(1.0, 15)
        rho = fock.pure_density(psi)
        s, eps = 40, 0.2
        kernel = phase.amplified_kernel_matrix(15, s, eps)
        phis = np.array([0.1, 2.2, 4.4])
        via_kernel = phase.amplified_density_from_kernel(kernel, rho.entries, phis)
        via_profile = phase.pb_amplified_profile(psi, s, eps, phis)
        np.testing.assert_allclose(via_kernel, via_profile, atol=1e-13)

    def test_riemann_vs_channel_normalization(self):
        # small cutoff against large s: the inner-sum clipping is then
        # negligible and the two normalizations differ by a pure rescale
        psi = fock.coherent_state(0.8, 5)
        s, eps = 200, 0.01
        chan = phase.pb_amplified_profile(psi, s, eps, 0.3)
        riem = phase.pb_amplified_profile(psi, s, eps, 0.3,
                                          normalization="riemann")
        boost = (1.0 + s * eps) / ((s + 1) * eps)
        assert riem == pytest.approx(chan * boost, rel=1e-10)

    def test_domain_errors(self):
        psi = fock.fock_basis_state(0, 1)
        with pytest.raises(ValueError):
            phase.pb_amplified_density(psi, 10, -0.1, 0.0)
        with pytest.raises(ValueError):
            phase.pb_amplified_density(psi, 0, 0.1, 0.0)

    def test_overflow_guard_raises(self):
        amps = np.zeros(1301, dtype=complex)
        amps[1300] = 1.0
        psi = fock.FockVector(amps, 1300, 0.0)
        with pytest.raises(OverflowError):
            phase.pb_amplified_density(psi, 2600, 1e-12, 0.0)


class TestDominationEnvelope:
    def test_bound_holds_on_sweep(self):
        psi = fock.coherent_state(1.0, 25)
        for s in (10, 100, 1000):
            for eps in (0.05, 0.1, 0.5):
                value, envelope = phase.amplified_density_bound(
                    eps, s, 0.3, psi, 1.0)
                assert value <= envelope

    def test_zero_bound(self):
        psi = fock.fock_basis_state(0, 1)
        assert phase.amplified_density_bound(0.1, 10, 0.0, psi, 0.0) == (0.0, 0.0)

    def test_envelope_finite_and_s_independent(self):
        psi = fock.coherent_state(1.0, 25)
        envelopes = {phase.amplified_density_bound(0.5, s, 0.3, psi, 1.0)[1]
                     for s in (10, 100, 1000)}
        assert len(envelopes) == 1
        assert math.isfinite(envelopes.pop())

    def test_truncation_within_coefficient_tail(self):
        # difference between inner sums truncated at d and 2d stays inside
        # the analytic coefficient-tail envelope
        psi = fock.coherent_state(2.0, 80)
        for d in (30, 40):
            for eps in (0.05, 0.1, 0.5):
                a = phase.pb_amplified_profile(psi, 100, eps, 0.3, max_terms=d)
                b = phase.pb_amplified_profile(psi, 100, eps, 0.3, max_terms=2 * d)
                envelope = phase.coefficient_tail(d, eps, term_floor=0.0)
                assert abs(a - b) < envelope

    def test_coefficient_tail_decreases(self):
        values = [phase.coefficient_tail(d, 0.1) for d in (0, 20, 40, 80)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestPhaseFunction:
    def test_evaluate_matches_direct_sum(self):
        f = phase.PhaseFunction.from_modes({-2: 0.5j, 0: 1.0, 1: -0.25})
        for phi in (0.0, 1.0, 4.0):
            direct = 0.5j * np.exp(-2j * phi) + 1.0 - 0.25 * np.exp(1j * phi)
            assert f.evaluate(phi) == pytest.approx(direct, abs=1e-15)

    def test_bound(self):
        f = phase.PhaseFunction.from_modes({-1: 1.0, 2: -2.0})
        assert f.bound() == pytest.approx(3.0)

    def test_harmonic_layout(self):
        f = phase.PhaseFunction.harmonic(-2)
        assert f.order == 2
        assert f.evaluate(0.5) == pytest.approx(np.exp(-1j), abs=1e-15)


class TestConfigValidation:
    def test_quadrature_invariants(self):
        with pytest.raises(ValueError):
            phase.QuadratureConfig(radial_nodes=8)
        with pytest.raises(ValueError):
            phase.QuadratureConfig(r_max=0.0)

    def test_grid_spacing(self):
        grid = phase.PhaseGrid(256)
        assert grid.points[0] == 0.0
        assert grid.spacing == pytest.approx(2 * np.pi / 256)
        np.testing.assert_array_equal(
            grid.points, 2 * np.pi * np.arange(256) / 256)

    def test_distribution_validation(self):
        grid = phase.PhaseGrid(4)
        with pytest.raises(ValueError):
            phase.PhaseDistribution(grid, np.array([1.0, -1.0, 1.0, 1.0]))


class TestChannelInteractions:
    def test_paul_invariant_under_amplification(self):
        phis = 2 * np.pi * np.arange(64) / 64
        for i in range(5):
            rho = fock.random_hs_density(2, 1, seed=31, index=i)
            amped = channels.qla_apply(rho, 2.0,
                                       channels.default_out_cutoff(2.0, 1))
            sup = np.max(np.abs(phase.paul_density_at(rho, phis)
                                - phase.paul_density_at(amped, phis)))
            assert sup <= 1e-6 + amped.trace_deficit

    def test_husimi_rescaling_under_amplification(self):
        # Q_{A_kappa(rho)}(alpha) = (1/kappa) Q_rho(alpha / sqrt(kappa))
        kappa = 2.0
        rho = fock.random_hs_density(2, 1, seed=6)
        amped = channels.qla_apply(rho, kappa, 60)
        for alpha in (0.0, 0.7, 1.5j, 2.0 * np.exp(1.1j), -1.0 + 0.5j):
            lhs = phase.husimi_q(amped, alpha)
            rhs = phase.husimi_q(rho, alpha / math.sqrt(kappa)) / kappa
            assert abs(lhs - rhs) < 1e-8
