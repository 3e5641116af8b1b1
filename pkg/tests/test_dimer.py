import cmath
import math

import numpy as np
import pytest

from anyonosc import (AnyonParams, build_weff, eigen_analysis,
                      find_exceptional_point, gamma_full_single,
                      lindblad_coefficients, normal_mode_frequencies)
from anyonosc.dimer import EffectiveMatrix, match_branches


def brute_force_eigs(entries):
    return np.linalg.eigvals(entries)


def multiset_close(a, b, tol):
    a, b = list(a), list(b)
    direct = max(abs(a[0] - b[0]), abs(a[1] - b[1]))
    swapped = max(abs(a[0] - b[1]), abs(a[1] - b[0]))
    return min(direct, swapped) <= tol


class TestNormalModeFrequencies:
    def test_boson_point_both_conventions(self):
        p = AnyonParams(theta=0.0, coupling_j=0.2)
        assert normal_mode_frequencies(p, "appendix") == pytest.approx((1.2, 0.8))
        assert normal_mode_frequencies(p, "maintext") == pytest.approx((1.2, 0.8))

    def test_fermion_point_appendix_degenerate(self):
        p = AnyonParams(theta=math.pi, coupling_j=0.2)
        wp, wm = normal_mode_frequencies(p, "appendix")
        assert wp == pytest.approx(1.0, abs=1e-15)
        assert wm == pytest.approx(1.0, abs=1e-15)

    def test_half_angle_value(self):
        p = AnyonParams(theta=math.pi / 2, coupling_j=0.2)
        wp, wm = normal_mode_frequencies(p, "appendix")
        assert wp == pytest.approx(1.0 + 0.2 * math.cos(math.pi / 4), abs=1e-12)
        assert wm == pytest.approx(1.0 - 0.2 * math.cos(math.pi / 4), abs=1e-12)

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            normal_mode_frequencies(AnyonParams(theta=0.1), "bogus")


class TestLindbladCoefficients:
    def test_perfect_correlation_kills_minus_channels(self):
        chans = lindblad_coefficients(AnyonParams(theta=0.4, xi=1.0))
        for ch in chans:
            if ch.sign == -1:
                assert ch.lambda_plus == 0.0
                assert ch.lambda_minus == 0.0

    def test_emission_coefficient_value(self):
        chans = lindblad_coefficients(AnyonParams(theta=0.0, xi=0.0, beta=1.0, gamma=0.1))
        em_plus = next(ch for ch in chans if ch.label == "emission_plus")
        want = math.sqrt(0.1 * (1.0 + 1.0 / (math.e - 1.0))) / 2.0
        assert em_plus.lambda_plus == pytest.approx(want, abs=1e-12)
        assert want == pytest.approx(0.19887, abs=1e-5)

    def test_relative_phase_is_minus_half_angle(self):
        for theta in (0.3, 1.1, 2.6):
            chans = lindblad_coefficients(AnyonParams(theta=theta, xi=0.4))
            em_plus = next(ch for ch in chans if ch.label == "emission_plus")
            ratio = em_plus.lambda_minus / em_plus.lambda_plus
            assert cmath.phase(ratio) == pytest.approx(-theta / 2.0, abs=1e-12)

    def test_diagonal_sum_consistent_magnitude(self):
        p = AnyonParams(theta=1.3, xi=0.6, gamma=0.1)
        chans = lindblad_coefficients(p)
        from anyonosc.rates import thermal_occupation
        nth = thermal_occupation(p.theta, p.beta, p.omega)
        got_mod = chans.dissipative_sum("plus", "plus", "modulus")
        assert got_mod == pytest.approx(0.1 * (abs(nth + 1) + abs(nth)) / 2.0, abs=1e-13)
        got_ana = chans.dissipative_sum("plus", "plus", "analytic")
        assert got_ana == pytest.approx(0.1 * (2 * nth + 1) / 2.0, abs=1e-13)


class TestBuildWeff:
    def test_offdiagonals_vanish_without_correlation(self):
        for theta in np.linspace(0.0, math.pi, 11):
            w = build_weff(AnyonParams(theta=theta, xi=0.0))
            assert abs(w.entries[0, 1]) <= 1e-14
            assert abs(w.entries[1, 0]) <= 1e-14

    def test_boson_diagonal_matches_single_oscillator_rate(self):
        p = AnyonParams(theta=0.0, xi=0.0, beta=1.0, gamma=0.1, coupling_j=0.2)
        w = build_weff(p)
        a = w.entries[0, 0]
        assert a.imag == pytest.approx(-1.2, abs=1e-12)
        assert -a.real == pytest.approx(gamma_full_single(p).value.real, abs=1e-12)
        assert -a.real == pytest.approx(0.1081977, abs=1e-6)

    def test_closed_system_is_diagonal_frequencies(self):
        p = AnyonParams(theta=0.9, xi=0.5, gamma=0.0)
        w = build_weff(p)
        wp, wm = normal_mode_frequencies(p)
        assert w.entries[0, 0] == pytest.approx(-1j * wp)
        assert w.entries[1, 1] == pytest.approx(-1j * wm)
        assert w.entries[0, 1] == 0.0

    def test_diagonal_parts_independent_of_xi(self):
        for theta in (0.0, 0.8, 2.2):
            base = build_weff(AnyonParams(theta=theta, xi=0.0))
            for xi in (-1.0, -0.5, 0.5, 1.0):
                w = build_weff(AnyonParams(theta=theta, xi=xi))
                assert abs(w.entries[0, 0] - base.entries[0, 0]) <= 1e-12
                assert abs(w.entries[1, 1] - base.entries[1, 1]) <= 1e-12

    def test_eigenvalue_multiset_invariant_under_xi_sign(self):
        for theta in (0.3, 1.5, 2.7):
            for xi in (0.3, 0.7, 1.0):
                lp = build_weff(AnyonParams(theta=theta, xi=xi)).eigenvalues
                lm = build_weff(AnyonParams(theta=theta, xi=-xi)).eigenvalues
                assert multiset_close(lp, lm, 1e-12)

    def test_imaginary_parts_are_mode_frequencies(self):
        p = AnyonParams(theta=1.1, xi=0.4)
        w = build_weff(p)
        assert w.entries[0, 0].imag == pytest.approx(-w.omega_plus, abs=1e-12)
        assert w.entries[1, 1].imag == pytest.approx(-w.omega_minus, abs=1e-12)

    def test_stat_dephasing_flag_adds_to_diagonals(self):
        from anyonosc.rates import gamma_stat
        p = AnyonParams(theta=1.2, xi=0.3)
        w0 = build_weff(p, stat_dephasing=False)
        w1 = build_weff(p, stat_dephasing=True)
        extra = gamma_stat(p.theta, p.z, p.gamma)
        assert (w0.entries[0, 0] - w1.entries[0, 0]).real == pytest.approx(extra, abs=1e-14)
        assert np.allclose(w0.entries[0, 1], w1.entries[0, 1])

    def test_dissipative_stability_random_draws(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            p = AnyonParams(theta=rng.uniform(0.0, 3.1), omega=1.0,
                            coupling_j=rng.uniform(-0.5, 0.5),
                            gamma=rng.uniform(0.01, 0.5),
                            beta=rng.uniform(0.2, 3.0),
                            xi=rng.uniform(-0.999, 0.999))
            w = build_weff(p)
            assert w.eigenvalues[0].real < 0.0
            assert w.eigenvalues[1].real < 0.0

    def test_closed_form_matches_brute_force_on_random_draws(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            p = AnyonParams(theta=rng.uniform(0.0, math.pi), omega=1.0,
                            coupling_j=rng.uniform(-0.5, 0.5),
                            gamma=rng.uniform(0.0, 0.5),
                            beta=rng.uniform(0.2, 3.0),
                            xi=rng.uniform(-1.0, 1.0))
            w = build_weff(p)
            assert multiset_close(w.eigenvalues, brute_force_eigs(w.entries), 1e-12)

    def test_lifetimes_are_inverse_decay(self):
        w = build_weff(AnyonParams(theta=2.0, xi=0.8))
        for lam, tau in zip(w.eigenvalues, w.lifetimes):
            assert tau == pytest.approx(1.0 / (-lam.real))


class TestEigenAnalysis:
    def test_diagonal_matrix_is_trivial(self):
        entries = np.diag([-1.2j - 0.1, -0.8j - 0.1])
        w = EffectiveMatrix(entries=entries, omega_plus=1.2, omega_minus=0.8,
                            params=AnyonParams(theta=0.0), frequency_convention="appendix",
                            conjugation="modulus", stat_dephasing=False)
        eigen_analysis(w)
        assert multiset_close(w.eigenvalues, np.diag(entries), 1e-15)
        assert not w.near_defective

    def test_eigenvectors_solve_the_system(self):
        w = build_weff(AnyonParams(theta=1.7, xi=0.7))
        for k in range(2):
            lam = w.eigenvalues[k]
            v = w.right_eigenvectors[:, k]
            res = np.linalg.norm(w.entries @ v - lam * v)
            assert res <= 1e-12

    def test_real_positive_product_case_vs_brute_force(self):
        w = build_weff(AnyonParams(theta=0.0, xi=1.0, beta=1.0, gamma=0.1, coupling_j=0.2))
        assert multiset_close(w.eigenvalues, brute_force_eigs(w.entries), 1e-13)

    def test_near_defective_flag_on_synthetic_defective_matrix(self):
        # [[a, 1], [eps, a]] has eigenvectors (1, +/-sqrt(eps)): condition ~ 1/sqrt(eps)
        entries = np.array([[-0.1 - 1j, 1.0], [1e-20, -0.1 - 1j]], dtype=complex)
        w = EffectiveMatrix(entries=entries, omega_plus=1.0, omega_minus=1.0,
                            params=AnyonParams(theta=0.0), frequency_convention="appendix",
                            conjugation="modulus", stat_dephasing=False)
        eigen_analysis(w)
        assert w.near_defective

    def test_eigenvector_condition_diverges_toward_the_exceptional_point(self):
        p = AnyonParams(theta=0.5, xi=1.0)
        ep = find_exceptional_point(p)
        at_ep = build_weff(p.with_(theta=ep.theta)).eigenvector_condition
        near = build_weff(p.with_(theta=ep.theta + 0.01)).eigenvector_condition
        far = build_weff(p.with_(theta=0.5))
        assert at_ep > 1e6 > near > far.eigenvector_condition
        assert not far.near_defective

    def test_dominant_eigenvector_character_swaps_with_correlation_sign(self):
        # the swap lives between the (1,1)/sqrt2 and (1,-1)/sqrt2 combinations:
        # the slowest mode's overlaps interchange under xi -> -xi
        p = AnyonParams(theta=2.8, coupling_j=0.2)
        sym = np.array([1.0, 1.0]) / math.sqrt(2.0)
        anti = np.array([1.0, -1.0]) / math.sqrt(2.0)
        for xi in (0.6, 1.0):
            wp = build_weff(p.with_(xi=xi))
            wm = build_weff(p.with_(xi=-xi))
            kp = int(np.argmax([lam.real for lam in wp.eigenvalues]))
            km = int(np.argmax([lam.real for lam in wm.eigenvalues]))
            vp = wp.right_eigenvectors[:, kp]
            vm = wm.right_eigenvectors[:, km]
            assert abs(np.vdot(sym, vp)) == pytest.approx(abs(np.vdot(anti, vm)), abs=1e-10)
            assert abs(np.vdot(anti, vp)) == pytest.approx(abs(np.vdot(sym, vm)), abs=1e-10)


class TestExceptionalPoint:
    def test_no_ep_without_correlation(self):
        ep = find_exceptional_point(AnyonParams(theta=0.0, xi=0.0))
        assert not ep.found
        assert ep.gap > 1e-4

    def test_ep_location_at_full_correlation(self):
        ep = find_exceptional_point(AnyonParams(theta=0.0, xi=1.0, beta=1.0,
                                                gamma=0.1, coupling_j=0.2))
        assert ep.found
        assert 2.0 < ep.theta < math.pi
        assert ep.gap < 1e-6 * 0.1

    def test_no_ep_in_closed_system(self):
        ep = find_exceptional_point(AnyonParams(theta=0.0, xi=1.0, gamma=0.0))
        assert not ep.found

    def test_ep_consistent_with_real_discriminant_root(self):
        # independent check: under the modulus convention the squared gap is a
        # real function of theta; brentq on it must agree with the scanner
        from scipy.optimize import brentq
        p = AnyonParams(theta=0.0, xi=1.0)

        def disc(theta):
            w = build_weff(p.with_(theta=theta))
            (a, b), (c, d) = w.entries
            return ((a - d) ** 2 + 4 * b * c).real

        root = brentq(disc, 2.0, 2.9, xtol=1e-14)
        ep = find_exceptional_point(p)
        assert ep.theta == pytest.approx(root, abs=1e-9)

    def test_bad_bracket_rejected(self):
        with pytest.raises(ValueError):
            find_exceptional_point(AnyonParams(theta=0.0), theta_bracket=(2.0, 1.0))


class TestBranchMatching:
    def test_keeps_identity_when_closer(self):
        prev = (-0.1 - 1.0j, -0.2 - 0.8j)
        cur = (-0.11 - 1.01j, -0.19 - 0.79j)
        assert match_branches(prev, cur) == cur

    def test_swaps_when_swapped_is_closer(self):
        prev = (-0.1 - 1.0j, -0.2 - 0.8j)
        cur = (-0.19 - 0.79j, -0.11 - 1.01j)
        assert match_branches(prev, cur) == (cur[1], cur[0])
