import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import drive_params, local_maxima, times
from threelevel import (
    DriveParams,
    FormulaDiscrepancyError,
    InvalidArgumentError,
    classical_distance_alpha,
    classical_speed_alpha,
    coherence_l2,
    coherence_l2_analytic,
    density_matrix,
    evolve_exact,
    evolve_large_detuning,
    fd_density_derivative,
    hss,
    hss_phi2_analytic,
    hss_phi3_analytic,
    kappa,
    qfi_matrix,
    qfi_phi2_analytic,
    quantum_speed_alpha,
    xi,
)
from threelevel.profile import numeric_profile
from threelevel.quantifiers import (
    HSS_VARIANTS,
    hss_analytic_grid,
    lambda_term,
    radicand_sqrt,
    sigma_term,
    theta_term,
)

REF = DriveParams(1.0, 0.3, 0.04)

hermitian3 = st.lists(st.floats(-2, 2), min_size=9, max_size=9).map(
    lambda v: (lambda a: a + a.conj().T)(np.array(v[:9]).reshape(3, 3) + 1j * np.roll(np.array(v), 1).reshape(3, 3))
)


class TestCoherence:
    def test_incoherent(self):
        assert coherence_l2(np.diag([1, 0, 0])) == 0

    def test_uniform_superposition(self):
        assert coherence_l2(density_matrix(np.ones(3) / math.sqrt(3))) == pytest.approx(2 / 3, abs=1e-15)

    @given(drive_params(), times)
    def test_bounds(self, p, t):
        for psi in (evolve_exact(p, t), evolve_large_detuning(p, t)):
            c = coherence_l2(density_matrix(psi))
            assert -1e-15 <= c <= 2 / 3 + 1e-12

    @given(drive_params(), times)
    def test_dual_path_exact_state(self, p, t):
        assert coherence_l2_analytic(p, t) == pytest.approx(
            coherence_l2(density_matrix(evolve_exact(p, t))), abs=1e-8)

    @pytest.mark.xfail(strict=True, reason="the closed form describes the exact state; see the decisions ledger")
    def test_reference_point_large_detuning_state(self):
        assert coherence_l2_analytic(REF, 1.0) == pytest.approx(
            coherence_l2(density_matrix(evolve_large_detuning(REF, 1.0))), abs=1e-8)

    def test_phase_free(self):
        a = coherence_l2_analytic(REF.replace(phi2=0, phi3=0), 2.5)
        b = coherence_l2_analytic(REF.replace(phi2=1.3, phi3=-0.4), 2.5)
        assert a == b

    def test_periodic_when_commensurate(self):
        # vartheta2 = vartheta3 = 1, delta = 0 gives omega = -1/sqrt2, 0, 1/sqrt2
        p = DriveParams(1, 1, 0)
        period = 2 * math.pi * math.sqrt(2)
        t = np.linspace(0, 5, 11)
        np.testing.assert_allclose(coherence_l2_analytic(p, t + period), coherence_l2_analytic(p, t), atol=1e-12)


class TestClassical:
    def test_distance_identity(self):
        for alpha in (1, 1.5, 2, 3):
            assert classical_distance_alpha([0.2, 0.8], [0.2, 0.8], alpha) == 0

    def test_distance_examples(self):
        assert classical_distance_alpha([1, 0], [0, 1], 2) == pytest.approx(1.0)
        assert classical_distance_alpha([0.7, 0.3], [0.3, 0.7], 1) == pytest.approx(0.4)

    def test_distance_rejects(self):
        with pytest.raises(InvalidArgumentError):
            classical_distance_alpha([1, 0], [0, 1], 0.5)
        with pytest.raises(InvalidArgumentError):
            classical_distance_alpha([1, 0], [0, 1, 0], 2)
        with pytest.raises(InvalidArgumentError):
            classical_distance_alpha([-0.1, 1.1], [0.5, 0.5], 2)

    def test_speed_examples(self):
        theta = math.pi / 4
        dp = [-math.sin(2 * theta), math.sin(2 * theta)]
        assert classical_speed_alpha(dp, 2) == pytest.approx(1.0)
        assert classical_speed_alpha([0, 0], 2) == 0
        assert classical_speed_alpha([-0.2, 0.2], 1) == pytest.approx(0.2)

    def test_speed_rejects_small_alpha(self):
        with pytest.raises(InvalidArgumentError):
            classical_speed_alpha([0.1, -0.1], 0.99)

    @given(st.floats(0.01, 1.5))
    def test_speed_is_limit_of_distance(self, theta):
        # s_2 = lim d_2(p(theta), p(theta + h)) / h
        h = 1e-6
        p = lambda x: [math.cos(x) ** 2, math.sin(x) ** 2]
        fd = classical_distance_alpha(p(theta + h), p(theta - h), 2) / (2 * h)
        assert classical_speed_alpha([-math.sin(2 * theta), math.sin(2 * theta)], 2) == pytest.approx(fd, rel=1e-6)


class TestQuantumSpeed:
    def test_zero(self):
        assert quantum_speed_alpha(np.zeros((3, 3)), 1.5) == 0
        assert hss(np.zeros((3, 3))) == 0

    def test_diag_alpha1(self):
        assert quantum_speed_alpha(np.diag([1, -1, 0]), 1) == pytest.approx(1.0)

    def test_non_hermitian_rejected(self):
        m = np.zeros((3, 3))
        m[0, 1] = 1
        with pytest.raises(InvalidArgumentError):
            quantum_speed_alpha(m, 2)
        with pytest.raises(InvalidArgumentError):
            hss(m)

    def test_qubit_phase_state(self):
        theta = 0.6
        psi = np.array([np.exp(-1j * theta), 1]) / math.sqrt(2)
        dpsi = np.array([-1j * np.exp(-1j * theta), 0]) / math.sqrt(2)
        drho = np.outer(dpsi, psi.conj()) + np.outer(psi, dpsi.conj())
        assert hss(drho) == pytest.approx(0.5, abs=1e-15)

    @given(hermitian3)
    def test_frobenius_consistency(self, m):
        assert hss(m) == pytest.approx(quantum_speed_alpha(m, 2), abs=1e-12)
        # the eigenvalue route agrees too, just above the Frobenius shortcut
        ev = np.linalg.eigvalsh(m)
        assert hss(m) == pytest.approx(math.sqrt(0.5 * np.sum(ev**2)), rel=1e-12, abs=1e-12)

    @given(hermitian3)
    def test_continuous_in_alpha(self, m):
        alphas = np.linspace(1, 4, 61)
        vals = np.array([quantum_speed_alpha(m, a) for a in alphas])
        assert np.all(np.isfinite(vals))
        scale = max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(m)))))
        assert np.max(np.abs(np.diff(vals))) < 0.2 * scale

    def test_reference_hss_qfi_identity(self):
        t = 1.0
        for which, idx in (("phi2", 0), ("phi3", 1)):
            drho = fd_density_derivative(REF, t, which, state="large_detuning")
            F = qfi_matrix(REF, t, "numeric", state="large_detuning")
            assert 2 * hss(drho) == pytest.approx(math.sqrt((F.f22, F.f33)[idx]), rel=1e-6)


class TestHssTerms:
    @given(drive_params(), times)
    def test_theta_sigma_are_kappa_xi(self, p, t):
        assert theta_term(p, t) == pytest.approx(kappa(p, t), abs=1e-12)
        assert sigma_term(p, t) == pytest.approx(xi(p, t), abs=1e-12)

    @given(drive_params(), times)
    def test_corrected_lambda_is_ground_population(self, p, t):
        pop = abs(evolve_exact(p, t).amps[0]) ** 2
        assert lambda_term(p, t, "symmetry_corrected") == pytest.approx(pop, abs=1e-10)

    def test_unknown_forms(self):
        with pytest.raises(InvalidArgumentError):
            lambda_term(REF, 1.0, "guess")
        with pytest.raises(InvalidArgumentError):
            hss_phi2_analytic(REF, 1.0, "guess")

    def test_radicand_band(self):
        vals, bad = radicand_sqrt(np.array([4.0, -5e-13, -1e-11]))
        assert vals[0] == 2 and vals[1] == 0 and math.isnan(vals[2])
        assert list(bad) == [False, False, True]


class TestAnalyticHss:
    @given(drive_params(), times)
    def test_reweighted_matches_definition(self, p, t):
        prof = numeric_profile(p, [t])
        for fn, col in ((hss_phi2_analytic, "hss2"), (hss_phi3_analytic, "hss3")):
            a, o = fn(p, t, "reweighted"), float(prof[col][0])
            assert abs(a - o) <= 1e-8 * max(1, o) or abs(a * a - o * o) <= 1e-12

    def test_as_printed_disagrees_with_definition(self):
        t = np.linspace(0, 50, 400)
        prof = numeric_profile(REF, t)
        (h2, _), _ = hss_analytic_grid(REF, t, "as_printed")
        assert np.nanmax(np.abs(h2 - prof["hss2"])) > 1e-3

    def test_negative_radicand_raises(self, monkeypatch):
        from threelevel import quantifiers

        monkeypatch.setattr(quantifiers, "hss_radicands", lambda p, t, v: (np.array([-1e-6]), np.array([1.0])))
        with pytest.raises(FormulaDiscrepancyError) as info:
            hss_phi2_analytic(REF, 1.0)
        assert info.value.value == -1e-6
        assert hss_phi3_analytic(REF, 1.0) == 1.0

    @pytest.mark.parametrize("variant", HSS_VARIANTS)
    def test_grid_never_raises(self, variant):
        (h2, b2), (h3, b3) = hss_analytic_grid(REF, np.linspace(0, 50, 200), variant)
        assert h2.shape == b2.shape == (200,)
        assert np.all(np.isnan(h2) == b2) and np.all(np.isnan(h3) == b3)

    def test_maxima_align_with_qfi(self):
        t = np.linspace(0, 50, 2000)
        (h2, _), _ = hss_analytic_grid(REF, t, "reweighted")
        assert list(local_maxima(h2)) == list(local_maxima(qfi_phi2_analytic(REF, t)))
