import math

import numpy as np
import pytest

import divspec as ds
from divspec.spectrum import (
    BoundTooLooseError,
    DiversitySpectrum,
    ExcessiveClampError,
    OracleConvergenceError,
)

TWO_PI = 2.0 * math.pi


def make_spectrum(eigenvalues, hs_error_bound=0.0):
    lam = np.asarray(eigenvalues, dtype=float)
    trace = float(lam.sum())
    hs = float(np.sum(lam * lam))
    return DiversitySpectrum(
        eigenvalues=lam,
        trace=trace,
        omega=trace * trace / hs,
        inv_omega=hs / (trace * trace),
        hs_norm_sq=hs,
        eig_error_bound=0.0,
        hs_error_bound=hs_error_bound,
        N=10,
        N_D=5,
        r1=0.5,
        rho_max=1.0,
    )


class TestSolve:
    def test_circle_isotropic_closed_form(self):
        op = ds.build_truncated_operator(ds.Circle(1.0), ds.IsotropicPas())
        spec = ds.solve_spectrum(op)
        exact = np.sort([ds.bessel_j(n, TWO_PI) ** 2 for n in range(-op.N, op.N + 1)])[::-1]
        assert np.max(np.abs(spec.eigenvalues - exact)) < 1e-12

    def test_point_aperture_fully_correlated(self):
        op = ds.build_truncated_operator(ds.Disk(0.0), ds.VonMisesPas(kappa=3.0, alpha0=0.4))
        spec = ds.solve_spectrum(op)
        assert spec.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)
        assert np.max(spec.eigenvalues[1:]) < 1e-12
        assert spec.omega == pytest.approx(1.0, abs=1e-10)

    def test_descending_and_nonnegative(self, suite_spectra):
        for case in suite_spectra["cases"]:
            lam = case.spectrum.eigenvalues
            assert np.all(np.diff(lam) <= 1e-15)
            assert np.all(lam >= 0.0)

    def test_omega_inv_omega_product(self, suite_spectra):
        for case in suite_spectra["cases"]:
            s = case.spectrum
            assert s.omega * s.inv_omega == pytest.approx(1.0, abs=1e-12)

    def test_attached_bounds(self):
        op = ds.build_truncated_operator(ds.Circle(1.0), ds.UniformPas(delta=math.pi / 2))
        spec = ds.solve_spectrum(op)
        decay = math.exp(op.N_D - op.N)
        assert spec.eig_error_bound == pytest.approx(0.2 * 4.0 * decay, rel=1e-14)
        assert spec.hs_error_bound == pytest.approx(0.4 * 16.0 * decay, rel=1e-14)

    def test_excessive_clamp_raises(self):
        op = ds.build_truncated_operator(ds.Circle(1.0), ds.IsotropicPas())
        broken = ds.TruncatedOperator(
            N=op.N,
            N_D=op.N_D,
            r1=op.r1,
            gram=op.gram - 1e-6 * np.eye(op.size),
            rtilde=op.rtilde,
            rho_max=op.rho_max,
            offset=op.offset,
        )
        with pytest.raises(ExcessiveClampError):
            ds.solve_spectrum(broken)

    def test_translation_invariance(self):
        base = ds.solve_spectrum(
            ds.build_truncated_operator(ds.Rectangle(0.8, 0.4), ds.VonMisesPas(kappa=4.0))
        )
        moved = ds.solve_spectrum(
            ds.build_truncated_operator(
                ds.Rectangle(0.8, 0.4, center=(1.3, -0.6)), ds.VonMisesPas(kappa=4.0)
            )
        )
        assert np.max(np.abs(base.eigenvalues - moved.eigenvalues)) < 1e-10

    @pytest.mark.parametrize(
        "make_aperture",
        [
            lambda theta: ds.Segment(1.0, angle=theta),
            lambda theta: ds.Rectangle(0.8, 0.4, angle=theta),
        ],
    )
    def test_rotation_covariance(self, make_aperture):
        theta = 0.7
        pas = ds.UniformPas(delta=math.pi / 3, alpha0=0.5)
        pas_rot = ds.UniformPas(delta=math.pi / 3, alpha0=0.5 + theta)
        base = ds.solve_spectrum(ds.build_truncated_operator(make_aperture(0.0), pas))
        rotated = ds.solve_spectrum(
            ds.build_truncated_operator(make_aperture(theta), pas_rot)
        )
        assert np.max(np.abs(base.eigenvalues - rotated.eigenvalues)) < 1e-8

    def test_mirror_symmetry_for_on_axis_line(self):
        plus = ds.solve_spectrum(
            ds.build_truncated_operator(ds.Segment(1.0), ds.UniformPas(delta=1.1, alpha0=0.9))
        )
        minus = ds.solve_spectrum(
            ds.build_truncated_operator(ds.Segment(1.0), ds.UniformPas(delta=1.1, alpha0=-0.9))
        )
        assert np.max(np.abs(plus.eigenvalues - minus.eigenvalues)) < 1e-10

    def test_omega_at_least_one(self, suite_spectra):
        for case in suite_spectra["cases"]:
            assert case.spectrum.omega >= 1.0 - 1e-12


class TestDiversityMeasure:
    def test_single_branch(self):
        assert ds.diversity_measure(np.array([1.0, 0.0, 0.0])) == 1.0

    def test_two_equal_branches(self):
        assert ds.diversity_measure(np.array([0.5, 0.5, 0.0])) == pytest.approx(2.0)

    def test_identity_spectrum(self):
        assert ds.diversity_measure(np.ones(7)) == pytest.approx(7.0)

    def test_accepts_spectrum_object(self, suite_spectra):
        case = suite_spectra["cases"][0]
        assert ds.diversity_measure(case.spectrum) == case.spectrum.omega

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            ds.diversity_measure(np.zeros(4))


class TestOmegaCorrected:
    def test_exact_case(self):
        center, half = ds.omega_corrected(make_spectrum([0.6, 0.4], hs_error_bound=0.0))
        assert (center, half) == (ds.diversity_measure(np.array([0.6, 0.4])), 0.0)

    def test_small_bound_arithmetic(self):
        spec = make_spectrum([0.2] * 5, hs_error_bound=1e-6)  # omega = 5
        center, half = ds.omega_corrected(spec)
        eps = 5.0 * 1e-6
        assert center == pytest.approx(5.0 / (1.0 - eps), rel=1e-14)
        assert half == pytest.approx(5.0 * eps * eps / (1.0 - eps), rel=1e-12)

    def test_loose_bound_rejected(self):
        spec = make_spectrum([0.2] * 5, hs_error_bound=0.2)  # eps = 1 >= 0.5
        with pytest.raises(BoundTooLooseError):
            ds.omega_corrected(spec)


class TestDiscrete:
    def test_single_antenna(self):
        R = ds.discrete_correlation([(0.0, 0.0)], ds.IsotropicPas())
        assert R.shape == (1, 1) and R[0, 0] == 1.0

    def test_pair_isotropic(self):
        d = 0.4
        R = ds.discrete_correlation([(0.0, 0.0), (d, 0.0)], ds.IsotropicPas())
        assert R[0, 1] == pytest.approx(ds.bessel_j(0, TWO_PI * d), abs=1e-12)
        assert R[1, 0] == np.conj(R[0, 1])

    def test_duplicate_positions_fully_correlated(self):
        R = ds.discrete_correlation(
            [(0.1, 0.2), (0.1, 0.2)], ds.VonMisesPas(kappa=2.0, alpha0=0.3)
        )
        assert np.allclose(R, np.ones((2, 2)), atol=1e-12)

    def test_truncation_precondition(self):
        with pytest.raises(ValueError):
            ds.discrete_correlation([(0.0, 0.0), (1.0, 0.0)], ds.IsotropicPas(), N=3)

    def test_identity_gives_antenna_count(self):
        for L in [2, 5, 16]:
            assert ds.discrete_diversity(np.eye(L)) == float(L)

    def test_all_ones_gives_one(self):
        assert ds.discrete_diversity(np.ones((6, 6))) == 1.0

    def test_two_blocks(self):
        L = 8
        R = np.zeros((L, L))
        R[: L // 2, : L // 2] = 1.0
        R[L // 2 :, L // 2 :] = 1.0
        assert ds.discrete_diversity(R) == pytest.approx(2.0)

    def test_non_hermitian_rejected(self):
        R = np.eye(3)
        R[0, 1] = 0.5
        with pytest.raises(ValueError):
            ds.discrete_diversity(R)

    def test_report_bundle(self):
        report = ds.discrete_report([(0.0, 0.0), (0.3, 0.0)], ds.IsotropicPas())
        assert report.L == 2
        assert 1.0 <= report.omega <= 2.0

    def test_dense_sampling_approaches_continuous(self):
        pas = ds.UniformPas(delta=math.pi / 2, alpha0=0.4)
        continuous = ds.solve_spectrum(ds.build_truncated_operator(ds.Segment(1.0), pas)).omega
        omegas = []
        for L in [4, 16, 64]:
            pts = np.stack([np.linspace(-0.5, 0.5, L), np.zeros(L)], axis=1)
            omegas.append(ds.discrete_diversity(ds.discrete_correlation(pts, pas)))
        assert abs(omegas[-1] - continuous) / continuous < 0.05
        assert abs(omegas[-1] - continuous) < abs(omegas[0] - continuous)


class TestMimoSlope:
    def test_anchors(self):
        assert ds.mimo_slope(1.0, 1.0) == 1.0
        assert ds.mimo_slope(3.7, 3.7) == pytest.approx(3.7)
        assert ds.mimo_slope(2.0, 4.0) == pytest.approx(8.0 / 3.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            ds.mimo_slope(0.5, 2.0)


class TestNystromOracle:
    def test_point_aperture(self):
        eigs = ds.nystrom_oracle(ds.Disk(0.0), ds.IsotropicPas())
        assert eigs[0] == pytest.approx(1.0, abs=1e-12)

    def test_circle_isotropic_closed_form(self):
        eigs = ds.nystrom_oracle(ds.Circle(1.0), ds.IsotropicPas(), points=512)
        N = ds.truncation_order(1.0) + 10
        exact = np.sort([ds.bessel_j(n, TWO_PI) ** 2 for n in range(-N, N + 1)])[::-1]
        assert np.max(np.abs(eigs[:10] - exact[:10])) < 1e-6

    def test_matches_matrix_route_on_segment(self):
        pas = ds.UniformPas(delta=math.pi / 2, alpha0=math.pi / 2)
        op = ds.build_truncated_operator(ds.Segment(1.0), pas, N=ds.truncation_order(0.5) + 20)
        spec = ds.solve_spectrum(op)
        eigs = ds.nystrom_oracle(ds.Segment(1.0), pas)
        assert np.max(np.abs(spec.eigenvalues[:10] - eigs[:10])) < 1e-5

    def test_unconvergeable_budget_raises(self, monkeypatch):
        import divspec.spectrum as spectrum_mod

        monkeypatch.setattr(spectrum_mod, "_ORACLE_CAP_1D", 64)
        with pytest.raises(OracleConvergenceError):
            ds.nystrom_oracle(ds.Segment(1.0), ds.IsotropicPas(), points=8, tol=1e-16)


class TestTheoremSurrogates:
    def test_eigenvalue_stability_under_refinement(self, suite_spectra):
        # refining the truncation moves the top eigenvalues by at most twice
        # the certified per-eigenvalue bound
        for case in suite_spectra["cases"]:
            s, s5 = case.spectrum, case.spectrum_refined
            top = 2 * s.N_D + 1
            assert np.max(np.abs(s.eigenvalues[:top] - s5.eigenvalues[:top])) <= (
                2.0 * s.eig_error_bound
            ), case.name

    def test_hs_norm_stability_under_refinement(self, suite_spectra):
        for case in suite_spectra["cases"]:
            s, s5 = case.spectrum, case.spectrum_refined
            assert abs(s.hs_norm_sq - s5.hs_norm_sq) <= 2.0 * s.hs_error_bound, case.name

    def test_trace_within_gram_budget(self, suite_spectra):
        for case in suite_spectra["cases"]:
            s = case.spectrum
            assert s.trace >= case.gram_trace - 1e-10, case.name
            assert abs(s.trace - 1.0) <= s.eig_error_bound * (2 * s.N + 1) + 1e-10, case.name


@pytest.mark.slow
class TestNystromAgreementAcrossKinds:
    SCENARIOS = [
        (ds.Segment(1.0), ds.IsotropicPas()),
        (ds.Circle(0.8), ds.UniformPas(delta=math.pi / 2, alpha0=0.5)),
        (ds.Disk(0.35), ds.VonMisesPas(kappa=5.0, alpha0=1.1)),
        (ds.Rectangle(0.6, 0.4), ds.UniformPas(delta=math.pi, alpha0=-0.3)),
        (
            ds.PiecewiseCurve(
                (ds.LinePiece((0.0, 0.0), (0.5, 0.0)), ds.LinePiece((0.5, 0.0), (0.5, 0.4)))
            ),
            ds.VonMisesPas(kappa=2.0),
        ),
        (
            ds.PiecewiseCurve(
                (
                    ds.LinePiece((-0.4, 0.0), (0.0, 0.0)),
                    ds.ArcPiece(
                        center=(0.0, 0.25), radius=0.25, angle_start=-math.pi / 2, angle_stop=0.0
                    ),
                )
            ),
            ds.UniformPas(delta=2.0, alpha0=0.8),
        ),
        (ds.ParallelLines(3, 0.8, 0.6), ds.IsotropicPas()),
    ]

    @pytest.mark.parametrize("aperture,pas", SCENARIOS)
    def test_top_eigenvalues_agree(self, aperture, pas):
        centered, _ = ds.centering_transform(aperture)
        r1 = ds.enclosing_radius(centered)
        op = ds.build_truncated_operator(aperture, pas, N=ds.truncation_order(r1) + 20)
        spec = ds.solve_spectrum(op)
        eigs = ds.nystrom_oracle(aperture, pas)
        tol = max(1e-5, spec.eig_error_bound + 1e-6)
        assert np.max(np.abs(spec.eigenvalues[:10] - eigs[:10])) < tol
