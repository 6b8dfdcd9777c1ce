import numpy as np
import pytest

from swphase.linalg import haar_unitary, random_density
from swphase.kernel import (
    KernelSpectrum,
    covariance_check,
    haar_second_moment_coefficients,
    kernel_from_spectrum,
    phase_space_norm_mc,
    reconstruct_exact,
    reconstruct_mc,
    solve_kernel_spectrum,
    verify_master,
    wigner_value,
)

GOLD_2 = np.array([(1 + np.sqrt(3)) / 2, (1 - np.sqrt(3)) / 2])


class TestSolveSpectrum:
    def test_n2_analytic(self):
        spec = solve_kernel_spectrum(2)
        np.testing.assert_allclose(spec.pi, GOLD_2, atol=1e-15)

    def test_n2_any_selector_gives_same_moduli_point(self):
        # at n=2 the sphere is two points; descending sort collapses them
        for seed in range(5):
            spec = solve_kernel_spectrum(2, "random", seed=seed)
            np.testing.assert_allclose(spec.pi, GOLD_2, atol=1e-12)

    def test_n4_aligned_vector(self):
        # unit vector whose frame image is (1,1,-1,-1)/2
        v = np.array([0.0, 2.0 / np.sqrt(6.0), 1.0 / np.sqrt(3.0)])
        spec = solve_kernel_spectrum(4, "from_unit_vector", vector=v)
        gold = np.array([(1 + np.sqrt(15)) / 4] * 2 + [(1 - np.sqrt(15)) / 4] * 2)
        np.testing.assert_allclose(spec.pi, gold, atol=1e-12)
        assert abs(spec.pi.sum() - 1.0) < 1e-12
        assert abs((spec.pi**2).sum() - 4.0) < 1e-12

    @pytest.mark.parametrize("n", range(2, 9))
    def test_master_equation_residuals(self, n):
        for seed in range(100):
            spec = solve_kernel_spectrum(n, "random", seed=seed)
            assert abs(spec.pi.sum() - 1.0) < 1e-12
            assert abs((spec.pi**2).sum() - n) < 1e-12

    def test_sphere_radius_invariant(self):
        for n in (2, 3, 4, 6):
            spec = solve_kernel_spectrum(n, "random", seed=n)
            radius = np.linalg.norm(spec.traceless_part())
            assert abs(radius - np.sqrt(n - 1.0 / n)) < 1e-12
            assert abs(np.linalg.norm(spec.unit_direction()) - 1.0) < 1e-12

    def test_rejects_n1(self):
        with pytest.raises(ValueError):
            solve_kernel_spectrum(1)

    def test_rejects_bad_vector(self):
        with pytest.raises(ValueError):
            solve_kernel_spectrum(3, "from_unit_vector", vector=[1.0, 1.0])

    def test_spectrum_validation(self):
        with pytest.raises(ValueError):
            KernelSpectrum(np.array([0.9, 0.1]))  # purity 0.82 != 2


class TestKernelFromSpectrum:
    def test_identity_orbit_point(self):
        spec = solve_kernel_spectrum(2)
        ker = kernel_from_spectrum(spec, np.eye(2))
        np.testing.assert_allclose(ker.mat, np.diag(GOLD_2), atol=1e-15)

    def test_spectrum_invariance(self):
        spec = solve_kernel_spectrum(4, "random", seed=0)
        ker = kernel_from_spectrum(spec, haar_unitary(4, 1))
        np.testing.assert_allclose(ker.spectrum, spec.pi, atol=1e-12)

    def test_residuals_random_orbit(self):
        for seed in range(100):
            spec = solve_kernel_spectrum(4, "random", seed=seed)
            ker = kernel_from_spectrum(spec, haar_unitary(4, seed + 1000))
            assert abs(np.trace(ker.mat).real - 1.0) < 1e-12
            assert abs(np.trace(ker.mat @ ker.mat).real - 4.0) < 1e-12

    def test_rejects_non_unitary(self):
        spec = solve_kernel_spectrum(2)
        with pytest.raises(ValueError):
            kernel_from_spectrum(spec, np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestWignerValue:
    def test_maximally_mixed(self):
        n = 4
        rho = random_density(n, 0)
        spec = solve_kernel_spectrum(n, "random", seed=1)
        ker = kernel_from_spectrum(spec, haar_unitary(n, 2))
        mixed = type(rho)(np.eye(n) / n)
        assert abs(wigner_value(mixed, ker) - 1.0 / n) < 1e-12

    def test_diagonal_pairing(self):
        from swphase.linalg import DensityMatrix

        rho = DensityMatrix(np.diag([1.0, 0.0]))
        ker = kernel_from_spectrum(solve_kernel_spectrum(2), np.eye(2))
        assert abs(wigner_value(rho, ker) - GOLD_2[0]) < 1e-12

    def test_negativity_on_orbit(self):
        # conjugating by sigma_x swaps the kernel's eigenvalues
        from swphase.linalg import DensityMatrix

        rho = DensityMatrix(np.diag([1.0, 0.0]))
        sx = np.array([[0.0, 1.0], [1.0, 0.0]])
        ker = kernel_from_spectrum(solve_kernel_spectrum(2), sx)
        val = wigner_value(rho, ker)
        assert abs(val - GOLD_2[1]) < 1e-12
        assert val < 0.0

    def test_dimension_mismatch(self):
        rho = random_density(2, 0)
        ker = kernel_from_spectrum(solve_kernel_spectrum(4, "random", seed=0),
                                   haar_unitary(4, 0))
        with pytest.raises(ValueError):
            wigner_value(rho, ker)


class TestReconstructExact:
    def test_identity_on_states(self):
        for seed in range(50):
            rho = random_density(4, seed)
            spec = solve_kernel_spectrum(4, "random", seed=seed + 500)
            rec = reconstruct_exact(rho, spec)
            assert np.linalg.norm(rec - rho.mat) < 1e-12

    def test_maximally_mixed(self):
        from swphase.linalg import DensityMatrix

        rho = DensityMatrix(np.eye(4) / 4)
        rec = reconstruct_exact(rho, solve_kernel_spectrum(4, "random", seed=3))
        np.testing.assert_allclose(rec, np.eye(4) / 4, atol=1e-14)

    def test_perturbed_spectrum_matches_prediction(self):
        # spectrum with sum 1 but purity N + 0.5: the analytic map coefficients
        # predict the deviation exactly
        n = 4
        rho = random_density(n, 9)
        base = solve_kernel_spectrum(n, "random", seed=4).pi
        direction = base - 1.0 / n
        scale = np.sqrt((n + 0.5 - 1.0 / n) / (direction @ direction))
        perturbed = 1.0 / n + scale * direction
        assert abs(perturbed.sum() - 1.0) < 1e-12
        assert abs((perturbed**2).sum() - (n + 0.5)) < 1e-12
        rec = reconstruct_exact(rho, perturbed)
        alpha, beta = haar_second_moment_coefficients(n, 1.0, n + 0.5)
        predicted = n * (alpha * rho.mat + beta * np.eye(n))
        assert np.linalg.norm(rec - predicted) < 1e-13
        assert np.linalg.norm(rec - rho.mat) > 1e-3


class TestReconstructMC:
    def test_single_sample_bit_reproducible(self):
        rho = random_density(4, 0)
        spec = solve_kernel_spectrum(4, "random", seed=1)
        a = reconstruct_mc(rho, spec, 1, seed=42)
        b = reconstruct_mc(rho, spec, 1, seed=42)
        np.testing.assert_array_equal(a, b)

    def test_converges_towards_exact(self):
        rho = random_density(4, 2)
        spec = solve_kernel_spectrum(4, "random", seed=3)
        exact = reconstruct_exact(rho, spec)
        err_small = np.linalg.norm(reconstruct_mc(rho, spec, 500, seed=5) - exact)
        err_large = np.linalg.norm(reconstruct_mc(rho, spec, 50_000, seed=5) - exact)
        assert err_large < err_small

    def test_norm_estimate(self):
        rho = random_density(4, 4)
        spec = solve_kernel_spectrum(4, "random", seed=5)
        est = phase_space_norm_mc(rho, spec, 50_000, seed=6)
        assert abs(est - 1.0) < 0.03


class TestVerifyMaster:
    def test_valid_kernel(self):
        spec = solve_kernel_spectrum(4, "random", seed=0)
        ker = kernel_from_spectrum(spec, haar_unitary(4, 1))
        report = verify_master(ker.mat, 4)
        assert report.ok(1e-10)

    def test_maximally_mixed_purity_residual(self):
        n = 4
        report = verify_master(np.eye(n) / n, n)
        assert report.hermitian
        assert report.trace_residual < 1e-14
        assert abs(report.purity_residual - (n - 1.0 / n)) < 1e-12

    def test_perturbation_scale(self):
        from swphase.linalg import random_hermitian

        spec = solve_kernel_spectrum(4, "random", seed=7)
        ker = kernel_from_spectrum(spec, haar_unitary(4, 8))
        noise = random_hermitian(4, 9)
        noise = noise / np.linalg.norm(noise)
        report = verify_master(ker.mat + 1e-6 * noise, 4)
        assert 1e-8 < report.trace_residual + report.purity_residual < 1e-4


class TestCovariance:
    def test_identity_exact_zero(self):
        rho = random_density(4, 0)
        ker = kernel_from_spectrum(solve_kernel_spectrum(4, "random", seed=1),
                                   haar_unitary(4, 2))
        assert covariance_check(ker, rho, np.eye(4)) == 0.0

    def test_sweep(self):
        rho = random_density(4, 3)
        ker = kernel_from_spectrum(solve_kernel_spectrum(4, "random", seed=4),
                                   haar_unitary(4, 5))
        worst = max(covariance_check(ker, rho, haar_unitary(4, s))
                    for s in range(1000))
        assert worst < 1e-12
