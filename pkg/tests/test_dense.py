import math

import numpy as np
import pytest

from ptphase import dense
from ptphase.errors import CapabilityError, ValidationError
from ptphase.tripartition import Tripartition

from conftest import haar_reduced, random_density_matrix


def ghz_state(n):
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


class TestPartialTrace:
    def test_bell_single_qubit(self, bell_dm):
        red = dense.partial_trace(bell_dm, "A")
        assert np.allclose(red.matrix, np.eye(2) / 2)

    def test_product_state_leaves_pure_factor(self, rng):
        phi = dense.haar_state_vector(2, rng)
        psi = np.kron(np.array([1, 0]), phi)
        state = dense.PureState(psi, Tripartition(1, 2, 0))
        red = dense.partial_trace(state, "B")
        purity = np.trace(red.matrix @ red.matrix).real
        assert purity == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(red.matrix, np.outer(phi, phi.conj()))

    def test_ghz_reduction_is_classical(self):
        state = dense.PureState(ghz_state(3), Tripartition(1, 1, 1))
        red = dense.reduce_to_ab(state)
        assert np.allclose(red.matrix, np.diag([0.5, 0, 0, 0.5]))

    def test_trace_one_hermitian(self, rng):
        t = Tripartition(2, 1, 2)
        red = haar_reduced(t, rng)
        assert red.matrix.trace().real == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(red.matrix, red.matrix.conj().T)


class TestPartialTranspose:
    def test_involution(self, rng):
        rho = dense.DensityMatrix(random_density_matrix(8, rng), 1, 2)
        pt = dense.partial_transpose(rho)
        back = dense.partial_transpose(dense.DensityMatrix(pt, 1, 2, validate=False))
        assert np.array_equal(back, rho.matrix)

    def test_product_spectrum_preserved(self, rng):
        ra = random_density_matrix(2, rng)
        rb = random_density_matrix(4, rng)
        rho = dense.DensityMatrix(np.kron(ra, rb), 1, 2)
        pt = dense.partial_transpose(rho)
        assert np.allclose(pt, np.kron(ra, rb.T))
        assert np.allclose(
            np.sort(np.linalg.eigvalsh(pt)), np.sort(np.linalg.eigvalsh(rho.matrix)), atol=1e-12
        )

    def test_bell_spectrum(self, bell_dm):
        spec = dense.negativity_spectrum(bell_dm)
        assert np.allclose(np.sort(spec.lambdas), [-0.5, 0.5, 0.5, 0.5])

    def test_maximally_mixed_fixed_point(self):
        rho = dense.DensityMatrix(np.eye(4) / 4, 1, 1)
        assert np.allclose(dense.partial_transpose(rho), rho.matrix)


class TestMoments:
    def test_first_moment_always_one(self, rng):
        rho = dense.DensityMatrix(random_density_matrix(8, rng), 2, 1)
        m = dense.pt_moments(rho)
        assert m[1] == pytest.approx(1.0, abs=1e-10)

    def test_bell_values(self, bell_dm):
        m = dense.pt_moments(bell_dm)
        assert m[2] == pytest.approx(1.0, abs=1e-12)
        assert m[3] == pytest.approx(0.25, abs=1e-12)
        assert m[4] == pytest.approx(0.25, abs=1e-12)
        assert dense.r2(m) == pytest.approx(1.0, abs=1e-12)

    def test_pure_product_all_ones(self, rng):
        a = dense.haar_state_vector(1, rng)
        b = dense.haar_state_vector(2, rng)
        rho = np.outer(np.kron(a, b), np.kron(a, b).conj())
        m = dense.pt_moments(dense.DensityMatrix(rho, 1, 2))
        for n in (1, 2, 3, 4):
            assert m[n] == pytest.approx(1.0, abs=1e-10)

    def test_spectrum_sum_rules(self, rng):
        t = Tripartition(2, 2, 2)
        rho = haar_reduced(t, rng)
        spec = dense.negativity_spectrum(rho)
        assert spec.moment(1) == pytest.approx(1.0, abs=1e-10)
        p2_direct = np.trace(rho.matrix @ rho.matrix).real
        assert spec.moment(2) == pytest.approx(p2_direct, abs=1e-10)
        assert spec.moment(2) <= 1 + 1e-12

    def test_hamburger_inequality(self, rng):
        for _ in range(25):
            rho = dense.DensityMatrix(random_density_matrix(16, rng, rank=5), 2, 2)
            m = dense.pt_moments(rho)
            assert m[2] * m[4] - m[3] ** 2 >= -1e-12


class TestPureFastPath:
    def test_matches_dense_spectrum(self, rng):
        for n_a, n_b in [(1, 1), (2, 2), (1, 3), (3, 2)]:
            psi = dense.haar_state_vector(n_a + n_b, rng)
            rho = dense.DensityMatrix(np.outer(psi, psi.conj()), n_a, n_b)
            fast = dense.pure_pt_spectrum(psi, n_a, n_b)
            slow = dense.negativity_spectrum(rho)
            for n in (1, 2, 3, 4):
                assert fast.moment(n) == pytest.approx(slow.moment(n), abs=1e-10)
            assert fast.negativity == pytest.approx(slow.negativity, abs=1e-10)


class TestNegativity:
    def test_separable_diagonal(self):
        rho = dense.DensityMatrix(np.diag([0.4, 0.3, 0.2, 0.1]), 1, 1)
        assert dense.negativity(rho) == pytest.approx(0.0, abs=1e-12)

    def test_bell_is_one(self, bell_dm):
        assert dense.negativity(bell_dm) == pytest.approx(1.0, abs=1e-12)

    def test_r2_equals_epsilon_identity(self, rng):
        t = Tripartition(2, 2, 1)
        rho = haar_reduced(t, rng)
        spec = dense.negativity_spectrum(rho)
        m = spec.moments(4)
        eps = spec.epsilons()
        assert dense.r2(m) == pytest.approx(eps.sum() / (eps**2).sum(), abs=1e-10)


class TestRescaledSpectrum:
    def test_bell_epsilons_all_one(self, bell_dm):
        spec = dense.negativity_spectrum(bell_dm)
        eps, hist, edges, scaled = dense.rescaled_spectrum(spec)
        assert scaled
        assert np.allclose(eps, 1.0)
        assert len(hist) == dense.HIST_BINS
        # density normalization over the binned support
        width = edges[1] - edges[0]
        assert hist.sum() * width == pytest.approx(1.0)

    def test_unscaled_fallback(self):
        rho = dense.DensityMatrix(np.diag([0.9, 0.1, 0.0, 0.0]), 1, 1)
        spec = dense.NegativitySpectrum(np.array([0.9, -0.1, 0.05, 0.0]))
        if spec.moment(3) <= 0:
            _, _, _, scaled = dense.rescaled_spectrum(spec)
            assert not scaled


class TestDetect:
    def test_separable_state_unflagged(self, rng):
        ra = random_density_matrix(2, rng)
        rb = random_density_matrix(2, rng)
        rho = dense.DensityMatrix(np.kron(ra, rb), 1, 1)
        report = dense.detect(rho)
        assert report.alpha2 >= -1e-12
        assert not report.r2_entangled
        assert not report.p3_ppt_violated

    def test_bell_flags(self, bell_dm):
        report = dense.detect(bell_dm)
        assert report.p3_ppt_violated  # 1/4 < 1
        assert report.e3 == pytest.approx(1.0, abs=1e-12)
        assert report.negativity == pytest.approx(1.0, abs=1e-12)

    def test_r2_implies_p3_violation(self, rng):
        t = Tripartition(3, 3, 2)
        hits = 0
        for _ in range(40):
            report = dense.detect(haar_reduced(t, rng))
            if report.r2_entangled:
                hits += 1
                assert report.p3_ppt_violated
        assert hits > 0  # the ES point does produce r2 > 1 states


class TestDepolarize:
    def test_endpoints(self, bell_dm):
        assert np.allclose(dense.depolarize(bell_dm, 0.0).matrix, bell_dm.matrix)
        out = dense.depolarize(bell_dm, 1.0)
        assert np.allclose(out.matrix, np.eye(4) / 4)
        m = dense.pt_moments(out)
        for n in (2, 3, 4):
            assert m[n] == pytest.approx(4.0 ** (1 - n), abs=1e-12)

    def test_matches_moment_transform(self, rng):
        from ptphase.moments import white_noise_moments

        t = Tripartition(2, 2, 2)
        rho = haar_reduced(t, rng)
        eps = 0.37
        direct = dense.pt_moments(dense.depolarize(rho, eps))
        mapped = white_noise_moments(dense.pt_moments(rho), eps, rho.dim)
        for n in (1, 2, 3, 4):
            assert direct[n] == pytest.approx(float(mapped[n]), abs=1e-10)

    def test_range_check(self, bell_dm):
        with pytest.raises(ValidationError):
            dense.depolarize(bell_dm, -0.1)


class TestLimits:
    def test_dense_limit_enforced(self):
        with pytest.raises(CapabilityError):
            dense.DensityMatrix(np.eye(2), 8, 8)

    def test_vector_limit_enforced(self, rng):
        with pytest.raises(CapabilityError):
            dense.haar_state_vector(30, rng)


class TestEntropy:
    def test_bell_entropy_is_one(self):
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[3] = 1 / math.sqrt(2)
        assert dense.bipartite_entropy(psi, 1) == pytest.approx(1.0, abs=1e-12)

    def test_renyi2_of_product_is_zero(self, rng):
        a = dense.haar_state_vector(1, rng)
        b = dense.haar_state_vector(2, rng)
        psi = np.kron(a, b)
        assert dense.bipartite_entropy(psi, 1, renyi=2) == pytest.approx(0.0, abs=1e-10)
