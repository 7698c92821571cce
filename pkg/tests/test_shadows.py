import math

import numpy as np
import pytest

from ptphase import dense, shadows
from ptphase.ensembles import sample_haar_state, sample_rng
from ptphase.errors import ValidationError
from ptphase.tripartition import Tripartition

from conftest import random_density_matrix


def permutation_operator(perm, dim):
    """Dense operator sending the k-th tensor slot to slot position per perm."""
    order = len(perm)
    total = dim**order
    mat = np.zeros((total, total))
    for col in range(total):
        digits = []
        rest = col
        for _ in range(order):
            digits.append(rest % dim)
            rest //= dim
        digits = digits[::-1]  # slot 0 most significant
        row_digits = [digits[perm[k]] for k in range(order)]
        row = 0
        for d in row_digits:
            row = row * dim + d
        mat[row, col] = 1.0
    return mat


def pt_kernel_operator(order, n_a, n_b):
    """Pi_A(cyclic) x Pi_B(anticyclic) on ``order`` copies of the AB register."""
    from ptphase.perms import anticyclic_perm, cyclic_perm

    pa = permutation_operator(cyclic_perm(order), 1 << n_a)
    pb = permutation_operator(anticyclic_perm(order), 1 << n_b)
    # interleave copies: full operator acts on (A B)^order, build by axis shuffle
    da, db = 1 << n_a, 1 << n_b
    op = np.kron(pa, pb)  # acts on A-copies x B-copies
    dims = [da] * order + [db] * order
    tensor = op.reshape(dims + dims)
    axes = []
    for k in range(order):
        axes += [k, order + k]
    axes = axes + [2 * order + ax for ax in axes]
    tensor = tensor.transpose(axes)
    total = (da * db) ** order
    return tensor.reshape(total, total)


class TestKernelOperator:
    @pytest.mark.parametrize("order", [2, 3])
    @pytest.mark.parametrize("n_a,n_b", [(1, 1), (1, 2), (2, 1)])
    def test_operator_reproduces_moments(self, rng, order, n_a, n_b):
        # the multicopy expectation of the kernel equals tr[(rho^Gamma)^order]
        rho = random_density_matrix(1 << (n_a + n_b), rng)
        op = pt_kernel_operator(order, n_a, n_b)
        stacked = rho
        for _ in range(order - 1):
            stacked = np.kron(stacked, rho)
        value = np.trace(op @ stacked).real
        m = dense.pt_moments(dense.DensityMatrix(rho, n_a, n_b), nmax=order)
        assert value == pytest.approx(m[order], abs=1e-10)


class TestSimulation:
    def test_identity_rotation_on_zero_state(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        data = shadows.ShadowData(
            unitaries=np.broadcast_to(np.eye(2), (3, 2, 2, 2)).copy(),
            bits=np.zeros((3, 2, 2), dtype=np.uint8),
        )
        # Born sampling of |00> under identity rotations can only yield 00
        sim = shadows.simulate_measurements(rho, 5, 4, np.random.default_rng(0))
        del data
        rotated_probs = []
        for k in range(5):
            out = shadows.rotate_density_matrix(rho, sim.unitaries[k])
            rotated_probs.append(np.real(np.diagonal(out)))
        for k in range(5):
            for m in range(4):
                idx = int("".join(map(str, sim.bits[k, m])), 2)
                assert rotated_probs[k][idx] > 0

    def test_z_marginal_matches_born(self, rng):
        # empirical <Z_1> over many shots agrees with the exact value
        vec = dense.haar_state_vector(2, rng)
        rho = np.outer(vec, vec.conj())
        shots = 10_000
        data = shadows.simulate_measurements(rho, 1, shots, rng)
        us = data.unitaries[0]
        rotated = shadows.rotate_density_matrix(rho, us)
        probs = np.real(np.diagonal(rotated))
        exact = probs[0] + probs[1] - probs[2] - probs[3]  # <Z x I> after rotation
        emp = np.mean(1 - 2 * data.bits[0, :, 0].astype(float))
        se = math.sqrt(max(1 - exact**2, 1e-4) / shots)
        assert abs(emp - exact) < 4 * se

    def test_factors_have_unit_trace(self, rng):
        rho = random_density_matrix(4, rng)
        data = shadows.simulate_measurements(rho, 6, 3, rng)
        factors = shadows.shadow_factors(data)
        traces = np.trace(factors, axis1=-2, axis2=-1)
        assert np.allclose(traces, 1.0, atol=1e-10)

    def test_mean_shadow_unbiased(self, rng):
        rho = random_density_matrix(4, rng)
        data = shadows.simulate_measurements(rho, 4000, 25, rng)
        est = shadows.mean_shadow(data)
        spread = 6.0 / math.sqrt(data.n_unitaries * data.n_shots)
        assert np.abs(est - rho).max() < 5 * spread


class TestTuples:
    def test_exhaustive_small(self, rng):
        u, m, exhaustive = shadows._draw_tuples(4, 2, 2, budget=10_000, rng=rng)
        assert exhaustive
        assert len(u) == 4 * 3 * 4
        assert all(len(set(row)) == len(row) for row in u)

    def test_subsampled_distinct(self, rng):
        u, m, exhaustive = shadows._draw_tuples(30, 5, 4, budget=500, rng=rng)
        assert not exhaustive
        assert u.shape == (500, 4)
        assert all(len(set(row)) == 4 for row in u)

    def test_too_few_unitaries(self, rng):
        with pytest.raises(ValidationError):
            shadows._draw_tuples(2, 5, 3, budget=10, rng=rng)


class TestFactorizedKernel:
    @pytest.mark.parametrize("order", [2, 3])
    def test_matches_naive_operator(self, rng, order):
        # factorized chains equal the full 2^(order*N) permutation trace
        n_a, n_b = 1, 2
        rho = random_density_matrix(1 << (n_a + n_b), rng)
        data = shadows.simulate_measurements(rho, order + 2, 2, rng)
        factors = shadows.shadow_factors(data)
        u_idx, m_idx, _ = shadows._draw_tuples(order + 2, 2, order, budget=10**6, rng=rng)
        fast = shadows.tuple_kernel_values(factors, u_idx, m_idx, n_a)
        op = pt_kernel_operator(order, n_a, n_b)
        for t in range(0, len(u_idx), max(1, len(u_idx) // 7)):
            snap = np.array([[1.0 + 0j]])
            for j in range(order):
                full = np.array([[1.0 + 0j]])
                for q in range(n_a + n_b):
                    full = np.kron(full, factors[u_idx[t, j], m_idx[t, j], q])
                snap = np.kron(snap, full)
            naive = np.trace(op @ snap)
            assert fast[t] == pytest.approx(naive, abs=1e-9)


class TestMomentEstimation:
    @pytest.mark.parametrize("order", [2, 3, 4])
    def test_exact_equals_exhaustive_sampled(self, rng, order):
        # the closed forms and the tuple path are the same U-statistic
        vec = dense.haar_state_vector(3, rng)
        rho = 0.8 * np.outer(vec, vec.conj()) + 0.2 * np.eye(8) / 8
        data = shadows.simulate_measurements(rho, order + 3, 2, rng)
        exact = shadows.estimate_pt_moments([data], order, n_a=1, method="exact")
        sampled = shadows.estimate_pt_moments([data], order, n_a=1, budget=10**7,
                                              method="sampled")
        assert exact.value == pytest.approx(sampled.value, rel=1e-8)

    def test_unbiased_over_campaigns(self, rng):
        # mean estimator error of p2 over many independent small campaigns
        t = Tripartition(1, 1, 1)
        state = sample_haar_state(t, sample_rng(5, 0))
        rho = dense.reduce_to_ab(state)
        exact = dense.pt_moments(rho)[2]
        errs = []
        for c in range(220):
            data = shadows.simulate_measurements(rho, 12, 2, sample_rng(6, c))
            est = shadows.estimate_pt_moments([data], 2, n_a=1, rng=sample_rng(7, c))
            errs.append(est.value - exact)
        errs = np.array(errs)
        se = errs.std(ddof=1) / math.sqrt(len(errs))
        assert abs(errs.mean()) < 3 * se

    @pytest.mark.parametrize("order", [3, 4])
    def test_unbiased_higher_orders(self, rng, order):
        t = Tripartition(1, 1, 1)
        state = sample_haar_state(t, sample_rng(15, 0))
        rho = dense.reduce_to_ab(state)
        exact = dense.pt_moments(rho)[order]
        errs = []
        for c in range(150):
            data = shadows.simulate_measurements(rho, 8, 3, sample_rng(16, c))
            est = shadows.estimate_pt_moments([data], order, n_a=1)
            errs.append(est.value - exact)
        errs = np.array(errs)
        se = errs.std(ddof=1) / math.sqrt(len(errs))
        assert abs(errs.mean()) < 3 * se

    def test_jackknife_zero_on_constant_data(self):
        # identical rotations and outcomes across the batch give zero spread
        us = np.broadcast_to(np.eye(2), (6, 2, 2, 2)).copy()
        bits = np.zeros((6, 1, 2), dtype=np.uint8)
        data = shadows.ShadowData(np.array(us), bits)
        est = shadows.estimate_pt_moments([data], 2, n_a=1)
        assert est.error == pytest.approx(0.0, abs=1e-12)

    def test_error_shrinks_with_more_rotations(self, rng):
        t = Tripartition(2, 2, 2)
        state = sample_haar_state(t, sample_rng(8, 0))
        rho = dense.reduce_to_ab(state)
        errors = []
        for n_u in (16, 64, 256):
            data = shadows.simulate_measurements(rho, n_u, 5, sample_rng(9, n_u))
            est = shadows.estimate_pt_moments([data], 2, n_a=2)
            errors.append(est.error)
        assert errors[2] < errors[0]


class TestCampaign:
    def test_consistent_with_dense_reference(self):
        t = Tripartition(2, 2, 2)
        states = [
            dense.reduce_to_ab(sample_haar_state(t, sample_rng(11, i))) for i in range(8)
        ]
        cfg = shadows.CampaignConfig(n_states=8, n_unitaries=150, n_shots=10,
                                     tuple_budget=20_000, seed=3)
        result = shadows.campaign_r2(states, cfg, n_a=2, rng=sample_rng(12, 0))
        assert abs(result["r2_tilde"] - result["dense_r2_tilde"]) < 3.5 * result["r2_tilde_err"]

    def test_infinite_statistics_limit(self):
        # plugging the dense moments straight into the ratio recovers the
        # per-ensemble reference exactly
        t = Tripartition(1, 2, 2)
        states = [
            dense.reduce_to_ab(sample_haar_state(t, sample_rng(21, i))) for i in range(6)
        ]
        from ptphase.stats import ratio_of_means

        p = {n: [] for n in (2, 3, 4)}
        for rho in states:
            m = dense.pt_moments(rho)
            for n in p:
                p[n].append(float(m[n]))
        direct, _ = ratio_of_means(p[2], p[3], p[4])
        cfg = shadows.CampaignConfig(n_states=6, n_unitaries=30, n_shots=2, seed=1)
        result = shadows.campaign_r2(states, cfg, n_a=1, rng=sample_rng(22, 0))
        assert result["dense_r2_tilde"] == pytest.approx(direct)
