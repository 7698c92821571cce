"""Simulated randomized-measurement campaigns and moment estimators.

Per state: a batch of tensor-product single-qubit rotations, a few
projective shots each, and the per-shot reconstruction factors
3 u^dag |b><b| u - 1.  Moments are estimated by averaging the permutation
kernel over tuples of snapshots whose rotations are pairwise distinct
(snapshots sharing a rotation are correlated, so mixing them would bias
the estimator).

Two evaluation paths compute that average.  The kernel value of a tuple
equals the trace of the product of the snapshots' partial transposes, so
the exact sum over all admissible tuples collapses, per rotation, onto the
shot-summed transposed snapshots; coincidence patterns are removed by
Moebius inversion over set partitions (closed forms for orders 2..4).
This is the default: it uses every tuple at matrix-product cost.  The
budgeted sampling path draws random tuples instead; it is unbiased but far
noisier, and serves as the independent oracle for the closed forms.
Errors come from a delete-one-rotation jackknife (exact downdates in the
closed-form path).
"""

import math
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from . import dense
from .errors import ValidationError
from .linalg import haar_unitary

TUPLE_BUDGET = 100_000


@dataclass
class CampaignConfig:
    """Measurement budget of one campaign."""

    n_states: int = 64
    n_unitaries: int = 100
    n_shots: int = 10
    tuple_budget: int = TUPLE_BUDGET
    seed: int = 0

    def __post_init__(self):
        for name in ("n_states", "n_unitaries", "n_shots", "tuple_budget"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")


@dataclass
class ShadowData:
    """Rotations and measured bit strings for one state."""

    unitaries: np.ndarray   # (N_u, n_qubits, 2, 2)
    bits: np.ndarray        # (N_u, N_m, n_qubits) in {0, 1}
    state_index: int = 0

    @property
    def n_qubits(self) -> int:
        return self.unitaries.shape[1]

    @property
    def n_unitaries(self) -> int:
        return self.unitaries.shape[0]

    @property
    def n_shots(self) -> int:
        return self.bits.shape[1]


def _apply_row_rotations(mat: np.ndarray, us: np.ndarray, n: int) -> np.ndarray:
    for q in range(n):
        pre = 1 << q
        arr = mat.reshape(pre, 2, -1)
        mat = np.einsum("ab,pbq->paq", us[q], arr, optimize=True).reshape(mat.shape)
    return mat


def rotate_density_matrix(rho: np.ndarray, us: np.ndarray) -> np.ndarray:
    """(u_1 x ... x u_n) rho (u_1 x ... x u_n)^dag."""
    n = us.shape[0]
    half = _apply_row_rotations(rho, us, n)
    return _apply_row_rotations(half.conj().T, us, n)


def simulate_measurements(state, n_unitaries: int, n_shots: int,
                          rng: np.random.Generator, state_index: int = 0) -> ShadowData:
    """Exact Born sampling of randomized single-qubit measurements.

    ``state`` is a DensityMatrix, a density matrix array, or a pure-state
    vector on the measured register.
    """
    if isinstance(state, dense.DensityMatrix):
        rho = state.matrix
    else:
        arr = np.asarray(state, dtype=complex)
        rho = np.outer(arr, arr.conj()) if arr.ndim == 1 else arr
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValidationError(f"state dimension {dim} is not a power of two")
    unitaries = np.empty((n_unitaries, n, 2, 2), dtype=complex)
    bits = np.empty((n_unitaries, n_shots, n), dtype=np.uint8)
    basis = np.arange(dim)
    decode = ((basis[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1).astype(np.uint8)
    for k in range(n_unitaries):
        us = np.stack([haar_unitary(2, rng) for _ in range(n)])
        unitaries[k] = us
        rotated = rotate_density_matrix(rho, us)
        probs = np.clip(np.real(np.diagonal(rotated)), 0, None)
        probs = probs / probs.sum()
        outcomes = rng.choice(dim, size=n_shots, p=probs)
        bits[k] = decode[outcomes]
    return ShadowData(unitaries, bits, state_index)


def shadow_factors(data: ShadowData) -> np.ndarray:
    """Per-qubit reconstruction factors 3 u^dag |b><b| u - 1, trace one each.

    Shape (N_u, N_m, n_qubits, 2, 2).
    """
    u_axis = np.arange(data.n_unitaries)[:, None, None]
    q_axis = np.arange(data.n_qubits)[None, None, :]
    rows = data.unitaries[u_axis, q_axis, data.bits.astype(np.int64), :]
    return 3 * rows[..., :, None].conj() * rows[..., None, :] - np.eye(2)


def _draw_tuples(n_unitaries: int, n_shots: int, order: int, budget: int,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, bool]:
    """Tuples of (rotation, shot) indices with pairwise-distinct rotations."""
    if n_unitaries < order:
        raise ValidationError(f"need at least {order} distinct rotations, have {n_unitaries}")
    total = math.perm(n_unitaries, order) * n_shots**order
    if total <= budget:
        u_idx = np.array(list(permutations(range(n_unitaries), order)), dtype=np.int64)
        m_idx = np.array(list(product(range(n_shots), repeat=order)), dtype=np.int64)
        u_rep = np.repeat(u_idx, len(m_idx), axis=0)
        m_rep = np.tile(m_idx, (len(u_idx), 1))
        return u_rep, m_rep, True
    u_idx = rng.integers(0, n_unitaries, size=(budget, order))
    bad = np.ones(budget, dtype=bool)
    while True:
        sorted_rows = np.sort(u_idx[bad], axis=1)
        dup = (np.diff(sorted_rows, axis=1) == 0).any(axis=1)
        keep = np.flatnonzero(bad)
        bad[keep[~dup]] = False
        if not bad.any():
            break
        u_idx[bad] = rng.integers(0, n_unitaries, size=(int(bad.sum()), order))
    m_idx = rng.integers(0, n_shots, size=(budget, order))
    return u_idx, m_idx, False


def _chain_traces(mats: np.ndarray, order_indices: list[int]) -> np.ndarray:
    """Traces of ordered 2x2 chain products, batched over axis 0."""
    acc = mats[:, order_indices[0]]
    for j in order_indices[1:]:
        acc = acc @ mats[:, j]
    return np.trace(acc, axis1=-2, axis2=-1)


def tuple_kernel_values(factors: np.ndarray, u_idx: np.ndarray, m_idx: np.ndarray,
                        n_a: int) -> np.ndarray:
    """Permutation-kernel value per tuple, factorized over qubits.

    Forward cyclic chains on the first ``n_a`` qubits, reversed cyclic
    chains on the rest; equals the 2^(n * N_AB)-dimensional permutation
    trace evaluated on the tensor product of the selected snapshots.
    """
    order = u_idx.shape[1]
    n_qubits = factors.shape[2]
    forward = list(range(order))
    backward = [0] + list(range(order - 1, 0, -1))
    values = np.ones(u_idx.shape[0], dtype=complex)
    for q in range(n_qubits):
        mats = factors[u_idx, m_idx, q]
        values *= _chain_traces(mats, forward if q < n_a else backward)
    return values


@dataclass
class MomentEstimate:
    """Campaign estimate of one moment with jackknife bookkeeping."""

    order: int
    value: float
    error: float
    per_state: np.ndarray
    loo_by_unitary: np.ndarray  # (n_states, n_unitaries) leave-one-out state means

    def __iter__(self):
        yield self.value
        yield self.error


def transposed_snapshot_sums(data: ShadowData, n_a: int) -> np.ndarray:
    """Shot-summed partially transposed snapshots, one matrix per rotation.

    The snapshot is the tensor product of per-qubit factors; transposing
    the factors on the B qubits turns every tuple-kernel value into a plain
    trace of a matrix product.
    """
    n = data.n_qubits
    dim = 1 << n
    factors = shadow_factors(data)
    factors = np.where(
        (np.arange(n) < n_a)[None, None, :, None, None],
        factors,
        factors.transpose(0, 1, 2, 4, 3),
    )
    out = np.empty((data.n_unitaries, dim, dim), dtype=complex)
    for k in range(data.n_unitaries):
        snap = factors[k, :, 0]
        for q in range(1, n):
            d = snap.shape[1]
            snap = (snap[:, :, None, :, None] * factors[k, :, q][:, None, :, None, :]).reshape(
                -1, 2 * d, 2 * d
            )
        out[k] = snap.sum(axis=0)
    return out


def _batch_trace(prod: np.ndarray) -> np.ndarray:
    return np.trace(prod, axis1=-2, axis2=-1)


def _exact_numerators(zs: np.ndarray) -> dict[int, tuple[complex, np.ndarray]]:
    """Sums of trace products over distinct-rotation tuples, orders 2..4.

    Moebius inversion over coincidence partitions reduces the sums to
    power sums of the per-rotation matrices plus one alternating double
    sum.  Returns {order: (full_sum, leave-one-rotation-out sums)}.
    """
    n_u = zs.shape[0]
    a = zs.sum(axis=0)
    z2 = zs @ zs
    z3 = z2 @ zs
    q = z2.sum(axis=0)
    c = z3.sum(axis=0)
    a2 = a @ a
    a3 = a2 @ a
    tr_a2, tr_a3, tr_a4 = np.trace(a2), np.trace(a3), np.trace(a2 @ a2)
    tr_q, tr_qa, tr_q2 = np.trace(q), np.trace(q @ a), np.trace(q @ q)
    tr_c, tr_ca = np.trace(c), np.trace(c @ a)
    # batched per-rotation traces
    t_az = _batch_trace(a[None] @ zs)
    t_z2 = _batch_trace(z2)
    t_z3 = _batch_trace(z3)
    t_z4 = _batch_trace(z2 @ z2)
    t_a2z = _batch_trace(a2[None] @ zs)
    t_az2 = _batch_trace(a[None] @ z2)
    t_a3z = _batch_trace(a3[None] @ zs)
    t_a2z2 = _batch_trace(a2[None] @ z2)
    t_azaz = _batch_trace((a[None] @ zs) @ (a[None] @ zs))
    t_az3 = _batch_trace(a[None] @ z3)
    t_qz = _batch_trace(q[None] @ zs)
    t_qz2 = _batch_trace(q[None] @ z2)
    t_azq = _batch_trace((a[None] @ zs) @ q[None])
    t_zaq = _batch_trace((zs @ a[None]) @ q[None])
    t_cz = _batch_trace(c[None] @ zs)
    phi_a = np.einsum("uij,jk,ukl->il", zs, a, zs, optimize=True)
    t_phia_z = _batch_trace(phi_a[None] @ zs)
    # alternating pattern: alt_v = sum_u tr[(Z_u Z_v)^2], free double sum
    dim = zs.shape[1]
    zflat = zs.reshape(n_u * dim, dim)
    alt = np.empty(n_u, dtype=complex)
    for v in range(n_u):
        w = (zflat @ zs[v]).reshape(n_u, dim, dim)
        alt[v] = np.sum(w * w.transpose(0, 2, 1))
    s_alt = alt.sum()
    r1 = t_azaz.sum()
    t4 = t_z4.sum()

    n2 = tr_a2 - tr_q
    n2_loo = n2 - 2 * t_az + 2 * t_z2

    n3 = tr_a3 - 3 * tr_qa + 2 * tr_c
    n3_loo = n3 - 3 * t_a2z + 6 * t_az2 + 3 * t_qz - 6 * t_z3

    n4 = tr_a4 - 4 * np.trace(a2 @ q) - 2 * r1 + 2 * tr_q2 + s_alt + 8 * tr_ca - 6 * t4
    tr_a2q = np.trace(a2 @ q)
    term_a = tr_a4 - 4 * t_a3z + 4 * t_a2z2 + 2 * t_azaz - 4 * t_az3 + t_z4
    term_b = tr_a2q - t_a2z2 - t_azq - t_zaq + 2 * t_az3 + t_qz2 - t_z4
    term_c = r1 - 2 * t_phia_z + alt - t_azaz + 2 * t_az3 - t_z4
    term_d = tr_q2 - 2 * t_qz2 + t_z4
    term_e = s_alt - 2 * alt + t_z4
    term_f = tr_ca - t_cz - t_az3 + t_z4
    term_g = t4 - t_z4
    n4_loo = term_a - 4 * term_b - 2 * term_c + 2 * term_d + term_e + 8 * term_f - 6 * term_g
    return {2: (n2, n2_loo), 3: (n3, n3_loo), 4: (n4, n4_loo)}


def _exact_state_moments(data: ShadowData, n_a: int) -> dict[int, tuple[float, np.ndarray]]:
    """Exact distinct-rotation U-statistics of one state, orders 2..4."""
    n_u, n_m = data.n_unitaries, data.n_shots
    if n_u < 5:
        raise ValidationError("the exact estimator needs at least 5 rotations per state")
    zs = transposed_snapshot_sums(data, n_a)
    nums = _exact_numerators(zs)
    out = {}
    for order, (full, loo) in nums.items():
        count = math.perm(n_u, order) * n_m**order
        count_loo = math.perm(n_u - 1, order) * n_m**order
        out[order] = ((full / count).real, (loo / count_loo).real)
    return out


def _state_moment_sampled(data: ShadowData, factors: np.ndarray, order: int, n_a: int,
                          budget: int, rng: np.random.Generator):
    u_idx, m_idx, _ = _draw_tuples(data.n_unitaries, data.n_shots, order, budget, rng)
    values = tuple_kernel_values(factors, u_idx, m_idx, n_a)
    total = values.sum()
    count = len(values)
    sums = np.zeros(data.n_unitaries, dtype=complex)
    np.add.at(sums, u_idx.reshape(-1), np.repeat(values, order))
    counts_per_u = np.bincount(u_idx.reshape(-1), minlength=data.n_unitaries)
    remaining = count - counts_per_u
    if (remaining == 0).any():
        raise ValidationError("a rotation appears in every tuple; increase the budget or N_u")
    loo = (total - sums) / remaining
    return (total / count).real, loo.real


def _combine_states(per_state: np.ndarray, loo: np.ndarray, order: int) -> MomentEstimate:
    n_states = len(per_state)
    value = per_state.mean()
    replicates = value + (loo - per_state[:, None]) / n_states
    center = replicates.mean()
    n_tot = replicates.size
    err = math.sqrt(max((n_tot - 1) / n_tot * np.sum((replicates - center) ** 2), 0.0))
    return MomentEstimate(order, float(value), err, per_state, loo)


def estimate_pt_moments(datasets: list[ShadowData], order: int, n_a: int,
                        budget: int = TUPLE_BUDGET,
                        rng: np.random.Generator | None = None,
                        method: str = "exact") -> MomentEstimate:
    """U-statistic estimate of one PT moment across a batch of states.

    The campaign value averages per-state estimates; the error is a
    delete-one-rotation jackknife over all (state, rotation) units.
    ``method='exact'`` evaluates every admissible tuple in closed form;
    ``method='sampled'`` draws tuples under ``budget``.
    """
    if not 2 <= order:
        raise ValidationError("moment order must be >= 2")
    if method == "exact" and order > 4:
        raise ValidationError("closed forms cover orders 2..4; use method='sampled'")
    rng = rng or np.random.default_rng(0)
    per_state = []
    loo_rows = []
    for data in datasets:
        if method == "exact":
            est, loo = _exact_state_moments(data, n_a)[order]
        elif method == "sampled":
            factors = shadow_factors(data)
            est, loo = _state_moment_sampled(data, factors, order, n_a, budget, rng)
        else:
            raise ValidationError(f"unknown method {method!r}")
        per_state.append(est)
        loo_rows.append(loo)
    return _combine_states(np.array(per_state), np.stack(loo_rows), order)


def campaign_r2(states, cfg: CampaignConfig, n_a: int,
                rng: np.random.Generator | None = None) -> dict:
    """Estimate the averaged-moment ratio of a batch of states from shadows.

    ``states`` is an iterable of density matrices (or vectors) on the AB
    register.  Returns the per-moment estimates, the plug-in ratio with a
    delete-one-rotation jackknife error, and the exact dense reference
    computed from the same states.
    """
    rng = rng or np.random.default_rng(cfg.seed)
    dense_moments = {2: [], 3: [], 4: []}
    per_state = {order: [] for order in (2, 3, 4)}
    loo_rows = {order: [] for order in (2, 3, 4)}
    n_states = 0
    for index, state in enumerate(states):
        if isinstance(state, dense.DensityMatrix):
            rho = state
        else:
            arr = np.asarray(state, dtype=complex)
            mat = np.outer(arr, arr.conj()) if arr.ndim == 1 else arr
            n_qubits = mat.shape[0].bit_length() - 1
            rho = dense.DensityMatrix(mat, n_a, n_qubits - n_a)
        spec = dense.negativity_spectrum(rho)
        for order in (2, 3, 4):
            dense_moments[order].append(spec.moment(order))
        data = simulate_measurements(rho, cfg.n_unitaries, cfg.n_shots, rng, state_index=index)
        moments = _exact_state_moments(data, n_a)
        for order in (2, 3, 4):
            est, loo = moments[order]
            per_state[order].append(est)
            loo_rows[order].append(loo)
        n_states += 1
    estimates = {
        order: _combine_states(np.array(per_state[order]), np.stack(loo_rows[order]), order)
        for order in (2, 3, 4)
    }
    p2, p3, p4 = (estimates[k].value for k in (2, 3, 4))
    if p4 == 0:
        raise ValidationError("estimated p4 vanished; cannot form the ratio")
    value = p2 * p3 / p4
    reps = {}
    for order in (2, 3, 4):
        e = estimates[order]
        reps[order] = e.value + (e.loo_by_unitary - e.per_state[:, None]) / n_states
    ratio_reps = reps[2] * reps[3] / reps[4]
    center = ratio_reps.mean()
    n_tot = ratio_reps.size
    err = math.sqrt(max((n_tot - 1) / n_tot * np.sum((ratio_reps - center) ** 2), 0.0))
    from .stats import ratio_of_means

    dense_value, dense_err = ratio_of_means(
        dense_moments[2], dense_moments[3], dense_moments[4]
    )
    return {
        "r2_tilde": float(value),
        "r2_tilde_err": err,
        "moments": {k: (e.value, e.error) for k, e in estimates.items()},
        "dense_r2_tilde": dense_value,
        "dense_r2_tilde_err": dense_err,
        "dense_moments": {k: float(np.mean(v)) for k, v in dense_moments.items()},
        "n_measurements": n_states * cfg.n_unitaries * cfg.n_shots,
    }


def mean_shadow(data: ShadowData) -> np.ndarray:
    """Average full-register snapshot; unbiased for the measured state."""
    factors = shadow_factors(data)
    n = data.n_qubits
    dim = 1 << n
    acc = np.zeros((dim, dim), dtype=complex)
    for k in range(data.n_unitaries):
        for m in range(data.n_shots):
            snap = np.array([[1.0 + 0j]])
            for q in range(n):
                snap = np.kron(snap, factors[k, m, q])
            acc += snap
    return acc / (data.n_unitaries * data.n_shots)
