"""Random matrix-product states and reduced matrices on a central window.

Site tensors come from reshaped Haar unitaries of dimension 2*chi (rows
orthonormal, so left transfer products stay conditioned), boundary vectors
are complex Gaussians, and the state is normalized globally.  The reduced
matrix on a contiguous window is assembled densely after contracting the
left/right environments, which costs linearly in the traced-out length.
"""

from dataclasses import dataclass

import numpy as np

from . import dense
from .errors import CapabilityError, ValidationError
from .linalg import haar_unitary
from .stats import summarize
from .tripartition import Tripartition


@dataclass
class MpsState:
    """Open-boundary MPS: per-site (2, chi, chi) tensors and boundary vectors."""

    tensors: list[np.ndarray]
    v_left: np.ndarray
    v_right: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def chi(self) -> int:
        return self.tensors[0].shape[1]


def sample_rmps(n: int, chi: int, rng: np.random.Generator) -> MpsState:
    """Draw a random MPS of n qubits at bond dimension chi and normalize it.

    Each site tensor is the top chi rows of a Haar unitary of size 2*chi
    split column-wise by the physical index; the boundary vectors are
    standard complex Gaussians.
    """
    if chi < 1:
        raise ValidationError(f"bond dimension must be >= 1, got {chi}")
    if n < 1:
        raise ValidationError(f"chain length must be >= 1, got {n}")
    tensors = []
    for _ in range(n):
        u = haar_unitary(2 * chi, rng)
        tensors.append(np.stack([u[:chi, :chi], u[:chi, chi:]], axis=0))
    v_left = (rng.standard_normal(chi) + 1j * rng.standard_normal(chi)) / np.sqrt(2)
    v_right = (rng.standard_normal(chi) + 1j * rng.standard_normal(chi)) / np.sqrt(2)
    state = MpsState(tensors, v_left, v_right)
    norm = np.sqrt(norm_squared(state))
    if norm == 0:
        raise ValidationError("sampled a zero-norm state (measure-zero event)")
    state.v_right = state.v_right / norm
    return state


def _left_env(state: MpsState, sites) -> np.ndarray:
    env = np.outer(state.v_left, state.v_left.conj())
    for i in sites:
        m = state.tensors[i]
        env = sum(m[s].T @ env @ m[s].conj() for s in (0, 1))
    return env


def _right_env(state: MpsState, sites) -> np.ndarray:
    env = np.outer(state.v_right, state.v_right.conj())
    for i in reversed(list(sites)):
        m = state.tensors[i]
        env = sum(m[s] @ env @ m[s].conj().T for s in (0, 1))
    return env


def norm_squared(state: MpsState) -> float:
    env = _left_env(state, range(state.n_sites))
    return float(np.real(state.v_right.conj() @ env.T @ state.v_right))


def to_dense(state: MpsState) -> np.ndarray:
    """Full amplitude vector by direct contraction (small n only)."""
    n = state.n_sites
    if n > dense.VECTOR_QUBIT_LIMIT:
        raise CapabilityError(f"{n} sites exceeds the dense vector limit")
    block = state.v_left[None, :]  # (configurations, bond)
    for i in range(n):
        m = state.tensors[i]
        block = np.stack([block @ m[0], block @ m[1]], axis=1).reshape(-1, state.chi)
    return block @ state.v_right


def reduced_density_matrix(state: MpsState, n_a: int, n_b: int,
                           window_start: int | None = None) -> dense.DensityMatrix:
    """Reduced matrix on a contiguous AB window, environment traced out.

    By default the window sits centrally with ceil(N_C / 2) sites on the
    left and the remainder on the right.
    """
    n = state.n_sites
    n_ab = n_a + n_b
    if n_ab > dense.DENSE_AB_LIMIT:
        raise CapabilityError(f"window of {n_ab} sites exceeds the dense limit")
    if n_ab > n:
        raise ValidationError(f"window of {n_ab} sites does not fit a chain of {n}")
    if window_start is None:
        window_start = (n - n_ab + 1) // 2
    if not 0 <= window_start <= n - n_ab:
        raise ValidationError(f"window start {window_start} out of range")
    chi = state.chi
    env_l = _left_env(state, range(window_start))
    env_r = _right_env(state, range(window_start + n_ab, n))
    block = _window_block(state, window_start, n_ab)
    # rho[s, t] = sum_{b g B G} T_s[b,g] E_L[b,B] E_R[g,G] conj(T_t)[B,G]
    w = env_l @ block.conj() @ env_r.T
    dim = 1 << n_ab
    rho = block.reshape(dim, -1) @ w.reshape(dim, -1).T
    tr = rho.trace().real
    if tr <= 0:
        raise ValidationError("window reduction produced a nonpositive trace")
    rho = (rho + rho.conj().T) / (2 * tr)
    return dense.DensityMatrix(rho, n_a, n_b)


def _window_block(state: MpsState, start: int, length: int) -> np.ndarray:
    """Matrix products over the window, one (chi, chi) slab per bit string."""
    chi = state.chi
    block = np.eye(chi, dtype=complex)[None, :, :]
    for i in range(start, start + length):
        m = state.tensors[i]
        block = np.stack([block @ m[0], block @ m[1]], axis=1).reshape(-1, chi, chi)
    return block


def mps_phase_diagram(n_ab: int, chi: int, n_a_values, n_c_values, count: int,
                      seed: int, jobs: int = 1) -> list[dict]:
    """Averaged ratio and negativity on an (N_A, N_C) grid at fixed N_AB."""
    from .ensembles import EnsembleSpec, run_ensemble

    rows = []
    point = 0
    for n_a in n_a_values:
        for n_c in n_c_values:
            t = Tripartition(n_a, n_ab - n_a, n_c)
            spec = EnsembleSpec("rmps", t, count, seed, {"chi": chi})
            stats = run_ensemble(spec, jobs=jobs, point_index=point)
            rows.append(
                {
                    "n_a": n_a,
                    "n_b": t.n_b,
                    "n_c": n_c,
                    "r2_tilde": stats.r2_tilde,
                    "r2_tilde_err": stats.r2_tilde_err,
                    "mean_negativity": stats.means["negativity"],
                    "se_negativity": stats.std_errors["negativity"],
                    "n_samples": stats.n_samples,
                }
            )
            point += 1
    return rows
