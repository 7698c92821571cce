"""Fermionic Gaussian ensemble: covariances, PT moments, matchgate circuits.

The covariance convention is G_jk = tr(rho [c_j, c_k]) / 2 with Majorana
operators c_{2k-1} = a_k + a_k^dag, c_{2k} = -i(a_k - a_k^dag); G is
antisymmetric, purely imaginary for physical states, and squares to the
identity exactly on pure states.

The partially transposed reduced operator is a combination of two Gaussian
kernels.  Traces of products of Gaussian kernels are evaluated by pairwise
composition: the scalar of a pair is a Pfaffian (polynomial, so there is no
square-root branch to track) normalized once against the vacuum, and the
composed kernel follows a Moebius-type rule.  The whole algebra is certified
against a dense Jordan-Wigner oracle in the test suite.
"""

from functools import lru_cache

import numpy as np

from . import dense
from .errors import CapabilityError, NumericError, UnsupportedLayoutError, ValidationError
from .linalg import haar_special_orthogonal, haar_unitary
from .tripartition import Tripartition

COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# covariance construction and restriction


def vacuum_covariance(n_modes: int) -> np.ndarray:
    """Block-diagonal covariance of the Fock vacuum: [[0, i], [-i, 0]] per mode."""
    if n_modes < 1:
        raise ValidationError(f"n_modes must be >= 1, got {n_modes}")
    g = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
    for k in range(n_modes):
        g[2 * k, 2 * k + 1] = 1j
        g[2 * k + 1, 2 * k] = -1j
    return g


def sample_special_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform SO(dim) rotation (dim must be even for Majorana use)."""
    if dim % 2:
        raise ValidationError(f"Majorana rotations need even dimension, got {dim}")
    return haar_special_orthogonal(dim, rng)


def rotate_covariance(g: np.ndarray, r: np.ndarray) -> np.ndarray:
    return r @ g @ r.T


def restrict_covariance(g: np.ndarray, start: int, n_keep: int) -> np.ndarray:
    """Covariance of the reduced state on modes [start, start + n_keep)."""
    n_modes = g.shape[0] // 2
    if not (0 <= start and start + n_keep <= n_modes):
        raise ValidationError(f"mode window [{start}, {start + n_keep}) out of range")
    sl = slice(2 * start, 2 * (start + n_keep))
    return g[sl, sl].copy()


def pt_kernel(gprime: np.ndarray, n_a_modes: int) -> np.ndarray:
    """Kernel covariance of the '+' Gaussian factor of the partial transpose.

    Blocks: [[G_AA, i G_AB], [i G_BA, -G_BB]] for adjacent mode blocks A
    then B.  The '-' factor is the adjoint, with covariance -conj of this.
    """
    n_ab = gprime.shape[0] // 2
    if not 0 <= n_a_modes <= n_ab:
        raise ValidationError(f"n_a_modes={n_a_modes} outside [0, {n_ab}]")
    cut = 2 * n_a_modes
    out = gprime.astype(complex).copy()
    out[:cut, cut:] *= 1j
    out[cut:, :cut] *= 1j
    out[cut:, cut:] *= -1
    return out


def restrict_and_gplus(g: np.ndarray, split: tuple[int, int],
                       keep_start: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Reduced covariance on a contiguous AB block plus its PT '+' kernel.

    ``split`` is (N_A_modes, N_B_modes); the kept block starts at
    ``keep_start`` and A precedes B inside it.  Non-contiguous layouts are
    rejected: reordering would need fermionic swaps we do not implement.
    """
    n_a, n_b = split
    if n_a < 0 or n_b < 0:
        raise UnsupportedLayoutError("mode counts must be nonnegative")
    gprime = restrict_covariance(g, keep_start, n_a + n_b)
    return gprime, pt_kernel(gprime, n_a)


# ---------------------------------------------------------------------------
# pfaffian and the Gaussian kernel algebra


def pfaffian(a: np.ndarray) -> complex:
    """Pfaffian of an even-dimensional antisymmetric matrix.

    Parlett-Reid elimination with partial pivoting, O(n^3); valid for real
    or complex entries.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValidationError("pfaffian needs a square matrix")
    if n % 2:
        return 0.0 + 0.0j
    if n == 0:
        return 1.0 + 0.0j
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        pivot = k + 1 + np.argmax(np.abs(a[k + 1:, k]))
        if pivot != k + 1:
            a[[k + 1, pivot], k:] = a[[pivot, k + 1], k:]
            a[k:, [k + 1, pivot]] = a[k:, [pivot, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0.0 + 0.0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k + 2:, k] / a[k + 1, k]
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return pf


@lru_cache(maxsize=None)
def _pair_trace_sign(n_modes: int) -> int:
    """Fixed sign relating the pair-trace Pfaffian to the actual trace.

    Both sides of tr[rho(G1) rho(G2)] = s * 2^-M * Pf([[G1, -I], [I, G2]])
    are polynomials in the kernel entries that agree up to a constant sign,
    so calibrating once at the vacuum (trace exactly 1) pins s globally.
    """
    g0 = vacuum_covariance(n_modes)
    pf = pfaffian(_pair_block(g0, g0))
    s = (2.0**n_modes) / pf
    if abs(abs(s) - 1.0) > 1e-6 or abs(s.imag) > 1e-6:
        raise NumericError(f"pair-trace calibration failed at {n_modes} modes: s={s}")
    return int(round(s.real))


def _pair_block(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    m2 = g1.shape[0]
    eye = np.eye(m2)
    return np.block([[g1, -eye], [eye, g2]])


def pair_trace(g1: np.ndarray, g2: np.ndarray) -> complex:
    """tr[rho(G1) rho(G2)] for trace-normalized Gaussian kernels."""
    n_modes = g1.shape[0] // 2
    sign = _pair_trace_sign(n_modes)
    return sign * pfaffian(_pair_block(g1, g2)) / 2.0**n_modes


def compose_kernels(g1: np.ndarray, g2: np.ndarray) -> tuple[complex, np.ndarray]:
    """(scalar, kernel) with rho(G1) rho(G2) = scalar * rho(G12).

    The composed kernel is 1 - (1 - G1)(1 + G2 G1)^-1 (1 - G2); the operand
    order is pinned by the dense oracle (a three-factor product of pure
    Gaussian states distinguishes the two orderings).  A singular middle
    factor means the product has zero trace and no normalized Gaussian
    form, which is reported with the condition number.
    """
    eye = np.eye(g1.shape[0])
    mid = eye + g2 @ g1
    cond = np.linalg.cond(mid)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericError(
            f"ill-conditioned Gaussian composition (cond={cond:.3e}); "
            "the product trace is at or near zero"
        )
    g12 = eye - (eye - g1) @ np.linalg.solve(mid, eye - g2)
    return pair_trace(g1, g2), g12


def product_trace(kernels: list[np.ndarray]) -> complex:
    """Trace of an ordered product of trace-normalized Gaussian kernels."""
    if not kernels:
        raise ValidationError("empty product")
    if len(kernels) == 1:
        return 1.0 + 0.0j
    scalar = 1.0 + 0.0j
    acc = kernels[0]
    for nxt in kernels[1:-1]:
        step, acc = compose_kernels(acc, nxt)
        scalar *= step
    return scalar * pair_trace(acc, kernels[-1])


def gaussian_pt_moments(gprime: np.ndarray, n_a_modes: int) -> tuple[float, float, float]:
    """Moments p2, p3, p4 of the partial transpose from the reduced covariance.

    The partial transpose splits into two adjoint Gaussian factors O+ and O-;
    the moment formulas combine traces of their products:

        p2 = tr(O+ O-)
        p3 = -1/2 tr(O+^3) + 3/2 tr(O+^2 O-)
        p4 = -1/2 tr(O+^4) + tr(O+^2 O-^2) + 1/2 tr(O+ O- O+ O-)
    """
    gp = pt_kernel(gprime, n_a_modes)
    gm = -gp.conj()
    p2 = product_trace([gp, gm])
    p3 = -0.5 * product_trace([gp, gp, gp]) + 1.5 * product_trace([gp, gp, gm])
    p4 = (
        -0.5 * product_trace([gp, gp, gp, gp])
        + product_trace([gp, gp, gm, gm])
        + 0.5 * product_trace([gp, gm, gp, gm])
    )
    values = (p2, p3, p4)
    worst = max(abs(v.imag) for v in values)
    if worst > 1e-8:
        raise NumericError(f"PT moments came out non-real (max imag {worst:.3e})")
    if p2.real <= 0:
        raise NumericError(f"p2 = {p2.real} <= 0 signals a failed composition")
    return p2.real, p3.real, p4.real


# ---------------------------------------------------------------------------
# dense Jordan-Wigner oracle


def majorana_operators(n_modes: int) -> list[np.ndarray]:
    """Dense 2^M-dimensional Majorana operators under the Jordan-Wigner map."""
    if n_modes > 10:
        raise CapabilityError(f"{n_modes} modes exceeds the dense oracle limit of 10")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    ops = []
    for k in range(n_modes):
        for local in (x, y):
            full = np.array([[1.0 + 0j]])
            for j in range(n_modes):
                if j < k:
                    full = np.kron(full, z)
                elif j == k:
                    full = np.kron(full, local)
                else:
                    full = np.kron(full, eye)
            ops.append(full)
    return ops


def dense_covariance(state: np.ndarray, n_modes: int) -> np.ndarray:
    """Covariance tr(rho [c_j, c_k])/2 of a dense pure state or density matrix."""
    cs = majorana_operators(n_modes)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        vecs = np.stack([c @ state for c in cs])
        corr = vecs.conj() @ vecs.T
    else:
        prods = np.stack([state @ c for c in cs])
        corr = np.einsum("jab,kba->jk", prods, np.stack(cs))
    return (corr - corr.T) / 2


# ---------------------------------------------------------------------------
# matchgate circuits


def matchgate(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Embed u (even parity block) and v (odd block) into a two-qubit gate."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.det(u) - np.linalg.det(v)) > 1e-12:
        raise ValidationError("matchgate blocks must satisfy det u = det v")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0], m[0, 3], m[3, 0], m[3, 3] = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    m[1:3, 1:3] = v
    return m


def random_matchgate(rng: np.random.Generator) -> np.ndarray:
    """Haar u and v with v rephased so the determinants match exactly."""
    u = haar_unitary(2, rng)
    v = haar_unitary(2, rng)
    v = v * np.sqrt(np.linalg.det(u) / np.linalg.det(v))
    return matchgate(u, v)


SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def brickwork_slots(n: int, n_layers: int | None = None) -> list[tuple[int, int]]:
    """(layer, qubit) slots of the alternating-pair circuit; 3N layers default."""
    if n % 2:
        raise ValidationError("the brickwork layout is defined for even chain lengths")
    if n_layers is None:
        n_layers = 3 * n
    slots = []
    for layer in range(n_layers):
        first = 0 if layer % 2 == 0 else 1
        for q in range(first, n - 1, 2):
            slots.append((layer, q))
    return slots


def apply_two_qubit(state: np.ndarray, gate: np.ndarray, q: int, n: int) -> np.ndarray:
    """Apply a 4x4 gate on adjacent qubits (q, q+1) of an n-qubit vector."""
    pre = 1 << q
    post = 1 << (n - q - 2)
    arr = state.reshape(pre, 4, post)
    return np.einsum("ab,pbq->paq", gate, arr, optimize=True).reshape(-1)


def run_circuit(n: int, gates: list[tuple[int, np.ndarray]]) -> np.ndarray:
    """Statevector of gates applied in order to |0...0>."""
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    for q, gate in gates:
        state = apply_two_qubit(state, gate, q, n)
    return state


_LOCAL_MAJORANAS = None


def _local_majoranas() -> list[np.ndarray]:
    global _LOCAL_MAJORANAS
    if _LOCAL_MAJORANAS is None:
        _LOCAL_MAJORANAS = majorana_operators(2)
    return _LOCAL_MAJORANAS


def rotation_from_matchgate(gate: np.ndarray) -> np.ndarray:
    """The 4x4 Majorana rotation R with U^dag c_i U = sum_j R_ij c_j."""
    cs = _local_majoranas()
    r = np.empty((4, 4), dtype=complex)
    for i in range(4):
        conj = gate.conj().T @ cs[i] @ gate
        for j in range(4):
            r[i, j] = np.trace(conj @ cs[j]) / 4
    if np.abs(r.imag).max() > 1e-10 or not np.allclose(r.real @ r.real.T, np.eye(4), atol=1e-10):
        raise NumericError("gate does not act as a Majorana rotation (not a matchgate?)")
    return r.real


def rotation_from_circuit(n: int, gates: list[tuple[int, np.ndarray]]) -> np.ndarray:
    """Compose per-gate Majorana rotations for a nearest-neighbor circuit."""
    r = np.eye(2 * n)
    for q, gate in gates:
        block = rotation_from_matchgate(gate)
        full = np.eye(2 * n)
        full[2 * q: 2 * q + 4, 2 * q: 2 * q + 4] = block
        r = full @ r
    return r


# ---------------------------------------------------------------------------
# ensemble samplers


def sample_gaussian_quantities(t: Tripartition, rng: np.random.Generator) -> dict[str, float]:
    """Moments and ratio of one Haar-rotation Gaussian state, counts as modes."""
    n = t.n
    g = rotate_covariance(vacuum_covariance(n), sample_special_orthogonal(2 * n, rng))
    gprime = restrict_covariance(g, 0, t.n_ab)
    p2, p3, p4 = gaussian_pt_moments(gprime, t.n_a)
    out = {"p2": p2, "p3": p3, "p4": p4}
    if p4 != 0:
        out["r2"] = p2 * p3 / p4
    return out


def doped_circuit_quantities(t: Tripartition, n_swap: int,
                             rng: np.random.Generator) -> dict[str, float]:
    """Dense simulation of one brickwork circuit doped with swap gates."""
    n = t.n
    if n > 20:
        raise CapabilityError(f"dense doped circuits are limited to 20 qubits, got {n}")
    slots = brickwork_slots(n)
    if n_swap > len(slots):
        raise ValidationError(f"n_swap={n_swap} exceeds the {len(slots)} circuit slots")
    swap_positions = set(rng.choice(len(slots), size=n_swap, replace=False).tolist())
    gates = []
    for index, (_, q) in enumerate(slots):
        gate = SWAP if index in swap_positions else random_matchgate(rng)
        gates.append((q, gate))
    psi = run_circuit(n, gates)
    if t.n_c == 0:
        spec = dense.pure_pt_spectrum(psi, t.n_a, t.n_b)
    else:
        state = dense.PureState(psi, t)
        spec = dense.negativity_spectrum(dense.reduce_to_ab(state))
    m = spec.moments(4)
    out = {"p2": float(m[2]), "p3": float(m[3]), "p4": float(m[4])}
    if m[4] != 0:
        out["r2"] = float(m[2] * m[3] / m[4])
    out["negativity"] = spec.negativity
    return out


def doped_circuit_ensemble(n: int, n_swap: int, partition: tuple[int, int, int],
                           count: int, seed: int, jobs: int = 1):
    """Summary statistics of the doped-circuit ensemble at one swap count."""
    from .ensembles import EnsembleSpec, run_ensemble

    t = Tripartition(*partition)
    if t.n != n:
        raise ValidationError(f"partition {partition} does not sum to n={n}")
    spec = EnsembleSpec("doped-mg", t, count, seed, {"n_swap": n_swap})
    return run_ensemble(spec, jobs=jobs, point_index=n_swap)
