"""Dense state-vector / density-matrix engine for moments and spectra.

States live on qubit registers laid out [A|B|C] with the first qubit as the
most significant tensor factor.  Everything routes through one Hermitian
eigendecomposition of the partially transposed reduced matrix, from which
moments, negativity, and the rescaled spectrum all follow.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, NumericError, ValidationError
from .moments import MomentSet, moment_ratio, p3_negativity
from .tripartition import Tripartition

DENSE_AB_LIMIT = 14         # largest N_AB handled as an explicit matrix
VECTOR_QUBIT_LIMIT = 24     # largest full register kept as a state vector

NORM_TOL = 1e-12
SPECTRUM_TOL = 1e-10

HIST_BINS = 81
HIST_RANGE = (-2.0, 2.0)


@dataclass
class PureState:
    """Unit-norm amplitudes of the full tripartite register."""

    amplitudes: np.ndarray
    partition: Tripartition

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.partition.l,):
            raise ValidationError(
                f"amplitude vector of length {self.amplitudes.shape} does not match "
                f"a {self.partition.n}-qubit register"
            )
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-10:
            raise ValidationError(f"state norm {norm} is not 1 within tolerance")

    @property
    def n_qubits(self) -> int:
        return self.partition.n


@dataclass
class DensityMatrix:
    """Reduced density matrix on the AB block with its (N_A, N_B) split."""

    matrix: np.ndarray
    n_a: int
    n_b: int
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.n_a + self.n_b > DENSE_AB_LIMIT:
            raise CapabilityError(
                f"N_AB = {self.n_a + self.n_b} exceeds the dense limit {DENSE_AB_LIMIT}"
            )
        dim = 1 << (self.n_a + self.n_b)
        if self.matrix.shape != (dim, dim):
            raise ValidationError(f"matrix shape {self.matrix.shape} != ({dim}, {dim})")
        if self.validate:
            if not np.allclose(self.matrix, self.matrix.conj().T, atol=NORM_TOL * dim):
                raise ValidationError("matrix is not Hermitian within tolerance")
            tr = self.matrix.trace().real
            if abs(tr - 1.0) > 1e-9:
                raise ValidationError(f"trace {tr} is not 1 within tolerance")

    @property
    def n_ab(self) -> int:
        return self.n_a + self.n_b

    @property
    def dim(self) -> int:
        return 1 << self.n_ab


@dataclass
class NegativitySpectrum:
    """Real eigenvalues of the partially transposed reduced matrix."""

    lambdas: np.ndarray

    def __post_init__(self):
        self.lambdas = np.sort(np.asarray(self.lambdas, dtype=float))

    def moment(self, n: int) -> float:
        return float(np.sum(self.lambdas**n))

    def moments(self, nmax: int = 4) -> MomentSet:
        return MomentSet({n: self.moment(n) for n in range(1, nmax + 1)})

    @property
    def negativity(self) -> float:
        return float(np.log2(np.sum(np.abs(self.lambdas))))

    def epsilons(self) -> np.ndarray:
        """Rescaled squared spectrum lambda_i^2 / p_3 (requires p_3 > 0)."""
        p3 = self.moment(3)
        if p3 <= 0:
            raise ValidationError(f"p_3 = {p3} <= 0; rescaled spectrum undefined")
        return self.lambdas**2 / p3


@dataclass
class DetectionReport:
    """Moment-based entanglement indicators of a single state."""

    alpha2: float
    r2: float
    r2_entangled: bool
    p3_ppt_violated: bool
    e3: float
    negativity: float


def haar_state_vector(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector with the rotation-invariant distribution (Gaussian + normalize)."""
    if n_qubits > VECTOR_QUBIT_LIMIT:
        raise CapabilityError(f"{n_qubits} qubits exceeds the vector limit {VECTOR_QUBIT_LIMIT}")
    dim = 1 << n_qubits
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def _keep_sorted(keep) -> tuple[str, ...]:
    order = {"A": 0, "B": 1, "C": 2}
    labels = tuple(sorted(set(keep), key=order.get))
    if not labels or any(x not in order for x in labels):
        raise ValidationError(f"keep must be a nonempty subset of A, B, C; got {keep!r}")
    return labels


def partial_trace(state, keep) -> DensityMatrix:
    """Trace out the complement of ``keep`` (a subset of {'A','B','C'}).

    Accepts a PureState (any subset) or a DensityMatrix (subset of {'A','B'}).
    The result's split assigns the first kept block to the "A" slot of the
    reduced matrix and the second kept block (if any) to "B".
    """
    if isinstance(state, DensityMatrix):
        labels = _keep_sorted(keep)
        if any(x == "C" for x in labels):
            raise ValidationError("a reduced matrix only has subsystems A and B")
        la, lb = 1 << state.n_a, 1 << state.n_b
        rho = state.matrix.reshape(la, lb, la, lb)
        if labels == ("A", "B"):
            return state
        if labels == ("A",):
            return DensityMatrix(np.einsum("ikjk->ij", rho), state.n_a, 0)
        return DensityMatrix(np.einsum("kikj->ij", rho), state.n_b, 0)

    t = state.partition
    labels = _keep_sorted(keep)
    sizes = {"A": t.n_a, "B": t.n_b, "C": t.n_c}
    n_keep = sum(sizes[x] for x in labels)
    if n_keep > DENSE_AB_LIMIT:
        raise CapabilityError(f"kept block of {n_keep} qubits exceeds the dense limit")
    psi = state.amplitudes.reshape(t.l_a, t.l_b, t.l_c)
    axes = {"A": 0, "B": 1, "C": 2}
    keep_axes = [axes[x] for x in labels]
    drop_axes = [ax for ax in (0, 1, 2) if ax not in keep_axes]
    mat = np.transpose(psi, keep_axes + drop_axes).reshape(1 << n_keep, -1)
    rho = mat @ mat.conj().T
    if len(labels) == 1:
        split = (sizes[labels[0]], 0)
    else:
        split = (sizes[labels[0]], n_keep - sizes[labels[0]])
    return DensityMatrix(rho, *split)


def reduce_to_ab(state: PureState) -> DensityMatrix:
    """Reduced matrix on AB: the standard entry point for the moment pipeline."""
    return partial_trace(state, ("A", "B"))


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose the B indices; involutive and spectrum-defining."""
    la, lb = 1 << rho.n_a, 1 << rho.n_b
    mat = rho.matrix.reshape(la, lb, la, lb)
    return np.ascontiguousarray(mat.transpose(0, 3, 2, 1).reshape(rho.dim, rho.dim))


def negativity_spectrum(rho: DensityMatrix) -> NegativitySpectrum:
    """Eigenvalues of the partially transposed matrix (symmetrized eigensolve)."""
    gamma = partial_transpose(rho)
    gamma = (gamma + gamma.conj().T) / 2
    try:
        lam = np.linalg.eigvalsh(gamma)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hardware dependent
        raise NumericError(f"eigensolver failed on a {gamma.shape} matrix: {exc}") from exc
    spec = NegativitySpectrum(lam)
    if abs(spec.moment(1) - 1.0) > SPECTRUM_TOL:
        raise NumericError(f"spectrum sum {spec.moment(1)} deviates from the unit trace")
    return spec


def pure_pt_spectrum(amplitudes: np.ndarray, n_a: int, n_b: int) -> NegativitySpectrum:
    """PT spectrum of a pure AB state from its Schmidt coefficients.

    For Schmidt values s_i the spectrum is {s_i^2} plus {+- s_i s_j} for
    i < j, which avoids diagonalizing the full 2^(N_A+N_B) matrix.
    """
    mat = np.asarray(amplitudes, dtype=complex).reshape(1 << n_a, 1 << n_b)
    s = np.linalg.svd(mat, compute_uv=False)
    s = s[s > 1e-14]
    prods = np.outer(s, s)
    iu = np.triu_indices(len(s), k=1)
    off = prods[iu]
    lam = np.concatenate([s**2, off, -off])
    return NegativitySpectrum(lam)


def pt_moments(rho: DensityMatrix, nmax: int = 4) -> MomentSet:
    """Moments p_1..p_nmax from the PT spectrum."""
    if nmax < 1:
        raise ValidationError("nmax must be >= 1")
    return negativity_spectrum(rho).moments(nmax)


def negativity(rho: DensityMatrix) -> float:
    """log2 of the trace norm of the partially transposed matrix."""
    return negativity_spectrum(rho).negativity


def r_n(m: MomentSet, n: int) -> float:
    return moment_ratio(m, n)


def r2(m: MomentSet) -> float:
    return moment_ratio(m, 2)


def rescaled_spectrum(spec: NegativitySpectrum, p3: float | None = None,
                      bins: int = HIST_BINS, window: tuple[float, float] = HIST_RANGE):
    """Rescaled squared spectrum plus a density histogram of lambda / sqrt(p3).

    Returns (epsilons, histogram, bin_edges, scaled).  When p3 <= 0 the raw
    spectrum is binned instead and ``scaled`` is False.
    """
    if p3 is None:
        p3 = spec.moment(3)
    if p3 > 0:
        eps = spec.lambdas**2 / p3
        values = spec.lambdas / math.sqrt(p3)
        scaled = True
    else:
        eps = None
        values = spec.lambdas
        scaled = False
    hist, edges = np.histogram(values, bins=bins, range=window, density=True)
    return eps, hist, edges, scaled


def detect(rho: DensityMatrix) -> DetectionReport:
    """Entanglement indicators from moments up to order four."""
    spec = negativity_spectrum(rho)
    m = spec.moments(4)
    ratio = moment_ratio(m, 2)
    alpha2 = float(m[4] * m[1] * (1.0 - ratio))
    return DetectionReport(
        alpha2=alpha2,
        r2=ratio,
        r2_entangled=ratio > 1.0,
        p3_ppt_violated=m[3] < m[2] ** 2,
        e3=p3_negativity(m),
        negativity=spec.negativity,
    )


def depolarize(rho: DensityMatrix, epsilon: float) -> DensityMatrix:
    """(1 - eps) rho + eps * I / L_AB."""
    if not 0 <= epsilon <= 1:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon}")
    mixed = np.eye(rho.dim) / rho.dim
    return DensityMatrix((1 - epsilon) * rho.matrix + epsilon * mixed, rho.n_a, rho.n_b)


def pt_spectra_stack(states: np.ndarray, t: Tripartition, chunk: int = 64) -> np.ndarray:
    """PT spectra of the reduced AB states of a stack of full pure states.

    ``states`` has shape (k, 2^N).  Returns (k, 2^N_AB) sorted eigenvalues.
    This is the unvalidated fast path used by time-window and ensemble
    scans; it matches :func:`negativity_spectrum` on the reduced state.
    """
    states = np.asarray(states, dtype=complex)
    k = states.shape[0]
    la, lb, lc = t.l_a, t.l_b, t.l_c
    if t.n_ab > DENSE_AB_LIMIT:
        raise CapabilityError(f"N_AB = {t.n_ab} exceeds the dense limit {DENSE_AB_LIMIT}")
    if t.n_c == 0:
        s = np.linalg.svd(states.reshape(k, la, lb), compute_uv=False)
        r = s.shape[1]
        prods = s[:, :, None] * s[:, None, :]
        iu = np.triu_indices(r, k=1)
        off = prods[:, iu[0], iu[1]]
        lam = np.concatenate([s**2, off, -off], axis=1)
        pad = np.zeros((k, t.l_ab - lam.shape[1]))
        return np.sort(np.concatenate([lam, pad], axis=1), axis=1)
    out = np.empty((k, t.l_ab))
    for lo in range(0, k, chunk):
        hi = min(lo + chunk, k)
        psi = states[lo:hi].reshape(hi - lo, t.l_ab, lc)
        rho = psi @ psi.conj().transpose(0, 2, 1)
        gamma = rho.reshape(hi - lo, la, lb, la, lb).transpose(0, 1, 4, 3, 2)
        gamma = gamma.reshape(hi - lo, t.l_ab, t.l_ab)
        gamma = (gamma + gamma.conj().transpose(0, 2, 1)) / 2
        out[lo:hi] = np.linalg.eigvalsh(gamma)
    return out


def entropy_stack(states: np.ndarray, n_left: int, base: float = 2.0) -> np.ndarray:
    """Bipartite von Neumann entropies of a stack of full pure states."""
    states = np.asarray(states, dtype=complex)
    k, dim = states.shape
    s = np.linalg.svd(states.reshape(k, 1 << n_left, dim >> n_left), compute_uv=False)
    probs = s**2
    safe = np.where(probs > 1e-30, probs, 1.0)
    return -np.sum(probs * np.log(safe), axis=1) / math.log(base)


def bipartite_entropy(amplitudes: np.ndarray, n_left: int, base: float = 2.0,
                      renyi: float | None = None) -> float:
    """Entanglement entropy of a pure state across a left/right cut.

    Von Neumann by default; pass renyi=2 for the second Renyi entropy.
    """
    amplitudes = np.asarray(amplitudes)
    dim = amplitudes.size
    mat = amplitudes.reshape(1 << n_left, dim >> n_left)
    s = np.linalg.svd(mat, compute_uv=False)
    probs = s**2
    probs = probs[probs > 1e-30]
    if renyi is None:
        return float(-np.sum(probs * np.log(probs)) / np.log(base))
    if renyi == 1:
        return bipartite_entropy(amplitudes, n_left, base=base)
    return float(np.log(np.sum(probs**renyi)) / (1 - renyi) / np.log(base))
