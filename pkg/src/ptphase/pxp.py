"""Quench dynamics of the blockaded-chain model on its constrained basis.

Open chain, X flips allowed only when every existing neighbor is unexcited;
the basis holds the bit strings without adjacent excitations (Fibonacci
counting).  Site 0 is the most significant bit, so embedding into the full
register is a plain index map and contiguous [A|B|C] tripartitions act
directly on the embedded vector.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import dense
from .errors import CapabilityError, ValidationError
from .moments import MomentSet
from .stats import ratio_of_means
from .tripartition import Tripartition

CHAIN_LIMIT = 16


@dataclass
class ConstrainedBasis:
    """Bit strings without adjacent excitations, with index maps both ways."""

    n: int
    states: np.ndarray          # sorted full-register indices
    index: dict[int, int]       # full-register index -> basis position

    @property
    def dim(self) -> int:
        return len(self.states)


@lru_cache(maxsize=None)
def constrained_basis(n: int) -> ConstrainedBasis:
    if n < 1:
        raise ValidationError(f"chain length must be >= 1, got {n}")
    if n > CHAIN_LIMIT:
        raise CapabilityError(f"chain of {n} sites exceeds the limit {CHAIN_LIMIT}")
    states = [s for s in range(1 << n) if s & (s >> 1) == 0]
    arr = np.array(states, dtype=np.int64)
    return ConstrainedBasis(n, arr, {int(s): i for i, s in enumerate(states)})


def basis_dimension(n: int) -> int:
    """Dimension by the two-term recursion d(n) = d(n-1) + d(n-2)."""
    a, b = 2, 3  # d(1), d(2)
    if n == 1:
        return a
    for _ in range(n - 2):
        a, b = b, a + b
    return b


def build_pxp(n: int, omega: float = 1.0) -> np.ndarray:
    """Hamiltonian matrix on the constrained basis.

    Couples strings differing at exactly one site whose neighbors (those
    that exist, at the edges) are all zero.  Real symmetric.
    """
    basis = constrained_basis(n)
    h = np.zeros((basis.dim, basis.dim))
    for i, s in enumerate(basis.states):
        s = int(s)
        for site in range(n):
            left_ok = site == 0 or not (s >> (n - site)) & 1
            right_ok = site == n - 1 or not (s >> (n - site - 2)) & 1
            if left_ok and right_ok:
                flipped = s ^ (1 << (n - site - 1))
                h[i, basis.index[flipped]] += omega
    return h


def product_state(n: int, pattern: str) -> np.ndarray:
    """Constrained-basis vector for a product bit string like '1010...'."""
    basis = constrained_basis(n)
    bits = int(pattern, 2)
    if bits not in basis.index:
        raise ValidationError(f"initial pattern {pattern!r} violates the blockade constraint")
    vec = np.zeros(basis.dim, dtype=complex)
    vec[basis.index[bits]] = 1.0
    return vec


def z2_state(n: int) -> np.ndarray:
    if n % 2:
        raise ValidationError("the staggered pattern needs an even chain length")
    return product_state(n, "10" * (n // 2))


def polarized_state(n: int) -> np.ndarray:
    return product_state(n, "0" * n)


def embed(n: int, vec: np.ndarray) -> np.ndarray:
    """Lift a constrained-basis vector to the full 2^n register."""
    basis = constrained_basis(n)
    full = np.zeros(1 << n, dtype=complex)
    full[basis.states] = vec
    return full


@dataclass
class QuenchRun:
    """Evolved snapshots of one quench, kept in the constrained basis."""

    n: int
    initial: str
    omega: float
    times: np.ndarray
    snapshots: np.ndarray  # (n_times, dim) constrained-basis amplitudes
    energy: float

    def embedded(self, k: int) -> np.ndarray:
        return embed(self.n, self.snapshots[k])


_INITIAL_STATES = {"z2": z2_state, "polarized": polarized_state}


def evolve_quench(n: int, initial: str, times, omega: float = 1.0) -> QuenchRun:
    """Spectral-decomposition evolution from a product state.

    ``initial`` is 'z2' or 'polarized', or any bit-string pattern allowed
    by the constraint.  Norm and energy conservation are checked.
    """
    times = np.asarray(times, dtype=float)
    if initial in _INITIAL_STATES:
        psi0 = _INITIAL_STATES[initial](n)
    else:
        psi0 = product_state(n, initial)
    h = build_pxp(n, omega)
    energies, vectors = np.linalg.eigh(h)
    coeffs = vectors.T @ psi0
    phases = np.exp(-1j * np.outer(times, energies))
    snapshots = (phases * coeffs) @ vectors.T
    norms = np.linalg.norm(snapshots, axis=1)
    if np.abs(norms - 1).max() > 1e-10:
        raise ValidationError("evolution lost norm; eigendecomposition suspect")
    e0 = float(np.real(coeffs.conj() @ (energies * coeffs)))
    return QuenchRun(n, initial, omega, times, snapshots, e0)


def standard_window(omega: float = 1.0, n_snapshots: int = 300,
                    start: float = 20.0, stop: float = 50.0) -> np.ndarray:
    """The late-time averaging window in units of the drive frequency."""
    return np.linspace(start, stop, n_snapshots) / omega


def connected_tripartitions(n: int) -> list[Tripartition]:
    """All left-to-right contiguous [A|B|C] splits with N_A, N_B >= 1."""
    out = []
    for n_a in range(1, n):
        for n_b in range(1, n - n_a + 1):
            out.append(Tripartition(n_a, n_b, n - n_a - n_b))
    return out


def _embedded_stack(run: QuenchRun) -> np.ndarray:
    basis = constrained_basis(run.n)
    full = np.zeros((len(run.times), 1 << run.n), dtype=complex)
    full[:, basis.states] = run.snapshots
    return full


def _partition_row(full: np.ndarray, t: Tripartition) -> dict:
    lam = dense.pt_spectra_stack(full, t)
    p2s = np.sum(lam**2, axis=1)
    p3s = np.sum(lam**3, axis=1)
    p4s = np.sum(lam**4, axis=1)
    value, err = ratio_of_means(p2s, p3s, p4s)
    negs = np.log2(np.sum(np.abs(lam), axis=1))
    entropies = dense.entropy_stack(full, t.n_ab)
    return {
        "n_a": t.n_a,
        "n_b": t.n_b,
        "n_c": t.n_c,
        "r2_tilde": value,
        "r2_tilde_err": err,
        "mean_negativity": float(negs.mean()),
        "mean_entropy": float(entropies.mean()),
        "n_samples": full.shape[0],
    }


def tripartition_scan(run: QuenchRun, partitions: list[Tripartition] | None = None,
                      jobs: int = 1) -> list[dict]:
    """Window-averaged moments, ratio, and negativity per tripartition.

    The ratio uses window-averaged moments (with a leave-one-snapshot-out
    jackknife error); the negativity and cut entropy are averaged per
    snapshot.  Spectra are batched over snapshots; partitions can run on
    worker threads without affecting results.
    """
    if partitions is None:
        partitions = connected_tripartitions(run.n)
    full = _embedded_stack(run)
    if jobs == 1:
        return [_partition_row(full, t) for t in partitions]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs if jobs > 0 else None) as pool:
        return list(pool.map(lambda t: _partition_row(full, t), partitions))


def window_moments(run: QuenchRun, t: Tripartition) -> MomentSet:
    """Window-averaged p_1..p_4 for a single tripartition."""
    lam = dense.pt_spectra_stack(_embedded_stack(run), t)
    return MomentSet({n: float(np.mean(np.sum(lam**n, axis=1))) for n in (1, 2, 3, 4)})
