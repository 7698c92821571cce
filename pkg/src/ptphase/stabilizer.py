"""Closed-form moments and dense construction for canonical stabilizer states.

A tripartite stabilizer state is, up to local unitaries, a tensor product of
single-qubit |0>s, three-party GHZ triples, and two-party Bell pairs.  The
moments, ratio, and negativity depend only on the counts in that canonical
form, so the triple of counts is the input representation; local unitaries
are fixed to the identity since none of the reported quantities see them.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import dense
from .errors import CapabilityError, ValidationError
from .moments import MomentSet
from .tripartition import Tripartition

_BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0)
_GHZ = np.zeros(8, dtype=complex)
_GHZ[0] = _GHZ[7] = 1 / np.sqrt(2.0)
_ZERO = np.array([1, 0], dtype=complex)


@dataclass(frozen=True)
class StabilizerTriple:
    """Counts of the canonical factors: local qubits, GHZ triples, Bell pairs."""

    s_a: int = 0
    s_b: int = 0
    s_c: int = 0
    g_abc: int = 0
    e_ab: int = 0
    e_ac: int = 0
    e_bc: int = 0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 0 or int(value) != value:
                raise ValidationError(f"{name} must be a nonnegative integer, got {value}")

    @property
    def n_a(self) -> int:
        return self.s_a + self.g_abc + self.e_ab + self.e_ac

    @property
    def n_b(self) -> int:
        return self.s_b + self.g_abc + self.e_ab + self.e_bc

    @property
    def n_c(self) -> int:
        return self.s_c + self.g_abc + self.e_ac + self.e_bc

    @property
    def n(self) -> int:
        return self.n_a + self.n_b + self.n_c

    def partition(self) -> Tripartition:
        return Tripartition(self.n_a, self.n_b, self.n_c)


def stab_pt_moments(t: StabilizerTriple) -> MomentSet:
    """Exact p_1..p_4 of the reduced AB state from the factor counts.

    Each GHZ triple and each Bell pair shared with C contributes a
    classically-correlated bit; each AB Bell pair contributes the two-valued
    spectrum.  Moments multiply across factors.
    """
    mixed = t.g_abc + t.e_ac + t.e_bc
    return MomentSet(
        {
            1: Fraction(1),
            2: Fraction(1, 2) ** mixed,
            3: Fraction(1, 4) ** t.e_ab * Fraction(1, 4) ** mixed,
            4: Fraction(1, 4) ** t.e_ab * Fraction(1, 8) ** mixed,
        },
        exact=True,
    )


def stab_invariants(t: StabilizerTriple) -> dict:
    """Ratio, negativity, and the two-moment proxy, all exact.

    The ratio is exactly 1, and both negativities equal the AB Bell-pair
    count (exponent arithmetic, no floats).
    """
    m = stab_pt_moments(t)
    ratio = Fraction(m[2]) * Fraction(m[3]) / (Fraction(m[4]) * Fraction(m[1]))
    return {"r2": ratio, "negativity": t.e_ab, "e3": t.e_ab}


def triple_quantities(t: StabilizerTriple) -> dict[str, float]:
    """Float quantities in the shape the ensemble machinery expects."""
    m = stab_pt_moments(t)
    inv = stab_invariants(t)
    return {
        "p2": float(m[2]),
        "p3": float(m[3]),
        "p4": float(m[4]),
        "r2": float(inv["r2"]),
        "negativity": float(inv["negativity"]),
        "e3": float(inv["e3"]),
    }


def build_dense_state(t: StabilizerTriple) -> dense.PureState:
    """Explicit amplitudes of the canonical product, qubits sorted [A|B|C]."""
    if t.n > dense.VECTOR_QUBIT_LIMIT:
        raise CapabilityError(f"{t.n} qubits exceeds the dense vector limit")
    if t.n_a + t.n_b < 1:
        raise ValidationError("the AB block must contain at least one qubit")
    factors: list[tuple[np.ndarray, list[str]]] = []
    factors += [(_ZERO, ["A"])] * t.s_a
    factors += [(_ZERO, ["B"])] * t.s_b
    factors += [(_ZERO, ["C"])] * t.s_c
    factors += [(_GHZ, ["A", "B", "C"])] * t.g_abc
    factors += [(_BELL, ["A", "B"])] * t.e_ab
    factors += [(_BELL, ["A", "C"])] * t.e_ac
    factors += [(_BELL, ["B", "C"])] * t.e_bc
    psi = np.array([1.0 + 0j])
    labels: list[str] = []
    for vec, labs in factors:
        psi = np.kron(psi, vec)
        labels.extend(labs)
    rank = {"A": 0, "B": 1, "C": 2}
    order = sorted(range(len(labels)), key=lambda q: (rank[labels[q]], q))
    psi = psi.reshape((2,) * len(labels)).transpose(order).reshape(-1)
    return dense.PureState(psi, t.partition())


def random_triple(rng: np.random.Generator, max_qubits: int = 10,
                  max_count: int = 3) -> StabilizerTriple:
    """Uniform rejection sample of a triple with at most ``max_qubits`` qubits."""
    while True:
        counts = rng.integers(0, max_count + 1, size=7)
        t = StabilizerTriple(*map(int, counts))
        if 1 <= t.n_a + t.n_b and t.n <= max_qubits:
            return t
