"""Tripartitions of a qubit register and the entanglement-phase classifier."""

from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError


class PhaseLabel(Enum):
    """Regime of a Haar-induced mixed state for a given tripartition."""

    PPT = "PPT"
    ME = "ME"
    ES = "ES"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class Tripartition:
    """Qubit counts (n_a, n_b, n_c) of the three subsystems, laid out [A|B|C].

    Subsystem A holds the first n_a qubits of the register, B the next n_b,
    C the rest.  Dimensions are powers of two.
    """

    n_a: int
    n_b: int
    n_c: int

    def __post_init__(self):
        for label, count in (("n_a", self.n_a), ("n_b", self.n_b), ("n_c", self.n_c)):
            if count < 0 or int(count) != count:
                raise ValidationError(f"{label} must be a nonnegative integer, got {count}")
        if self.n_a + self.n_b < 1:
            raise ValidationError("the AB block must contain at least one qubit")

    @property
    def n(self) -> int:
        return self.n_a + self.n_b + self.n_c

    @property
    def n_ab(self) -> int:
        return self.n_a + self.n_b

    @property
    def l_a(self) -> int:
        return 1 << self.n_a

    @property
    def l_b(self) -> int:
        return 1 << self.n_b

    @property
    def l_c(self) -> int:
        return 1 << self.n_c

    @property
    def l_ab(self) -> int:
        return 1 << self.n_ab

    @property
    def l(self) -> int:
        return 1 << self.n


def classify_phase(t: Tripartition) -> PhaseLabel:
    """Classify a tripartition into PPT / ME / ES, or BOUNDARY on equalities.

    PPT: N_C > N_AB.  ME: N_C < N_AB and one of A, B holds more than half of
    all qubits.  ES: N_C < N_AB with both N_A and N_B below N/2.  Any equality
    (N_C = N_AB, or 2*N_A = N, or 2*N_B = N inside the N_C < N_AB region)
    is reported as BOUNDARY since the closed-form limits do not apply there.
    """
    if t.n_c > t.n_ab:
        return PhaseLabel.PPT
    if t.n_c == t.n_ab:
        return PhaseLabel.BOUNDARY
    if 2 * t.n_a == t.n or 2 * t.n_b == t.n:
        return PhaseLabel.BOUNDARY
    if 2 * t.n_a > t.n or 2 * t.n_b > t.n:
        return PhaseLabel.ME
    return PhaseLabel.ES
