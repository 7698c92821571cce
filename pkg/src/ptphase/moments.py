"""Containers and elementary functions of partial-transpose moment sets."""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import SingularInputError, ValidationError

Number = Fraction | float


@dataclass(frozen=True)
class MomentSet:
    """Moments p_n = tr[(rho^Gamma)^n] keyed by the order n.

    ``values`` maps n -> p_n with either exact rationals or floats; ``exact``
    tags the representation.  p_1 = 1 for a normalized state.
    """

    values: dict[int, Number]
    exact: bool = field(default=False)

    def __post_init__(self):
        for n in self.values:
            if n < 0:
                raise ValidationError(f"moment order must be >= 0, got {n}")

    def __getitem__(self, n: int) -> Number:
        try:
            return self.values[n]
        except KeyError:
            raise ValidationError(f"moment p_{n} not available (have {sorted(self.values)})")

    def __contains__(self, n: int) -> bool:
        return n in self.values

    @property
    def nmax(self) -> int:
        return max(self.values)

    def orders(self) -> list[int]:
        return sorted(self.values)

    def as_floats(self) -> "MomentSet":
        return MomentSet({n: float(v) for n, v in self.values.items()}, exact=False)


def moment_ratio_exact(m: MomentSet, n: int = 2) -> Fraction:
    """p_n p_{n+1} / (p_{n+2} p_{n-1}) in exact arithmetic."""
    den = Fraction(m[n + 2]) * Fraction(m[n - 1])
    if den == 0:
        raise SingularInputError(f"vanishing denominator p_{n + 2} * p_{n - 1}")
    return Fraction(m[n]) * Fraction(m[n + 1]) / den


def moment_ratio(m: MomentSet, n: int = 2) -> float:
    """The ratio p_n p_{n+1} / (p_{n+2} p_{n-1}) of a single moment set.

    For n = 2 this is the order parameter distinguishing the entanglement
    regimes.  Raises when the denominator vanishes.
    """
    if m.exact:
        return float(moment_ratio_exact(m, n))
    den = m[n + 2] * m[n - 1]
    if den == 0:
        raise SingularInputError(f"vanishing denominator p_{n + 2} * p_{n - 1}")
    return float(m[n] * m[n + 1] / den)


def r2(m: MomentSet) -> float:
    """p2 p3 / (p4 p1), the single-state ratio."""
    return moment_ratio(m, 2)


def p3_negativity(m: MomentSet) -> float:
    """The two-moment proxy 0.5 * log2(p2^2 / p3) for the negativity."""
    p2, p3 = float(m[2]), float(m[3])
    if p3 <= 0:
        return math.nan
    return 0.5 * math.log2(p2 * p2 / p3)


def hamburger_gap(m: MomentSet) -> float:
    """p2 p4 - p3^2, nonnegative for every quantum state."""
    return float(m[2] * m[4] - m[3] * m[3])


def white_noise_moments(m: MomentSet, epsilon, l_ab: int) -> MomentSet:
    """Moments after mixing with white noise of weight epsilon on AB.

    Implements p'_n = sum_k C(n,k) (1-eps)^k p_k (eps/L_AB)^(n-k) with
    p_0 = L_AB inserted internally.  The transform is exact state-by-state
    (not only on averages) because the identity commutes with everything.
    Exactness of the output follows the input representation and the type
    of ``epsilon`` (pass a Fraction or int for exact arithmetic).
    """
    if not 0 <= epsilon <= 1:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon}")
    exact_out = m.exact and isinstance(epsilon, (Fraction, int))
    eps = Fraction(epsilon) if exact_out else float(epsilon)
    one = Fraction(1) if exact_out else 1.0
    base: dict[int, Number] = {0: l_ab * one}
    base.update(m.values)
    out = {}
    for n in m.orders():
        if n == 0:
            continue
        missing = [k for k in range(n + 1) if k not in base]
        if missing:
            raise ValidationError(f"need moments 0..{n}, missing {missing}")
        acc = 0 * one
        for k in range(n + 1):
            acc += math.comb(n, k) * (one - eps) ** k * base[k] * (eps / l_ab) ** (n - k)
        out[n] = acc
    return MomentSet(out, exact=exact_out)
