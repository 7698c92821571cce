"""Ensemble averages of partial-transpose moments for Haar-random states.

Everything here is sampling-free: exact averages are ratios of big-integer
sums over symmetric-group elements, the leading-order variant drops the
subleading denominator corrections, and the asymptotic forms are the
closed-form limits per phase.  Products of two moments average over the
doubled permutation group and give variances and covariances.
"""

import math
from fractions import Fraction

from .errors import CapabilityError, ValidationError
from .moments import MomentSet, moment_ratio
from .perms import moment_signature, product_signature, rising_factorial
from .tripartition import PhaseLabel, Tripartition, classify_phase

DEFAULT_NMAX = 6
PRODUCT_ORDER_LIMIT = 8

_COEFF = {2: 1, 3: 1, 4: -1}


def _signature_sum(signature, t: Tripartition) -> int:
    """Sum of multiplicity * L_A^c1 L_B^c2 L_C^c3 over a cached table."""
    total = 0
    for (ca, cb, cc), mult in signature:
        total += mult << (t.n_a * ca + t.n_b * cb + t.n_c * cc)
    return total


def exact_mean_pt_moment(t: Tripartition, n: int, nmax: int = DEFAULT_NMAX) -> Fraction:
    """Exact Haar average of the order-n moment as a rational number.

    Numerator and denominator are sums over S_n; the denominator equals the
    rising factorial L (L+1) ... (L+n-1).
    """
    if n < 1:
        raise ValidationError(f"moment order must be >= 1, got {n}")
    if n > nmax:
        raise CapabilityError(f"order {n} exceeds the configured limit nmax={nmax}")
    return Fraction(_signature_sum(moment_signature(n), t), rising_factorial(t.l, n))


def exact_moments(t: Tripartition, nmax: int = 4) -> MomentSet:
    """Exact averaged moments p_1 .. p_nmax for a partition."""
    if nmax > PRODUCT_ORDER_LIMIT:
        raise CapabilityError(f"nmax={nmax} exceeds the enumeration limit {PRODUCT_ORDER_LIMIT}")
    return MomentSet(
        {n: exact_mean_pt_moment(t, n, nmax=nmax) for n in range(1, nmax + 1)}, exact=True
    )


def leading_order_log2_mean(t: Tripartition, n: int, nmax: int = DEFAULT_NMAX) -> float:
    """log2 of the leading-order average, safe for hundreds of qubits.

    All terms are positive powers of two with integer exponents, so the
    accumulation is an exact shifted sum around the maximal exponent.
    """
    if n < 1:
        raise ValidationError(f"moment order must be >= 1, got {n}")
    if n > nmax:
        raise CapabilityError(f"order {n} exceeds the configured limit nmax={nmax}")
    exponents = []
    for (ca, cb, cc), mult in moment_signature(n):
        exponents.append((t.n_a * ca + t.n_b * cb + t.n_c * cc, mult))
    top = max(e for e, _ in exponents)
    acc = sum(mult * math.ldexp(1.0, e - top) for e, mult in exponents)
    return top + math.log2(acc) - n * t.n


def leading_order_mean_pt_moment(t: Tripartition, n: int, nmax: int = DEFAULT_NMAX) -> float:
    """Leading-order Haar average as a float.

    Ratio to the exact value tends to 1 as the total dimension grows.  May
    underflow to 0.0 below 2**-1074; use :func:`leading_order_log2_mean`
    for ratios at extreme sizes.
    """
    return 2.0 ** leading_order_log2_mean(t, n, nmax=nmax)


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def asymptotic_moment_exact(t: Tripartition, n: int) -> Fraction:
    """Closed-form thermodynamic-limit average for a partition strictly inside a phase."""
    if n < 1:
        raise ValidationError(f"moment order must be >= 1, got {n}")
    phase = classify_phase(t)
    if phase is PhaseLabel.BOUNDARY:
        raise ValidationError(
            f"partition ({t.n_a},{t.n_b},{t.n_c}) sits on a phase boundary; "
            "the closed-form limits do not apply there"
        )
    if phase is PhaseLabel.PPT:
        return Fraction(t.l_ab) ** (1 - n)
    if phase is PhaseLabel.ES:
        k = n // 2
        if n % 2 == 0:
            return Fraction(catalan(k) * t.l_ab, (t.l_ab * t.l_c) ** k)
        return Fraction((2 * k + 1) * catalan(k), (t.l_ab * t.l_c) ** k)
    # ME: the formula involves the dimension of the smaller of A, B.
    l_small = t.l_b if 2 * t.n_a > t.n else t.l_a
    if n % 2 == 0:
        return Fraction(t.l_c) ** (1 - n) * Fraction(l_small) ** (2 - n)
    return Fraction(t.l_c * l_small) ** (1 - n)


def asymptotic_mean_pt_moment(t: Tripartition, n: int) -> float:
    return float(asymptotic_moment_exact(t, n))


def asymptotic_moments(t: Tripartition, nmax: int = 4) -> MomentSet:
    return MomentSet({n: asymptotic_moment_exact(t, n) for n in range(1, nmax + 1)}, exact=True)


def tilde_r(n: int, m: MomentSet) -> float:
    """Ratio E[p_n] E[p_{n+1}] / (E[p_{n+2}] E[p_{n-1}]) of averaged moments."""
    return moment_ratio(m, n)


def mean_moment_ratio(t: Tripartition, n: int = 2) -> Fraction:
    """Exact averaged-moment ratio for Haar states at a partition."""
    from .moments import moment_ratio_exact

    return moment_ratio_exact(exact_moments(t, nmax=n + 2), n)


def mean_product_pt_moments(t: Tripartition, n: int, m: int) -> Fraction:
    """Exact Haar average E[p_n p_m], via sums over the (n+m)-fold group."""
    if n < 1 or m < 1:
        raise ValidationError("moment orders must be >= 1")
    if n + m > PRODUCT_ORDER_LIMIT:
        raise CapabilityError(
            f"combined order {n + m} exceeds the S_{PRODUCT_ORDER_LIMIT} enumeration limit"
        )
    return Fraction(_signature_sum(product_signature(n, m), t), rising_factorial(t.l, n + m))


def covariance_pt_moments(t: Tripartition, n: int, m: int) -> Fraction:
    """Cov[p_n, p_m] over the Haar ensemble, exact."""
    return mean_product_pt_moments(t, n, m) - exact_mean_pt_moment(t, n) * exact_mean_pt_moment(t, m)


def variance_pt_moment(t: Tripartition, n: int) -> Fraction:
    return covariance_pt_moments(t, n, n)


def linearized_var_r2(t: Tripartition, k_states: int) -> float:
    """First-order (delta-method) relative variance of the estimated ratio.

    Var[r]/r^2 for the plug-in ratio of empirical moment means over K
    independent states; scales exactly as 1/K.
    """
    if k_states < 1:
        raise ValidationError(f"k_states must be >= 1, got {k_states}")
    means = {n: exact_mean_pt_moment(t, n) for n in (2, 3, 4)}
    total = Fraction(0)
    for n in (2, 3, 4):
        total += variance_pt_moment(t, n) / means[n] ** 2
    for n in (2, 3, 4):
        for mm in (2, 3, 4):
            if n < mm:
                total += 2 * _COEFF[n] * _COEFF[mm] * covariance_pt_moments(t, n, mm) / (
                    means[n] * means[mm]
                )
    return float(total) / k_states


def purity_identity(t: Tripartition) -> Fraction:
    """(L_AB + L_C) / (L_AB L_C + 1): the known mean purity of the reduced state."""
    return Fraction(t.l_ab + t.l_c, t.l_ab * t.l_c + 1)


def analytic_ratio_grid(n_ab: int, n_a_values, n_c_values) -> list[dict]:
    """Exact averaged-moment ratio on an (N_A, N_C) grid at fixed N_AB."""
    rows = []
    for n_a in n_a_values:
        if not 0 <= n_a <= n_ab:
            raise ValidationError(f"n_a={n_a} outside [0, {n_ab}]")
        for n_c in n_c_values:
            t = Tripartition(n_a, n_ab - n_a, n_c)
            rows.append(
                {
                    "n_a": n_a,
                    "n_b": n_ab - n_a,
                    "n_c": n_c,
                    "r2_tilde": float(mean_moment_ratio(t)),
                    "phase": classify_phase(t).value,
                }
            )
    return rows


def noisy_ratio_grid(n_ab: int, n_a_values, n_c_values, epsilon) -> list[dict]:
    """Averaged-moment ratio under white noise of weight epsilon, exact arithmetic."""
    from .moments import moment_ratio_exact, white_noise_moments

    rows = []
    eps = Fraction(epsilon) if not isinstance(epsilon, float) else epsilon
    for n_a in n_a_values:
        for n_c in n_c_values:
            t = Tripartition(n_a, n_ab - n_a, n_c)
            noisy = white_noise_moments(exact_moments(t, nmax=4), eps, t.l_ab)
            value = (
                float(moment_ratio_exact(noisy, 2)) if noisy.exact else moment_ratio(noisy, 2)
            )
            rows.append(
                {
                    "n_a": n_a,
                    "n_b": n_ab - n_a,
                    "n_c": n_c,
                    "r2_tilde": value,
                    "phase": classify_phase(t).value,
                }
            )
    return rows
