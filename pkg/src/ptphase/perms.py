"""Symmetric-group bookkeeping for moment averages.

Permutations are tuples ``p`` of length n with ``p[k]`` the image of k.
The averages over random states reduce to sums of dimension powers
``L_A**c1 * L_B**c2 * L_C**c3`` where the exponents are cycle counts of
fixed permutations composed with every element of S_n.  Enumerations are
collapsed to multiplicity tables over the cycle-count triples once per
order and cached, so evaluating a new partition costs only a handful of
big-integer shifts.
"""

from collections import Counter
from functools import lru_cache
from itertools import permutations

Perm = tuple[int, ...]


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def cyclic_perm(n: int) -> Perm:
    """The forward cycle k -> k+1 (mod n)."""
    return tuple((k + 1) % n for k in range(n))


def anticyclic_perm(n: int) -> Perm:
    """The backward cycle k -> k-1 (mod n)."""
    return tuple((k - 1) % n for k in range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """(p o q)(k) = p(q(k))."""
    return tuple(p[qk] for qk in q)


def block_sum(p: Perm, q: Perm) -> Perm:
    """Direct sum acting as p on the first block and q on the second."""
    off = len(p)
    return tuple(p) + tuple(qk + off for qk in q)


def cycle_count(p: Perm) -> int:
    """Number of cycles of p, fixed points included."""
    n = len(p)
    seen = [False] * n
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        k = start
        while not seen[k]:
            seen[k] = True
            k = p[k]
    return cycles


def perm_sign(p: Perm) -> int:
    return 1 if (len(p) - cycle_count(p)) % 2 == 0 else -1


@lru_cache(maxsize=None)
def moment_signature(n: int) -> tuple[tuple[tuple[int, int, int], int], ...]:
    """Multiplicity table for single-moment averages of order n.

    Entries are ((c_a, c_b, c_c), multiplicity) where, for each tau in S_n,
    c_a = cycles(cyclic o tau), c_b = cycles(anticyclic o tau), c_c = cycles(tau).
    """
    sp = cyclic_perm(n)
    sm = anticyclic_perm(n)
    counts: Counter = Counter()
    for tau in permutations(range(n)):
        key = (cycle_count(compose(sp, tau)), cycle_count(compose(sm, tau)), cycle_count(tau))
        counts[key] += 1
    return tuple(sorted(counts.items()))


@lru_cache(maxsize=None)
def product_signature(n: int, m: int) -> tuple[tuple[tuple[int, int, int], int], ...]:
    """Multiplicity table for the order-(n, m) product average.

    Same layout as :func:`moment_signature`, with the cyclic permutations
    replaced by block sums acting independently on the n- and m-copy groups,
    and tau running over S_{n+m}.
    """
    sp = block_sum(cyclic_perm(n), cyclic_perm(m))
    sm = block_sum(anticyclic_perm(n), anticyclic_perm(m))
    counts: Counter = Counter()
    for tau in permutations(range(n + m)):
        key = (cycle_count(compose(sp, tau)), cycle_count(compose(sm, tau)), cycle_count(tau))
        counts[key] += 1
    return tuple(sorted(counts.items()))


def rising_factorial(x: int, n: int) -> int:
    """x (x+1) ... (x+n-1); equals sum over S_n of x**cycle_count."""
    out = 1
    for j in range(n):
        out *= x + j
    return out
