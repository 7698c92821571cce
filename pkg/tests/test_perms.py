from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptphase import perms


def test_cycle_count_identity():
    assert perms.cycle_count(perms.identity_perm(4)) == 4


def test_cycle_count_transposition():
    assert perms.cycle_count((1, 0, 2)) == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cyclic_is_single_cycle(n):
    assert perms.cycle_count(perms.cyclic_perm(n)) == 1
    assert perms.cycle_count(perms.anticyclic_perm(n)) == 1


def test_cyclic_inverse_pair():
    for n in range(2, 7):
        assert perms.compose(perms.cyclic_perm(n), perms.anticyclic_perm(n)) == perms.identity_perm(n)


@given(st.permutations(list(range(6))), st.permutations(list(range(6))))
def test_compose_is_associative_with_identity(p, q):
    p, q = tuple(p), tuple(q)
    ident = perms.identity_perm(6)
    assert perms.compose(p, ident) == p
    assert perms.compose(ident, q) == q
    # composition of bijections stays bijective
    assert sorted(perms.compose(p, q)) == list(range(6))


@given(st.permutations(list(range(5))))
def test_cycle_count_conjugation_invariant(p):
    p = tuple(p)
    for q in permutations(range(5)):
        q = tuple(q)
        qinv = tuple(sorted(range(5), key=lambda k: q[k]))
        assert perms.cycle_count(perms.compose(perms.compose(q, p), qinv)) == perms.cycle_count(p)
        break


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("x", [1, 2, 3, 7])
def test_rising_factorial_matches_enumeration(n, x):
    direct = sum(x ** perms.cycle_count(tau) for tau in permutations(range(n)))
    assert perms.rising_factorial(x, n) == direct


def test_moment_signature_counts_sum_to_group_order():
    for n in range(1, 7):
        assert sum(m for _, m in perms.moment_signature(n)) == __import__("math").factorial(n)


def test_product_signature_counts_sum_to_group_order():
    import math

    for n, m in [(2, 2), (2, 3), (3, 4)]:
        assert sum(mult for _, mult in perms.product_signature(n, m)) == math.factorial(n + m)


def test_block_sum_acts_independently():
    p = perms.cyclic_perm(2)
    q = perms.cyclic_perm(3)
    s = perms.block_sum(p, q)
    assert s == (1, 0, 3, 4, 2)
    assert perms.cycle_count(s) == 2
