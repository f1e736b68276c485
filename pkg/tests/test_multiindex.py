import math

import pytest
from hypothesis import given, strategies as st

from bergman.errors import DimensionError, DomainError
from bergman.multiindex import (below, falling_factorial, mi_add, mi_binomial,
                                mi_factorial, mi_leq, mi_norm, mi_sub, multi_index,
                                of_norm, unit, up_to_norm, verify_identity_A,
                                verify_identity_B, zero)


def indices(n, hi=5):
    return st.tuples(*[st.integers(0, hi)] * n)


def test_norm_examples():
    assert mi_norm((0, 0)) == 0
    assert mi_norm((2, 1)) == 3
    assert mi_norm((1, 0, 4)) == 5


def test_factorial_examples():
    assert mi_factorial((0, 0)) == 1
    assert mi_factorial((3, 2)) == 12
    assert mi_factorial((10,)) == 3628800


def test_factorial_large_is_exact():
    assert mi_factorial((64,)) == math.factorial(64)
    assert mi_factorial((32, 32)) == math.factorial(32) ** 2


def test_binomial_examples():
    assert mi_binomial((2, 1), (1, 1)) == 2
    assert mi_binomial((1,), (2,)) == 0
    assert mi_binomial((4, 4), (0, 0)) == 1


def test_binomial_length_mismatch():
    with pytest.raises(DimensionError):
        mi_binomial((1, 2), (1,))


def test_leq_examples():
    assert mi_leq((1, 0), (1, 2))
    assert not mi_leq((2, 0), (1, 2))
    assert mi_leq((0, 0), (0, 0))
    with pytest.raises(DimensionError):
        mi_leq((0,), (0, 0))


def test_constructors():
    assert zero(3) == (0, 0, 0)
    assert unit(3, 1) == (0, 1, 0)
    assert multi_index([2, 0]) == (2, 0)
    with pytest.raises(DomainError):
        multi_index([1, -1])


def test_sub_requires_leq():
    assert mi_sub((3, 2), (1, 2)) == (2, 0)
    with pytest.raises(DomainError):
        mi_sub((1, 0), (0, 1))


def test_falling_factorial():
    assert falling_factorial((5,), (2,)) == 20
    assert falling_factorial((2, 3), (1, 3)) == 2 * 6
    assert falling_factorial((1,), (2,)) == 0


def test_enumeration_counts():
    assert len(of_norm(2, 3)) == 4
    assert len(of_norm(3, 4)) == math.comb(6, 2)
    assert len(list(up_to_norm(2, 2))) == 6
    assert len(list(below((2, 1)))) == 6


@given(indices(3), indices(3), indices(3))
def test_leq_is_partial_order(a, b, c):
    assert mi_leq(a, a)
    if mi_leq(a, b) and mi_leq(b, a):
        assert a == b
    if mi_leq(a, b) and mi_leq(b, c):
        assert mi_leq(a, c)


@given(indices(3, 8), indices(3, 8))
def test_binomial_factorial_relation(a, b):
    if mi_leq(b, a):
        assert mi_binomial(a, b) * mi_factorial(b) * mi_factorial(mi_sub(a, b)) == mi_factorial(a)
    else:
        assert mi_binomial(a, b) == 0


@given(indices(2), indices(2))
def test_add_sub_roundtrip(a, b):
    assert mi_sub(mi_add(a, b), b) == a


def test_identity_A_examples():
    assert verify_identity_A((3,))
    assert verify_identity_A((2, 2))
    assert verify_identity_A((0, 0))


def test_identity_B_examples():
    assert verify_identity_B((3,), (2,), (1,))
    assert verify_identity_B((2, 2), (1, 1), (0, 0))
    assert verify_identity_B((1,), (1,), (0,))


def test_identity_B_precondition():
    with pytest.raises(DomainError):
        verify_identity_B((2,), (1,), (1,))
    with pytest.raises(DomainError):
        verify_identity_B((2, 2), (1, 0), (0, 1))


def _sign_convention_single_variable(l, s):
    # the sign must follow |w|, not s
    return sum((-1) ** w * math.comb(l, w) * math.comb(l - w, l - s) for w in range(s + 1))


def test_identity_A_single_variable_sign():
    for l in range(1, 9):
        for s in range(1, l + 1):
            assert _sign_convention_single_variable(l, s) == 0


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(indices(n, 4), indices(n, 4), indices(n, 4))))
def test_identity_B_random(triple):
    l, eta, r = triple
    if mi_leq(r, eta) and r != eta:
        assert verify_identity_B(l, eta, r)
