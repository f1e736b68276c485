"""Multi-index arithmetic.

Multi-indices are plain tuples of nonnegative ints.  All helpers check that
their operands share a length and raise :class:`DimensionError` otherwise.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterator, Sequence, Tuple

from .errors import DimensionError, DomainError

MultiIndex = Tuple[int, ...]

MAX_DIMENSION = 4


def multi_index(entries: Sequence[int]) -> MultiIndex:
    """Validate and freeze ``entries`` as a multi-index."""
    t = tuple(int(e) for e in entries)
    if any(e < 0 for e in t):
        raise DomainError(f"negative entry in multi-index {t}")
    return t


def _same_length(a: MultiIndex, b: MultiIndex) -> None:
    if len(a) != len(b):
        raise DimensionError(f"multi-index lengths differ: {a} vs {b}")


def zero(n: int) -> MultiIndex:
    return (0,) * n


def unit(n: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(n))


def mi_norm(a: MultiIndex) -> int:
    return sum(a)


def mi_factorial(a: MultiIndex) -> int:
    return prod(factorial(x) for x in a)


def mi_binomial(a: MultiIndex, b: MultiIndex) -> int:
    """Entrywise binomial product; zero as soon as some ``b_i > a_i``."""
    _same_length(a, b)
    return prod(comb(x, y) for x, y in zip(a, b))


def mi_leq(a: MultiIndex, b: MultiIndex) -> bool:
    _same_length(a, b)
    return all(x <= y for x, y in zip(a, b))


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    _same_length(a, b)
    return tuple(x + y for x, y in zip(a, b))


def mi_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """``a - b``; requires ``b <= a``."""
    _same_length(a, b)
    out = tuple(x - y for x, y in zip(a, b))
    if any(x < 0 for x in out):
        raise DomainError(f"{b} is not <= {a}")
    return out


@lru_cache(maxsize=None)
def falling_factorial(a: MultiIndex, b: MultiIndex) -> int:
    """``a!/(a-b)!`` for ``b <= a``, else 0."""
    _same_length(a, b)
    out = 1
    for x, y in zip(a, b):
        if y > x:
            return 0
        for i in range(x - y + 1, x + 1):
            out *= i
    return out


def below(a: MultiIndex) -> Iterator[MultiIndex]:
    """All ``w <= a``."""
    return itertools.product(*(range(x + 1) for x in a))


@lru_cache(maxsize=None)
def of_norm(n: int, d: int) -> tuple:
    """All multi-indices of length ``n`` and total degree ``d``, lex ordered."""
    if n == 0:
        return ((),) if d == 0 else ()
    if n == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in of_norm(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def up_to_norm(n: int, d: int) -> Iterator[MultiIndex]:
    for k in range(d + 1):
        yield from of_norm(n, k)


def verify_identity_A(l: MultiIndex) -> bool:
    """Check the alternating identity used to collapse the P-side sum.

    For every nonzero ``s <= l``::

        sum_{w <= s} (-1)^{|w|} C(l, w) C(l - w, l - s) == 0
    """
    for s in below(l):
        if not any(s):
            continue
        ls = mi_sub(l, s)
        total = 0
        for w in below(s):
            sign = -1 if sum(w) % 2 else 1
            total += sign * mi_binomial(l, w) * mi_binomial(mi_sub(l, w), ls)
        if total != 0:
            return False
    return True


def verify_identity_B(l: MultiIndex, eta: MultiIndex, r: MultiIndex) -> bool:
    """Check ``sum_{w <= eta} (-1)^{|w|+1} C(l, w) C(r + l - w, eta - w) == 0``.

    Requires ``r < eta`` (``r <= eta`` and ``r != eta``).
    """
    _same_length(l, eta)
    _same_length(eta, r)
    if not mi_leq(r, eta) or r == eta:
        raise DomainError(f"identity B needs r < eta, got r={r}, eta={eta}")
    total = 0
    for w in below(eta):
        if not mi_leq(w, l):
            continue  # C(l, w) = 0
        sign = 1 if sum(w) % 2 else -1
        top = tuple(ri + li - wi for ri, li, wi in zip(r, l, w))
        total += sign * mi_binomial(l, w) * mi_binomial(top, mi_sub(eta, w))
    return total == 0
