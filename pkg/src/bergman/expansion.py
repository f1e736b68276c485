"""Half-power expansion of ``exp(-k R(v/sqrt k)) * Omega(v/sqrt k)``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .errors import DomainError, InsufficientJetError, InvariantViolation
from .multiindex import MAX_DIMENSION, unit
from .polyring import (BidegreePolynomial, HalfPowerSeries, has_parity_property,
                       hermitian_transpose, satisfies_degree_bound, series_exp,
                       series_mul)


def gauge_shift(f: BidegreePolynomial, prefactor_power: int,
                order: int | None = None) -> HalfPowerSeries:
    """Substitute ``z = v/sqrt(k)`` and multiply by ``k^{-prefactor_power/2}``.

    A term ``z^p zbar^q`` lands at half-power order ``|p| + |q| + prefactor_power``
    with polynomial part ``v^p vbar^q``; ``prefactor_power = -2`` encodes an
    overall factor ``k``.  Orders above ``order`` are dropped.
    """
    grouped = {}
    for (h, a), c in f.terms.items():
        m = sum(h) + sum(a) + prefactor_power
        if m < 0:
            raise DomainError(
                f"term z^{h} zbar^{a} lands at negative order {m}")
        grouped.setdefault(m, {})[(h, a)] = c
    top = max(grouped, default=0) if order is None else order
    return HalfPowerSeries(
        f.dimension, top,
        {m: BidegreePolynomial(f.dimension, t) for m, t in grouped.items() if m <= top})


def d_holo(f: BidegreePolynomial, i: int) -> BidegreePolynomial:
    """``d/dz_i``."""
    out = []
    for (h, a), c in f.terms.items():
        if h[i]:
            nh = h[:i] + (h[i] - 1,) + h[i + 1:]
            out.append(((nh, a), c * h[i]))
    return BidegreePolynomial(f.dimension, out)


def d_anti(f: BidegreePolynomial, j: int) -> BidegreePolynomial:
    """``d/dzbar_j``."""
    out = []
    for (h, a), c in f.terms.items():
        if a[j]:
            na = a[:j] + (a[j] - 1,) + a[j + 1:]
            out.append(((h, na), c * a[j]))
    return BidegreePolynomial(f.dimension, out)


@dataclass(frozen=True)
class HessianSeriesMatrix:
    """Complex Hessian ``d_i dbar_j phi(v/sqrt k)`` as a grid of series."""

    dimension: int
    entries: tuple  # tuple of rows of HalfPowerSeries

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def determinant(self, N: int) -> HalfPowerSeries:
        rows = [list(r) for r in self.entries]
        return _cofactor_det(rows, N)


def hessian_series(phi: BidegreePolynomial, N: int) -> HessianSeriesMatrix:
    n = phi.dimension
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(gauge_shift(d_anti(d_holo(phi, i), j), 0, order=N))
        rows.append(tuple(row))
    H = HessianSeriesMatrix(n, tuple(rows))
    for i in range(n):
        for j in range(n):
            lead = H[i, j][0]
            expect = BidegreePolynomial.constant(n, 1 if i == j else 0)
            if lead != expect:
                raise InvariantViolation(f"Hessian entry ({i},{j}) has order-0 part {lead}")
    return H


def _cofactor_det(rows: List[List[HalfPowerSeries]], N: int) -> HalfPowerSeries:
    size = len(rows)
    if size == 1:
        return rows[0][0].truncate(N)
    total = None
    for col in range(size):
        entry = rows[0][col]
        if entry.is_zero():
            continue
        minor = [r[:col] + r[col + 1:] for r in rows[1:]]
        term = series_mul(entry, _cofactor_det(minor, N), N)
        if col % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return HalfPowerSeries.zero(rows[0][0].dimension, N)
    return total


def omega_series(jet, N: int) -> HalfPowerSeries:
    """``Omega(v/sqrt k) = det(d_i dbar_j phi)(v/sqrt k)`` truncated at ``N``."""
    n = jet.dimension
    if n > MAX_DIMENSION:
        raise DomainError(f"unsupported dimension {n}")
    if N > jet.max_degree - 2:
        raise InsufficientJetError(
            f"order {N} needs max_degree >= {N + 2}, jet has {jet.max_degree}")
    return hessian_series(jet.phi_terms, N).determinant(N)


def a_series(jet, N: int) -> HalfPowerSeries:
    """Coefficients ``a_m(v, vbar)`` of ``exp(-kR(v/sqrt k)) Omega(v/sqrt k)``.

    Terms of ``phi`` of degree ``d`` first contribute at order ``d - 2``, so
    the jet must have ``max_degree >= N + 2``.
    """
    if jet.max_degree < N + 2:
        raise InsufficientJetError(
            f"order {N} needs max_degree >= {N + 2}, jet has {jet.max_degree}")
    exponent = gauge_shift(-jet.remainder, -2, order=N)
    a = series_mul(series_exp(exponent, N), omega_series(jet, N), N)
    _check_a_series(a)
    return a


def _check_a_series(a: HalfPowerSeries) -> None:
    n = a.dimension
    if a[0] != BidegreePolynomial.constant(n, 1):
        raise InvariantViolation(f"a_0 is {a[0]}, expected 1")
    if a.truncation_order >= 1 and a[1]:
        raise InvariantViolation(f"a_1 is {a[1]}, expected 0")
    if not satisfies_degree_bound(a):
        raise InvariantViolation("a-series violates deg a_m <= 2m")
    if not has_parity_property(a):
        raise InvariantViolation("a-series violates the parity property")
    for m, p in a.items():
        if hermitian_transpose(p) != p:
            raise InvariantViolation(f"a_{m} is not hermitian")


def quadratic_identity(n: int) -> BidegreePolynomial:
    return BidegreePolynomial(n, {(unit(n, i), unit(n, i)): 1 for i in range(n)})
