"""Gaussian moment pairing and the order-by-order solve for the c-series.

Pairing a monomial ``u^p vbar^q * v^r vbar^s`` against the test function
``v^l`` under ``exp(u.vbar - |v|^2) dV`` gives
``(l+r)!/(l+r-q-s)! u^{p+l+r-q-s}`` (zero unless ``q+s <= l+r``).  At order
``t`` the unknown ``c_t`` enters only through its pairing with ``a_0 = 1``,
which is triangular in ``l``: solving the levels ``|l| = 0, 1, ...`` in turn
gives each ``c_t^{p,l}`` by a single division by ``l!``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import DimensionError, DomainError, InvariantViolation
from .multiindex import (MultiIndex, falling_factorial, mi_add, mi_factorial,
                         mi_leq, of_norm, zero)
from .polyring import (BidegreePolynomial, ComplexRational, HalfPowerSeries,
                       has_parity_property, satisfies_degree_bound)


@dataclass(frozen=True)
class MomentTerm:
    """``coefficient * u^u_exponent``; a zero coefficient is the zero term."""

    coefficient: int
    u_exponent: Optional[MultiIndex]

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0


def _zero_term() -> MomentTerm:
    return MomentTerm(0, None)


def gaussian_moment(p: MultiIndex, q: MultiIndex) -> MomentTerm:
    """``int vbar^p v^q exp(u.vbar - |v|^2) dV = q!/(q-p)! u^{q-p}`` for ``p <= q``."""
    if len(p) != len(q):
        raise DimensionError(f"length mismatch: {p} vs {q}")
    if not mi_leq(p, q):
        return _zero_term()
    return MomentTerm(falling_factorial(q, p), tuple(b - a for a, b in zip(p, q)))


def pair_with_monomial(l, p, q, r, s) -> MomentTerm:
    """Contribution of ``u^p vbar^q v^r vbar^s`` tested against ``v^l``."""
    if not (len(l) == len(p) == len(q) == len(r) == len(s)):
        raise DimensionError("multi-index lengths differ")
    top = mi_add(l, r)
    qs = mi_add(q, s)
    moment = gaussian_moment(qs, top)
    if moment.is_zero:
        return moment
    return MomentTerm(moment.coefficient, mi_add(p, moment.u_exponent))


# A product c_j(u, vbar) * a_m(v, vbar) keyed by (u-exp, v-exp, vbar-exp).
Triple = Dict[Tuple[MultiIndex, MultiIndex, MultiIndex], ComplexRational]


def _accumulate_product(out: Triple, c: BidegreePolynomial, a: BidegreePolynomial) -> None:
    for (p, q), cc in c.terms.items():
        for (r, s), ca in a.terms.items():
            key = (p, r, mi_add(q, s))
            val = cc * ca
            prev = out.get(key)
            out[key] = val if prev is None else prev + val


def _pair_triple(prod: Triple, l: MultiIndex) -> Dict[MultiIndex, ComplexRational]:
    """Pair a product polynomial with ``v^l``; result is a polynomial in ``u``."""
    out: Dict[MultiIndex, ComplexRational] = {}
    for (p, r, qs), coeff in prod.items():
        top = tuple(x + y for x, y in zip(l, r))
        factor = falling_factorial(top, qs)
        if not factor:
            continue
        exp = tuple(pi + ti - si for pi, ti, si in zip(p, top, qs))
        val = coeff * factor
        prev = out.get(exp)
        out[exp] = val if prev is None else prev + val
    return out


def solve_coefficients(a: HalfPowerSeries, N: int,
                       rng: random.Random | None = None) -> HalfPowerSeries:
    """Solve for the c-series up to order ``N`` from the a-series.

    Test monomials ``v^l`` with ``|l| <= 2t`` fix ``c_t`` completely because
    ``c_t^{p,q}`` vanishes for ``|q| > 2t``.  ``rng`` shuffles the order in
    which the ``l`` of each level are visited; the result must not change.
    """
    n = a.dimension
    if a.truncation_order < N:
        raise DomainError(
            f"a-series truncated at {a.truncation_order}, need order {N}")
    if a[0] != BidegreePolynomial.constant(n, 1):
        raise DomainError("a_0 must be the constant 1")
    if not satisfies_degree_bound(a) or not has_parity_property(a):
        raise DomainError("a-series violates the degree bound or parity property")

    c: Dict[int, BidegreePolynomial] = {0: BidegreePolynomial.constant(n, 1)}
    for t in range(1, N + 1):
        known: Triple = {}
        for j in range(t):
            if j in c and a[t - j]:
                _accumulate_product(known, c[j], a[t - j])
        solved: Dict[Tuple[MultiIndex, MultiIndex], ComplexRational] = {}
        for lam in range(2 * t + 1):
            level = list(of_norm(n, lam))
            if rng is not None:
                rng.shuffle(level)
            for l in level:
                rhs = _pair_triple(known, l)
                # move the already-solved c_t^{.,q}, q < l, to the right side
                for (p, q), cq in solved.items():
                    if q == l or not mi_leq(q, l):
                        continue
                    factor = falling_factorial(l, q)
                    exp = tuple(pi + li - qi for pi, li, qi in zip(p, l, q))
                    val = cq * factor
                    prev = rhs.get(exp)
                    rhs[exp] = val if prev is None else prev + val
                lf = mi_factorial(l)
                for p, val in rhs.items():
                    if val:
                        solved[(p, l)] = -val / lf
        poly = BidegreePolynomial(n, solved)
        if poly:
            c[t] = poly
    out = HalfPowerSeries(n, N, c)
    if not has_parity_property(out):
        raise InvariantViolation("solved c-series violates the parity property")
    if not satisfies_degree_bound(out):
        raise InvariantViolation("solved c-series violates deg c_m <= 2m")
    return out


@dataclass(frozen=True)
class ReproducingReport:
    ok: bool
    failure: Optional[Tuple[MultiIndex, int]] = None
    residual: Optional[BidegreePolynomial] = None
    checked_monomials: int = 0

    def __bool__(self):
        return self.ok


def verify_reproducing(c: HalfPowerSeries, a: HalfPowerSeries, N: int,
                       L: int) -> ReproducingReport:
    """Check the truncated reproducing identity for all ``v^l`` with ``|l| <= L``.

    At order 0 the pairing must return ``u^l``; at every order ``1..N`` it
    must vanish.  Stops at the first failing ``(l, t)``.
    """
    if c.dimension != a.dimension:
        raise DimensionError("c and a series have different dimensions")
    n = c.dimension
    N = min(N, c.truncation_order, a.truncation_order)
    monomials = [l for lam in range(L + 1) for l in of_norm(n, lam)]
    one = ComplexRational(1)
    for t in range(N + 1):
        prod: Triple = {}
        for j in range(t + 1):
            if c[j] and a[t - j]:
                _accumulate_product(prod, c[j], a[t - j])
        for l in monomials:
            got = {e: v for e, v in _pair_triple(prod, l).items() if v}
            expected = {l: one} if t == 0 else {}
            if got != expected:
                diff = dict(got)
                for e, v in expected.items():
                    diff[e] = diff.get(e, ComplexRational(0)) - v
                zero_n = zero(n)
                residual = BidegreePolynomial(n, {(e, zero_n): v for e, v in diff.items()})
                return ReproducingReport(False, (l, t), residual, len(monomials))
    return ReproducingReport(True, None, None, len(monomials))


def check_parity(S: HalfPowerSeries) -> bool:
    return has_parity_property(S)


def check_degree_bound(S: HalfPowerSeries, slope: int = 2) -> bool:
    return satisfies_degree_bound(S, slope)
