"""Kähler potential jets in Böchner coordinates and their curvature at 0."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Tuple

from .errors import InsufficientJetError, JetValidationError, ParseError
from .multiindex import MAX_DIMENSION, mi_factorial, of_norm, unit, zero
from .polyring import (BidegreePolynomial, ComplexRational, poly_from_records,
                       poly_to_records)

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class PotentialJet:
    """Taylor data of ``phi`` at the origin, ``phi = |z|^2 + R``.

    ``phi_terms`` is a polynomial in ``(z, zbar)``.  Construction validates
    hermitian reality, the normal form through degree 3 and the degree cap.
    With ``strict=True`` every term of ``R`` must also have at least two
    holomorphic and two antiholomorphic factors, which is the full Böchner
    normal form (no ``z^4`` or ``z^3 zbar`` type terms).
    """

    dimension: int
    max_degree: int
    phi_terms: BidegreePolynomial
    strict: bool = field(default=False, compare=False)

    def __post_init__(self):
        validate_jet(self)

    @property
    def remainder(self) -> BidegreePolynomial:
        """``R = phi - |z|^2``."""
        n = self.dimension
        flat = BidegreePolynomial(n, {(unit(n, i), unit(n, i)): 1 for i in range(n)})
        return self.phi_terms - flat

    def degree_part(self, d: int) -> BidegreePolynomial:
        return BidegreePolynomial(self.dimension, {
            k: c for k, c in self.phi_terms.terms.items()
            if sum(k[0]) + sum(k[1]) == d})

    def has_pure_quartic(self) -> bool:
        """True when the degree-4 part of ``phi`` is of bidegree (2, 2) only."""
        return all(sum(h) == 2 and sum(a) == 2
                   for h, a in self.degree_part(4).terms)

    def to_document(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "dimension": self.dimension,
            "max_degree": self.max_degree,
            "terms": poly_to_records(self.phi_terms, "z", "zbar"),
        }


def validate_jet(jet: PotentialJet) -> None:
    n, D, phi = jet.dimension, jet.max_degree, jet.phi_terms
    if not isinstance(n, int) or not 1 <= n <= MAX_DIMENSION:
        raise JetValidationError(f"dimension must be in [1, {MAX_DIMENSION}], got {n}")
    if phi.dimension != n:
        raise JetValidationError(
            f"potential has dimension {phi.dimension}, jet declares {n}")
    if not isinstance(D, int) or D < 2:
        raise JetValidationError(f"max_degree must be an integer >= 2, got {D}")
    for (h, a), c in phi.terms.items():
        deg = sum(h) + sum(a)
        if deg > D:
            raise JetValidationError(
                f"term z^{h} zbar^{a} has degree {deg} > max_degree {D}", (h, a))
        if phi.coefficient(a, h) != c.conjugate():
            raise JetValidationError(
                f"non-hermitian coefficients at z^{h} zbar^{a}", (h, a))
        if deg <= 3 and not (deg == 2 and sum(h) == 1 and h == a):
            raise JetValidationError(
                f"not in Böchner form: unexpected term z^{h} zbar^{a}", (h, a))
        if jet.strict and deg >= 4 and (sum(h) < 2 or sum(a) < 2):
            raise JetValidationError(
                f"not in Böchner form: term z^{h} zbar^{a} has fewer than two "
                "factors of one type", (h, a))
    for i in range(n):
        e = unit(n, i)
        if phi.coefficient(e, e) != 1:
            raise JetValidationError(
                f"not in Böchner form: coefficient of |z_{i + 1}|^2 must be 1",
                (e, e))


def load_jet(source: Mapping, strict: bool = False) -> PotentialJet:
    """Build a validated jet from a parsed JSON document."""
    if not isinstance(source, Mapping):
        raise ParseError("jet document must be a JSON object")
    version = source.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unrecognized schema_version {version!r}")
    try:
        n = source["dimension"]
        D = source["max_degree"]
        records = source["terms"]
    except KeyError as exc:
        raise ParseError(f"jet document missing field {exc}") from None
    if not isinstance(n, int) or not isinstance(D, int):
        raise ParseError("dimension and max_degree must be integers")
    if not 1 <= n <= MAX_DIMENSION:
        raise JetValidationError(f"dimension must be in [1, {MAX_DIMENSION}], got {n}")
    for rec in records:
        for name in ("z", "zbar"):
            if len(rec.get(name, ())) != n:
                raise ParseError(f"exponent list {name} of {rec} must have length {n}")
    phi = poly_from_records(n, records, "z", "zbar")
    return PotentialJet(n, D, phi, strict=strict)


def flat_jet(n: int = 1, max_degree: int = 4) -> PotentialJet:
    phi = BidegreePolynomial(n, {(unit(n, i), unit(n, i)): 1 for i in range(n)})
    return PotentialJet(n, max_degree, phi)


def fubini_study_jet(max_degree: int = 6) -> PotentialJet:
    """Taylor jet of ``log(1 + |z|^2)`` on the affine chart of CP^1."""
    terms = {}
    for m in range(1, max_degree // 2 + 1):
        terms[((m,), (m,))] = Fraction((-1) ** (m + 1), m)
    return PotentialJet(1, max_degree, BidegreePolynomial(1, terms))


def product_jet(first: PotentialJet, second: PotentialJet) -> PotentialJet:
    """Potential of the product metric ``phi_1(z_1) + phi_2(z_2)``."""
    n1, n2 = first.dimension, second.dimension
    terms = {}
    for (h, a), c in first.phi_terms.terms.items():
        terms[(h + zero(n2), a + zero(n2))] = c
    for (h, a), c in second.phi_terms.terms.items():
        terms[(zero(n1) + h, zero(n1) + a)] = c
    D = max(first.max_degree, second.max_degree)
    return PotentialJet(n1 + n2, D, BidegreePolynomial(n1 + n2, terms))


def random_jet(n: int, max_degree: int, rng: random.Random,
               density: float = 0.6, max_num: int = 3, complex_coeffs: bool = True,
               strict: bool = True) -> PotentialJet:
    """Random hermitian jet with small rational coefficients.

    With ``strict`` only terms with ``|p|, |q| >= 2`` are generated, so the
    result is in full Böchner normal form.
    """
    terms: Dict[Tuple, ComplexRational] = {}
    for i in range(n):
        terms[(unit(n, i), unit(n, i))] = ComplexRational(1)
    for deg in range(4, max_degree + 1):
        for d1 in range(deg + 1):
            d2 = deg - d1
            if d1 > d2:
                continue
            if strict and d1 < 2:
                continue
            for h in _of_degree(n, d1):
                for a in _of_degree(n, d2):
                    if (a, h) in terms or (h, a) in terms:
                        continue
                    if rng.random() > density:
                        continue
                    re = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_num))
                    im = Fraction(0)
                    if complex_coeffs and h != a:
                        im = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_num))
                    c = ComplexRational(re, im)
                    if not c:
                        continue
                    terms[(h, a)] = c
                    if h != a:
                        terms[(a, h)] = c.conjugate()
    return PotentialJet(n, max_degree, BidegreePolynomial(n, terms), strict=strict)


def _of_degree(n, d):
    return of_norm(n, d)


# -- curvature ---------------------------------------------------------------

Index4 = Tuple[int, int, int, int]


@dataclass(frozen=True)
class CurvatureData:
    """Curvature of the Böchner metric at the origin.

    ``riemann[(i, j, k, l)]`` is ``Rm_{i jbar k lbar}(0)``.  Indices are
    zero-based.  The metric at 0 is the identity, so traces need no inverse.
    """

    dimension: int
    riemann: Mapping[Index4, ComplexRational]
    ricci: Mapping[Tuple[int, int], ComplexRational]
    scalar: ComplexRational


def curvature_at_origin(jet: PotentialJet) -> CurvatureData:
    """Read the curvature off the quartic part of ``phi``.

    With ``g = delta + O(|z|^2)`` the first-order term of the curvature
    formula vanishes at 0 and ``Rm_{i jbar k lbar}(0)`` equals minus the
    fourth derivative ``d_i d_k dbar_j dbar_l phi(0)``.  For a term
    ``c z^a zbar^b`` with ``a = e_i + e_k`` and ``b = e_j + e_l`` that derivative
    is ``a! b! c``; on CP^1 the quartic coefficient ``-1/2`` gives
    ``Rm = -2! * 2! * (-1/2) = 2``.
    """
    if jet.max_degree < 4:
        raise InsufficientJetError(
            f"curvature needs max_degree >= 4, jet has {jet.max_degree}")
    n = jet.dimension
    riemann: Dict[Index4, ComplexRational] = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    a = tuple(int(x == i) + int(x == k) for x in range(n))
                    b = tuple(int(x == j) + int(x == l) for x in range(n))
                    c = jet.phi_terms.coefficient(a, b)
                    riemann[(i, j, k, l)] = -(c * (mi_factorial(a) * mi_factorial(b)))
    ricci = {(i, j): sum((riemann[(i, j, k, k)] for k in range(n)), ComplexRational(0))
             for i in range(n) for j in range(n)}
    scalar = sum((ricci[(i, i)] for i in range(n)), ComplexRational(0))
    return CurvatureData(n, riemann, ricci, scalar)


def c2_closed_form(curv: CurvatureData) -> BidegreePolynomial:
    """``rho/2 - 1/4 sum Rm_{i jbar k lbar} u^i u^k vbar^j vbar^l``."""
    n = curv.dimension
    z = zero(n)
    terms = [((z, z), curv.scalar / 2)]
    quarter = Fraction(-1, 4)
    for (i, j, k, l), rm in curv.riemann.items():
        holo = tuple(int(x == i) + int(x == k) for x in range(n))
        anti = tuple(int(x == j) + int(x == l) for x in range(n))
        terms.append(((holo, anti), rm * ComplexRational(quarter)))
    return BidegreePolynomial(n, terms)
