"""Exact sparse polynomials and truncated half-power series.

``ComplexRational`` is a Gaussian rational built on :class:`fractions.Fraction`.
``BidegreePolynomial`` maps ``(holo, anti)`` exponent pairs to coefficients;
the holomorphic variable is ``u`` (or ``v``/``z``) and the antiholomorphic one
``vbar`` (or ``zbar``) depending on context.  ``HalfPowerSeries`` stores one
polynomial per power of ``k^{-1/2}`` up to a truncation order.

All three are immutable values.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Tuple

from .errors import DimensionError, DomainError, ParseError
from .multiindex import MultiIndex, mi_add, zero

Key = Tuple[MultiIndex, MultiIndex]


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"`` or ``"num"`` exactly.  Floats are rejected."""
    if isinstance(text, bool) or isinstance(text, float):
        raise ParseError(f"not an exact rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"not an exact rational: {text!r}")
    s = text.strip()
    parts = s.split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            den = int(parts[1])
            if den == 0:
                raise ParseError(f"zero denominator in {text!r}")
            return Fraction(int(parts[0]), den)
    except ValueError:
        pass
    raise ParseError(f"malformed rational string {text!r}")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class ComplexRational:
    """Exact ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "ComplexRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def parse(cls, re: str, im: str = "0") -> "ComplexRational":
        return cls._raw(parse_rational(re), parse_rational(im))

    @classmethod
    def coerce(cls, x) -> "ComplexRational":
        if isinstance(x, ComplexRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls._raw(Fraction(x), Fraction(0))
        if isinstance(x, complex):
            raise TypeError("floating-point complex values are not exact")
        raise TypeError(f"cannot coerce {x!r} to ComplexRational")

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, ComplexRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __neg__(self):
        return ComplexRational._raw(-self.re, -self.im)

    def __add__(self, other):
        if not isinstance(other, ComplexRational):
            other = ComplexRational.coerce(other)
        return ComplexRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ComplexRational):
            other = ComplexRational.coerce(other)
        return ComplexRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexRational.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return ComplexRational._raw(self.re * other, self.im * other)
        if not isinstance(other, ComplexRational):
            other = ComplexRational.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return ComplexRational._raw(a * c, b)
        return ComplexRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return ComplexRational._raw(self.re / other, self.im / other)
        other = ComplexRational.coerce(other)
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero")
        num = self * other.conjugate()
        return ComplexRational._raw(num.re / den, num.im / den)

    def conjugate(self) -> "ComplexRational":
        return ComplexRational._raw(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"CR({self.re})"
        return f"CR({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ONE = ComplexRational(1)
ZERO = ComplexRational(0)


def _canonical_key(key: Key):
    holo, anti = key
    return (sum(holo) + sum(anti), holo + anti)


class BidegreePolynomial:
    """Sparse polynomial in a holomorphic/antiholomorphic variable pair."""

    __slots__ = ("dimension", "_terms")

    def __init__(self, dimension: int, terms: Mapping[Key, object] | Iterable = ()):
        self.dimension = dimension
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: Dict[Key, ComplexRational] = {}
        for (holo, anti), coeff in items:
            holo, anti = tuple(holo), tuple(anti)
            if len(holo) != dimension or len(anti) != dimension:
                raise DimensionError(
                    f"term {(holo, anti)} does not have length {dimension}")
            if any(e < 0 for e in holo + anti):
                raise DomainError(f"negative exponent in {(holo, anti)}")
            c = ComplexRational.coerce(coeff)
            key = (holo, anti)
            if key in clean:
                c = clean[key] + c
            clean[key] = c
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _from_clean(cls, dimension: int, terms: Dict[Key, ComplexRational]):
        obj = object.__new__(cls)
        obj.dimension = dimension
        obj._terms = terms
        return obj

    @classmethod
    def constant(cls, dimension: int, value=1) -> "BidegreePolynomial":
        z = zero(dimension)
        return cls(dimension, {(z, z): value})

    @classmethod
    def monomial(cls, holo, anti, coeff=1) -> "BidegreePolynomial":
        holo, anti = tuple(holo), tuple(anti)
        return cls(len(holo), {(holo, anti): coeff})

    @property
    def terms(self) -> Mapping[Key, ComplexRational]:
        return self._terms

    def items(self) -> Iterator[Tuple[Key, ComplexRational]]:
        """Terms in canonical graded-lex order."""
        for key in sorted(self._terms, key=_canonical_key):
            yield key, self._terms[key]

    def coefficient(self, holo, anti) -> ComplexRational:
        return self._terms.get((tuple(holo), tuple(anti)), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(h) + sum(a) for h, a in self._terms)

    def _check(self, other: "BidegreePolynomial") -> None:
        if self.dimension != other.dimension:
            raise DimensionError(
                f"dimension mismatch: {self.dimension} vs {other.dimension}")

    def __eq__(self, other):
        if not isinstance(other, BidegreePolynomial):
            return NotImplemented
        return self.dimension == other.dimension and self._terms == other._terms

    def __hash__(self):
        return hash((self.dimension, frozenset(self._terms.items())))

    def __add__(self, other: "BidegreePolynomial") -> "BidegreePolynomial":
        return poly_add(self, other)

    def __neg__(self):
        return BidegreePolynomial._from_clean(
            self.dimension, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return poly_add(self, -other)

    def scale(self, factor) -> "BidegreePolynomial":
        factor = ComplexRational.coerce(factor)
        if not factor:
            return BidegreePolynomial._from_clean(self.dimension, {})
        return BidegreePolynomial._from_clean(
            self.dimension, {k: v * factor for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, BidegreePolynomial):
            return poly_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def evaluate(self, holo_values, anti_values) -> complex:
        """Floating-point evaluation at ``(holo_values, anti_values)``."""
        total = 0j
        for (h, a), c in self._terms.items():
            term = complex(c)
            for x, e in zip(holo_values, h):
                if e:
                    term *= x ** e
            for y, e in zip(anti_values, a):
                if e:
                    term *= y ** e
            total += term
        return total

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (h, a), c in self.items():
            parts.append(f"{c}*u^{h}*vbar^{a}")
        return " + ".join(parts)


def poly_add(f: BidegreePolynomial, g: BidegreePolynomial) -> BidegreePolynomial:
    f._check(g)
    out = dict(f._terms)
    for k, v in g._terms.items():
        if k in out:
            s = out[k] + v
            if s:
                out[k] = s
            else:
                del out[k]
        else:
            out[k] = v
    return BidegreePolynomial._from_clean(f.dimension, out)


def poly_mul(f: BidegreePolynomial, g: BidegreePolynomial) -> BidegreePolynomial:
    f._check(g)
    out: Dict[Key, ComplexRational] = {}
    for (h1, a1), c1 in f._terms.items():
        for (h2, a2), c2 in g._terms.items():
            key = (mi_add(h1, h2), mi_add(a1, a2))
            c = c1 * c2
            if key in out:
                out[key] = out[key] + c
            else:
                out[key] = c
    return BidegreePolynomial._from_clean(
        f.dimension, {k: v for k, v in out.items() if v})


def hermitian_transpose(f: BidegreePolynomial) -> BidegreePolynomial:
    """Swap holomorphic and antiholomorphic exponents and conjugate."""
    return BidegreePolynomial._from_clean(
        f.dimension, {(a, h): c.conjugate() for (h, a), c in f._terms.items()})


class HalfPowerSeries:
    """Truncated series ``sum_{m <= N} A_m k^{-m/2}`` with polynomial ``A_m``."""

    __slots__ = ("dimension", "truncation_order", "_coeffs")

    def __init__(self, dimension: int, truncation_order: int,
                 coeffs: Mapping[int, BidegreePolynomial] = ()):
        if truncation_order < 0:
            raise DomainError("truncation order must be nonnegative")
        self.dimension = dimension
        self.truncation_order = truncation_order
        clean = {}
        for m, p in dict(coeffs).items():
            if p.dimension != dimension:
                raise DimensionError(
                    f"order-{m} polynomial has dimension {p.dimension}, "
                    f"expected {dimension}")
            if m < 0:
                raise DomainError(f"negative order {m}")
            if m > truncation_order:
                raise DomainError(
                    f"order {m} exceeds truncation order {truncation_order}")
            if p:
                clean[m] = p
        self._coeffs = clean

    @classmethod
    def unit(cls, dimension: int, truncation_order: int) -> "HalfPowerSeries":
        return cls(dimension, truncation_order,
                   {0: BidegreePolynomial.constant(dimension, 1)})

    @classmethod
    def zero(cls, dimension: int, truncation_order: int) -> "HalfPowerSeries":
        return cls(dimension, truncation_order, {})

    def __getitem__(self, m: int) -> BidegreePolynomial:
        if m < 0 or m > self.truncation_order:
            raise IndexError(f"order {m} outside [0, {self.truncation_order}]")
        return self._coeffs.get(m) or BidegreePolynomial(self.dimension)

    def orders(self):
        return sorted(self._coeffs)

    def items(self):
        for m in sorted(self._coeffs):
            yield m, self._coeffs[m]

    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other):
        if not isinstance(other, HalfPowerSeries):
            return NotImplemented
        return (self.dimension == other.dimension
                and self.truncation_order == other.truncation_order
                and self._coeffs == other._coeffs)

    def __hash__(self):
        return hash((self.dimension, self.truncation_order,
                     frozenset(self._coeffs.items())))

    def truncate(self, order: int) -> "HalfPowerSeries":
        order = min(order, self.truncation_order)
        return HalfPowerSeries(self.dimension, order,
                               {m: p for m, p in self._coeffs.items() if m <= order})

    def replace(self, m: int, poly: BidegreePolynomial) -> "HalfPowerSeries":
        coeffs = dict(self._coeffs)
        coeffs[m] = poly
        return HalfPowerSeries(self.dimension, self.truncation_order, coeffs)

    def __add__(self, other: "HalfPowerSeries") -> "HalfPowerSeries":
        _check_series(self, other)
        n = min(self.truncation_order, other.truncation_order)
        out = {}
        for m in range(n + 1):
            s = self[m] + other[m]
            if s:
                out[m] = s
        return HalfPowerSeries(self.dimension, n, out)

    def __neg__(self):
        return HalfPowerSeries(self.dimension, self.truncation_order,
                               {m: -p for m, p in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "HalfPowerSeries":
        return HalfPowerSeries(self.dimension, self.truncation_order,
                               {m: p.scale(factor) for m, p in self._coeffs.items()})

    def __repr__(self):
        body = ", ".join(f"{m}: {p!r}" for m, p in self.items())
        return f"HalfPowerSeries(n={self.dimension}, N={self.truncation_order}, {{{body}}})"


def _check_series(a: HalfPowerSeries, b: HalfPowerSeries) -> None:
    if a.dimension != b.dimension:
        raise DimensionError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}")


def series_mul(A: HalfPowerSeries, B: HalfPowerSeries, N: int | None = None) -> HalfPowerSeries:
    """Cauchy product truncated at ``N`` (and at both operands' truncation)."""
    _check_series(A, B)
    top = min(A.truncation_order, B.truncation_order)
    if N is not None:
        top = min(top, N)
    out: Dict[int, BidegreePolynomial] = {}
    for i, a in A._coeffs.items():
        if i > top:
            continue
        for j, b in B._coeffs.items():
            t = i + j
            if t > top:
                continue
            prod = poly_mul(a, b)
            out[t] = poly_add(out[t], prod) if t in out else prod
    return HalfPowerSeries(A.dimension, top, out)


def series_exp(A: HalfPowerSeries, N: int | None = None) -> HalfPowerSeries:
    """``exp(A)`` truncated at ``N``.

    ``A`` must have no order-0 part; then every factor raises the minimum order
    by at least one and the sum ends after ``N`` powers.
    """
    top = A.truncation_order if N is None else min(N, A.truncation_order)
    if A._coeffs.get(0):
        raise DomainError("non-nilpotent exponent: order-0 part must vanish")
    A = A.truncate(top)
    n = A.dimension
    result = HalfPowerSeries.unit(n, top)
    if A.is_zero():
        return result
    lowest = min(A.orders())
    power = HalfPowerSeries.unit(n, top)
    fact = 1
    m = 1
    while m * lowest <= top:
        power = series_mul(power, A, top)
        fact *= m
        result = result + power.scale(Fraction(1, fact))
        m += 1
    return result


def weight_of(A: HalfPowerSeries) -> int:
    """``max_j (deg A_j - j)`` over nonzero orders."""
    if A.is_zero():
        raise DomainError("weight of the zero series is undefined")
    return max(p.degree() - m for m, p in A.items())


def has_parity_property(A: HalfPowerSeries) -> bool:
    for m, p in A.items():
        for h, a in p.terms:
            if (sum(h) + sum(a) - m) % 2:
                return False
    return True


def satisfies_degree_bound(A: HalfPowerSeries, slope: int = 2) -> bool:
    return all(p.degree() <= slope * m for m, p in A.items())


# -- serialization ---------------------------------------------------------

def poly_to_records(p: BidegreePolynomial, holo_name="u", anti_name="vbar"):
    return [
        {holo_name: list(h), anti_name: list(a),
         "re": format_rational(c.re), "im": format_rational(c.im)}
        for (h, a), c in p.items()
    ]


def poly_from_records(dimension: int, records, holo_name="u", anti_name="vbar"):
    terms = []
    for rec in records:
        try:
            holo = rec[holo_name]
            anti = rec[anti_name]
            coeff = ComplexRational.parse(rec.get("re", "0"), rec.get("im", "0"))
        except KeyError as exc:
            raise ParseError(f"term record missing field {exc}") from None
        if not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0
                   for e in list(holo) + list(anti)):
            raise ParseError(f"bad exponent list in {rec}")
        terms.append(((tuple(holo), tuple(anti)), coeff))
    return BidegreePolynomial(dimension, terms)


def series_to_records(S: HalfPowerSeries):
    out = []
    for m, p in S.items():
        for rec in poly_to_records(p):
            out.append({"order": m, **rec})
    return out


def series_from_records(dimension: int, truncation_order: int, records) -> HalfPowerSeries:
    grouped: Dict[int, list] = {}
    for rec in records:
        grouped.setdefault(int(rec["order"]), []).append(rec)
    return HalfPowerSeries(
        dimension, truncation_order,
        {m: poly_from_records(dimension, recs) for m, recs in grouped.items()})
