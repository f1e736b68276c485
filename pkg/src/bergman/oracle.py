"""Independent numerical ground truth.

* Gaussian moments by tensor-product Gauss-Hermite quadrature, never using the
  closed form of the moment.
* The Bergman kernel of ``O(k)`` over CP^1 with the Fubini-Study metric, whose
  monomial norms come from direct numerical radial integration.

Volume normalization: ``dV = (i/2pi)^n dz ^ dzbar = pi^{-n} dx dy``, so that
``int exp(-|v|^2) dV = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence

import mpmath
import numpy as np

from .errors import DimensionError, DomainError, ResourceError

MAX_TENSOR_POWER = 10_000
NORM_DIGITS = 34


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes for ``int f(x) exp(-x^2) dx`` on each real axis.

    Exact for polynomials of degree ``<= 2Q - 1`` per axis.  A complex
    coordinate ``v = x + iy`` uses the ``Q x Q`` product grid.
    """

    nodes_per_real_axis: int
    dimension: int = 1
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.nodes_per_real_axis < 1:
            raise DomainError("need at least one node")
        x, w = np.polynomial.hermite.hermgauss(self.nodes_per_real_axis)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    @property
    def complex_grid(self):
        """Nodes ``v`` and weights for one complex coordinate, already divided by pi."""
        return _complex_grid(self.nodes_per_real_axis)


@lru_cache(maxsize=16)
def _complex_grid(Q: int):
    x, w = np.polynomial.hermite.hermgauss(Q)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w) / np.pi
    return (X + 1j * Y).ravel(), W.ravel()


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    resolved: bool

    def __complex__(self):
        return complex(self.value)


def required_nodes(p: Sequence[int], q: Sequence[int], u: Sequence[complex]) -> int:
    """Smallest ``Q`` for which the neglected Taylor tail of ``exp(u.vbar)`` is below 1e-18."""
    deg = max(pi + qi for pi, qi in zip(p, q)) if len(p) else 0
    umax = max((abs(x) for x in u), default=0.0)
    m = 0
    while m < 400:
        # size of the degree-m term of exp(u vbar) against the Gaussian
        log_term = (m * math.log(umax) if umax > 0 else (-math.inf if m else 0.0)) \
            + math.lgamma((m + deg) / 2 + 1) - math.lgamma(m + 1)
        if m > 0 and log_term < math.log(1e-18):
            break
        m += 1
    return (deg + m) // 2 + 2


def numeric_moment(p, q, u, Q: int | None = None) -> QuadratureResult:
    """Quadrature estimate of ``int vbar^p v^q exp(u.vbar - |v|^2) dV``.

    The integrand factors over coordinates, so the ``2n``-fold product rule
    reduces to a product of two-dimensional rules.
    """
    p, q = tuple(p), tuple(q)
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    if not (len(p) == len(q) == len(u)):
        raise DimensionError("p, q and u must have the same length")
    need = required_nodes(p, q, u)
    if Q is None:
        Q = max(need, 24)
    v, w = _complex_grid(Q)
    vb = np.conj(v)
    value = 1.0 + 0j
    for pi, qi, ui in zip(p, q, u):
        value *= np.sum(w * vb ** pi * v ** qi * np.exp(ui * vb))
    return QuadratureResult(complex(value), Q >= need)


def moment_table(u, max_degree: int, Q: int = 40) -> np.ndarray:
    """All one-coordinate moments ``M[i, p, q]`` for ``p, q <= max_degree``.

    ``numeric_moment(p, q, u)`` equals ``prod_i M[i, p_i, q_i]``.
    """
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    v, w = _complex_grid(Q)
    vb = np.conj(v)
    powers_v = np.vander(v, max_degree + 1, increasing=True)      # (nodes, q)
    powers_vb = np.vander(vb, max_degree + 1, increasing=True)    # (nodes, p)
    out = np.empty((len(u), max_degree + 1, max_degree + 1), dtype=complex)
    for i, ui in enumerate(u):
        weighted = (w * np.exp(ui * vb))[:, None] * powers_v
        out[i] = powers_vb.T @ weighted
    return out


def bargmann_fock_reproduce(f_exponent, u, Q: int | None = None) -> complex:
    """``<v^q, exp(v . ubar)>_F`` by quadrature; should equal ``u^q``."""
    q = tuple(f_exponent)
    return numeric_moment((0,) * len(q), q, u, Q).value


# -- CP^1 --------------------------------------------------------------------

def _radial_norm(a: int, k: int) -> mpmath.mpf:
    """``||z^a||^2 = int |z|^{2a} (1+|z|^2)^{-k} Omega dV`` on the affine chart.

    With ``Omega = (1+|z|^2)^{-2}`` and ``t = |z|^2 = e^x`` the integral is
    ``int exp((a+1)x - (k+2) log(1+e^x)) dx``; the log-concave integrand is
    centred on its peak and integrated piecewise to +-infinity.
    """
    p = mpmath.mpf(a + 1) / (k + 2)
    peak = mpmath.log(p / (1 - p))
    width = 1 / mpmath.sqrt((k + 2) * p * (1 - p))
    top = (a + 1) * peak - (k + 2) * mpmath.log1p(mpmath.exp(peak))

    def integrand(x):
        return mpmath.exp((a + 1) * x - (k + 2) * mpmath.log1p(mpmath.exp(x)) - top)

    cuts = [peak + width * s for s in (-20, -6, 0, 6, 20)]
    value = mpmath.quad(integrand, [-mpmath.inf] + cuts + [mpmath.inf],
                        method="gauss-legendre")
    return value * mpmath.exp(top)


class CP1Kernel:
    """Bergman kernel of ``H^0(CP^1, O(k))`` in the frame ``e_L^k``, ``h = e^{-phi}``.

    ``phi = log(1 + |z|^2)`` on the affine chart; this chart is already a
    Böchner chart at ``z = 0`` and ``e_L`` is the frame whose norm is
    ``e^{-phi}``, so no change of frame is needed to compare with the local
    expansion there.  Norms are computed lazily and cached.
    """

    def __init__(self, k: int, digits: int = NORM_DIGITS):
        if k < 1:
            raise DomainError("tensor power must be >= 1")
        if k > MAX_TENSOR_POWER:
            raise ResourceError(f"tensor power {k} exceeds {MAX_TENSOR_POWER}")
        self.model = "CP1-FubiniStudy"
        self.tensor_power = k
        self.digits = digits
        self._norms: List[mpmath.mpf] = []

    def norm(self, a: int) -> mpmath.mpf:
        if not 0 <= a <= self.tensor_power:
            raise DomainError(f"monomial degree {a} outside [0, {self.tensor_power}]")
        with mpmath.workdps(self.digits):
            while len(self._norms) <= a:
                self._norms.append(_radial_norm(len(self._norms), self.tensor_power))
        return self._norms[a]

    @property
    def basis_norms(self) -> List[mpmath.mpf]:
        self.norm(self.tensor_power)
        return list(self._norms)

    def kernel(self, z, w) -> mpmath.mpc:
        """``sum_a z^a wbar^a / ||z^a||^2`` summed until the tail is negligible.

        Moment sequences are log-convex, so the term ratio
        ``|z w| ||z^a||^2 / ||z^{a+1}||^2`` never increases and bounds the tail
        geometrically once it drops below 1.
        """
        k = self.tensor_power
        with mpmath.workdps(self.digits):
            x = mpmath.mpc(z) * mpmath.conj(mpmath.mpc(w))
            ax = abs(x)
            total = mpmath.mpc(0)
            power = mpmath.mpc(1)
            tol = mpmath.mpf(10) ** (-(self.digits - 4))
            prev_norm = None
            for a in range(k + 1):
                na = self.norm(a)
                term = power / na
                total += term
                if a < k and prev_norm is not None and a > 0:
                    ratio = ax * prev_norm / na
                    nxt = abs(term) * ratio
                    if ratio < 1 and nxt / (1 - ratio) <= tol * abs(total):
                        break
                prev_norm = na
                power *= x
            return total

    def bergman_function(self, z) -> mpmath.mpf:
        """``K(z, z) e^{-k phi(z)}``; constant ``k + 1`` on CP^1."""
        k = self.tensor_power
        with mpmath.workdps(self.digits):
            t = abs(mpmath.mpc(z)) ** 2
            total = mpmath.mpf(0)
            power = mpmath.mpf(1)
            for a in range(k + 1):
                total += power / self.norm(a)
                power *= t
            return total * (1 + t) ** (-k)


def cp1_exact_kernel(k: int, z, w) -> complex:
    return complex(_cp1(k).kernel(z, w))


@lru_cache(maxsize=32)
def _cp1(k: int) -> CP1Kernel:
    return CP1Kernel(k)


def cp1_model(k: int) -> CP1Kernel:
    """Shared cached kernel object for tensor power ``k``."""
    return _cp1(k)
