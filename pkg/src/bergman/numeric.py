"""Finite-k evaluation of the truncated local kernel and residual scaling runs."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import DimensionError, DomainError, ResourceError
from .expansion import d_anti, d_holo
from .multiindex import MultiIndex, of_norm
from .oracle import cp1_model
from .polyring import BidegreePolynomial, HalfPowerSeries

CSV_COLUMNS = ("k", "N", "l", "u_re", "u_im", "residual", "norm")
NORM_RADIUS_CAP = 12.0
FLOOR = 1e-12


@dataclass(frozen=True)
class ScalingConfig:
    epsilon: float = 0.1
    k_grid: Tuple[int, ...] = (64, 128, 256, 512, 1024, 2048, 4096)
    order: int = 2
    exponents: Tuple[MultiIndex, ...] = ((0,), (1,), (2,))
    u_samples: Tuple[Tuple[complex, ...], ...] = ((0j,), (0.5 + 0j,), (0.6j,), (1 + 0j,))

    def __post_init__(self):
        if not 0 < self.epsilon < 0.25:
            raise DomainError(f"epsilon must lie in (0, 1/4), got {self.epsilon}")
        ks = tuple(self.k_grid)
        if any(k < 4 for k in ks):
            raise DomainError("every tensor power must be >= 4")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise DomainError("k_grid must be strictly increasing")
        for u in self.u_samples:
            if max((abs(x) for x in u), default=0.0) > 1 + 1e-12:
                raise DomainError(f"sample point {u} has |u| > 1")

    @staticmethod
    def geometric(k_min: int, k_max: int, points: int, **kw) -> "ScalingConfig":
        if points < 4:
            raise DomainError("a slope fit needs at least 4 points")
        if not 4 <= k_min < k_max:
            raise DomainError("need 4 <= k_min < k_max")
        grid = np.geomspace(k_min, k_max, points)
        ks = tuple(sorted({int(round(k)) for k in grid}))
        return ScalingConfig(k_grid=ks, **kw)


# -- evaluation helpers -------------------------------------------------------

class _CompiledPoly:
    """Vectorized float evaluation of a polynomial in ``(x, ybar)``."""

    def __init__(self, poly: BidegreePolynomial):
        items = list(poly.items())
        self.dimension = poly.dimension
        self.coeffs = np.array([complex(c) for _, c in items], dtype=complex)
        self.holo = np.array([h for (h, _), _ in items], dtype=int).reshape(len(items), poly.dimension)
        self.anti = np.array([a for (_, a), _ in items], dtype=int).reshape(len(items), poly.dimension)

    def __call__(self, x: Sequence[np.ndarray], y: Sequence[np.ndarray]):
        shape = np.shape(x[0])
        out = np.zeros(shape, dtype=complex)
        for c, h, a in zip(self.coeffs, self.holo, self.anti):
            term = np.full(shape, c, dtype=complex)
            for i in range(self.dimension):
                if h[i]:
                    term = term * x[i] ** h[i]
                if a[i]:
                    term = term * y[i] ** a[i]
            out += term
        return out


def cutoff_chi(x, k: float, epsilon: float):
    """``chi(k^{1/4+eps} x)`` for ``x >= 0``.

    ``chi`` is 1 on ``[0, 1/2]``, 0 on ``[1, inf)`` and in between the
    smoothstep ``psi(1-s)/(psi(1-s)+psi(s))`` with ``psi(t) = exp(-1/t)`` and
    ``s = 2t - 1``.  This profile is C-infinity and monotone.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("cutoff radius must be nonnegative")
    s = np.clip(2.0 * arr * k ** (0.25 + epsilon) - 1.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1 - s, 1.0)), 0.0)
        right = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    out = left / (left + right)
    return float(out) if np.ndim(out) == 0 else out


def eval_local_kernel(c: HalfPowerSeries, N: int, k: float, u, v) -> complex:
    """``k^n e^{u.vbar} sum_{j<=N} c_j(u, vbar) k^{-j/2}``."""
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    n = c.dimension
    if len(u) != n or len(v) != n:
        raise DimensionError(f"points must have {n} coordinates")
    vb = np.conj(v)
    total = 0j
    for j in range(min(N, c.truncation_order) + 1):
        if c[j]:
            total += c[j].evaluate(u, vb) * k ** (-j / 2)
    return k ** n * np.exp(np.dot(u, vb)) * total


# -- reproducing residual -----------------------------------------------------

def _polar_grid(radius: float, nr: int, nt: int, split: float | None = None):
    """Nodes and weights for ``pi^{-1} int_{|v|<radius} f dx dy`` on one coordinate."""
    xs, ws = np.polynomial.legendre.leggauss(nr)
    pieces = [(0.0, radius)] if split is None else [(0.0, split), (split, radius)]
    rs, wr = [], []
    for lo, hi in pieces:
        rs.append(0.5 * (hi - lo) * xs + 0.5 * (hi + lo))
        wr.append(0.5 * (hi - lo) * ws)
    r = np.concatenate(rs)
    w = np.concatenate(wr) * r
    theta = 2 * np.pi * np.arange(nt) / nt
    nodes = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = (np.repeat(w, nt) * (2 * np.pi / nt)) / np.pi
    return nodes, weights


class _Weight:
    """``e^{-k phi(v/sqrt k)} Omega(v/sqrt k)`` evaluated on arrays of ``v``."""

    def __init__(self, jet, k: float):
        self.n = jet.dimension
        self.k = k
        self.phi = _CompiledPoly(jet.phi_terms)
        self.hess = [[_CompiledPoly(d_anti(d_holo(jet.phi_terms, i), j))
                      for j in range(self.n)] for i in range(self.n)]

    def __call__(self, v: Sequence[np.ndarray]):
        z = [x / math.sqrt(self.k) for x in v]
        zb = [np.conj(x) for x in z]
        kphi = self.k * self.phi(z, zb).real
        H = np.empty(np.shape(z[0]) + (self.n, self.n), dtype=complex)
        for i in range(self.n):
            for j in range(self.n):
                H[..., i, j] = self.hess[i][j](z, zb)
        omega = np.linalg.det(H).real
        return np.exp(-kphi) * omega


GAUSS_SPLIT = 6.0
BLOCK = 400_000


def _product_sum(n, radius, nr, nt, integrand, split=None, ball=None):
    """``sum w * integrand(V)`` over a polar product grid, in memory-bounded blocks.

    ``ball`` restricts the polydisc to ``|v| < ball``.
    """
    v1, w1 = _polar_grid(radius, nr, nt, split)
    if n == 1:
        V, w = [v1], w1
        if ball is not None:
            keep = np.abs(v1) < ball
            V, w = [v1[keep]], w1[keep]
        return complex(np.sum(w * integrand(V)))
    step = max(1, BLOCK // len(v1))
    total = 0j
    for start in range(0, len(v1), step):
        a, wa = v1[start:start + step], w1[start:start + step]
        V = [np.repeat(a, len(v1)), np.tile(v1, len(a))]
        w = np.repeat(wa, len(v1)) * np.tile(w1, len(a))
        if ball is not None:
            keep = np.abs(V[0]) ** 2 + np.abs(V[1]) ** 2 < ball ** 2
            V, w = [x[keep] for x in V], w[keep]
        total += np.sum(w * integrand(V))
    return complex(total)


def _radial_split(radius):
    # Gaussian mass sits inside |v| < 6; nodes past that only see the tail
    return min(0.5 * radius, GAUSS_SPLIT)


def _reproducing_integral(jet, c, N, k, l, u, epsilon, nr, nt):
    n = jet.dimension
    r_cut = k ** (0.25 - epsilon)
    weight = _Weight(jet, k)
    terms = [(_CompiledPoly(c[j]), k ** (-j / 2)) for j in range(N + 1) if c[j]]
    u = np.asarray(u, dtype=complex)
    sk = math.sqrt(k)

    def integrand(V):
        radius = np.sqrt(sum(np.abs(x) ** 2 for x in V))
        chi = cutoff_chi(radius / sk, k, epsilon)
        Vb = [np.conj(x) for x in V]
        U = [np.full(V[0].shape, ui) for ui in u]
        f = np.ones(V[0].shape, dtype=complex)
        for i in range(n):
            f = f * (V[i] / sk) ** l[i]
        series = np.zeros(V[0].shape, dtype=complex)
        for poly, scale in terms:
            series += poly(U, Vb) * scale
        kern = np.exp(sum(ui * vb for ui, vb in zip(u, Vb))) * series
        return chi * f * kern * weight(V)

    return _product_sum(n, r_cut, nr, nt, integrand, _radial_split(r_cut))


def _f_norm(jet, k, l, nr, nt):
    """``||f||`` of ``f(z) = z^l`` in the rescaled chart ``|v| < sqrt k``.

    The radius is capped at 12, past which the weight is negligible.
    """
    n = jet.dimension
    radius = min(math.sqrt(k), NORM_RADIUS_CAP)
    weight = _Weight(jet, k)
    sk = math.sqrt(k)

    def integrand(V):
        f2 = np.ones(V[0].shape)
        for i in range(n):
            f2 = f2 * np.abs(V[i] / sk) ** (2 * l[i])
        return f2 * weight(V)

    value = _product_sum(n, radius, nr, nt, integrand, _radial_split(radius), ball=radius)
    return math.sqrt(max(value.real, 0.0))


@dataclass(frozen=True)
class ResidualResult:
    residual: float
    norm: float
    integral: complex
    target: complex


def reproducing_residual_detail(jet, c: HalfPowerSeries, N: int, k: float, l, u,
                                epsilon: float = 0.1, nodes: Tuple[int, int] | None = None,
                                rtol: float = 1e-9) -> ResidualResult:
    n = jet.dimension
    l = tuple(l)
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    if len(l) != n or len(u) != n:
        raise DimensionError(f"l and u must have {n} coordinates")
    if n > 2:
        raise ResourceError("residual quadrature is implemented for n <= 2")
    if not 0 < epsilon < 0.25:
        raise DomainError("epsilon must lie in (0, 1/4)")
    if nodes is None:
        nodes = (64, 96) if n == 1 else (16, 24)
    nr, nt = nodes
    N = min(N, c.truncation_order)
    coarse = _reproducing_integral(jet, c, N, k, l, u, epsilon, nr, nt)
    fine = _reproducing_integral(jet, c, N, k, l, u, epsilon, nr * 3 // 2, nt * 3 // 2)
    target = complex(np.prod((u / math.sqrt(k)) ** np.array(l)))
    norm = _f_norm(jet, k, l, nr * 3 // 2, nt * 3 // 2)
    if norm <= 0:
        raise ResourceError(f"f-norm vanished numerically for l={l}, k={k}")
    # converged if tight in absolute terms or good to 1% of the residual itself
    scale = max(abs(fine), abs(target), 1e-300)
    tol = max(rtol * scale, 0.01 * abs(target - fine)) + 1e-15 * norm
    if abs(fine - coarse) > tol:
        raise ResourceError(
            f"quadrature did not converge for k={k}, l={l}, u={u.tolist()}: "
            f"{coarse} ({nr}x{nt}) vs {fine} ({nr * 3 // 2}x{nt * 3 // 2})")
    return ResidualResult(abs(target - fine) / norm, norm, fine, target)


def reproducing_residual(jet, c: HalfPowerSeries, N: int, k: float, l, u,
                         epsilon: float = 0.1, nodes=None) -> float:
    """``|f(u/sqrt k) - <chi_k f, K_loc(., u)>| / ||f||`` for ``f = z^l``.

    The pairing integrates over the cutoff ball in rescaled coordinates with
    weight ``e^{-k phi(v/sqrt k)} Omega(v/sqrt k)``.  The kernel factor is
    ``e^{u.vbar} sum_j c_j(u, vbar) k^{-j/2}``; by hermitian symmetry of
    the kernel this is the conjugate of ``e^{ubar.v} sum_j c_j(v, ubar)``.
    """
    return reproducing_residual_detail(jet, c, N, k, l, u, epsilon, nodes).residual


# -- slopes and experiments ---------------------------------------------------

def scaling_slope(pairs: Iterable[Tuple[float, float]]) -> float:
    pairs = list(pairs)
    if len(pairs) < 4:
        raise DomainError("a slope fit needs at least 4 (k, residual) pairs")
    ks = np.array([p[0] for p in pairs], dtype=float)
    rs = np.array([p[1] for p in pairs], dtype=float)
    if np.any(rs <= 0) or np.any(ks <= 0):
        raise DomainError("residuals and tensor powers must be positive")
    slope, _ = np.polyfit(np.log(ks), np.log(rs), 1)
    return float(slope)


def slope_threshold(n: int, N: int) -> float:
    return n - (N + 1) / 2 + 0.35


@dataclass
class ScalingRow:
    k: int
    N: int
    l: MultiIndex
    u: Tuple[complex, ...]
    residual: float
    norm: float


@dataclass
class ScalingSummary:
    rows: List[ScalingRow] = field(default_factory=list)
    slope: float = float("nan")
    threshold: float = float("nan")
    floor_limited: bool = False

    @property
    def passed(self) -> bool:
        return self.floor_limited or self.slope <= self.threshold

    def per_k(self) -> List[Tuple[int, float]]:
        best = {}
        for row in self.rows:
            best[row.k] = max(best.get(row.k, 0.0), row.residual)
        return sorted(best.items())


def run_scaling(jet, c: HalfPowerSeries, config: ScalingConfig) -> ScalingSummary:
    """Residual for every ``(k, l, u)``; the slope is fitted to the per-k maximum."""
    n = jet.dimension
    summary = ScalingSummary(threshold=slope_threshold(n, config.order))
    exps = [tuple(l) for l in config.exponents]
    us = [tuple(u) for u in config.u_samples]
    if any(len(l) != n for l in exps) or any(len(u) != n for u in us):
        raise DimensionError(f"exponents and samples must have {n} coordinates")
    for k in config.k_grid:
        for l in exps:
            for u in us:
                res = reproducing_residual_detail(jet, c, config.order, k, l, u,
                                                  config.epsilon)
                summary.rows.append(ScalingRow(k, config.order, l, u, res.residual, res.norm))
    per_k = summary.per_k()
    if max(r for _, r in per_k) < FLOOR:
        summary.floor_limited = True
        summary.slope = 0.0
    else:
        summary.slope = scaling_slope([(k, max(r, FLOOR)) for k, r in per_k])
    return summary


def default_exponents(n: int, max_norm: int = 2) -> Tuple[MultiIndex, ...]:
    return tuple(l for d in range(max_norm + 1) for l in of_norm(n, d))


def write_csv(path, rows: Sequence[ScalingRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([
                row.k, row.N, " ".join(map(str, row.l)),
                " ".join(repr(x.real) for x in row.u),
                " ".join(repr(x.imag) for x in row.u),
                repr(row.residual), repr(row.norm)])


# -- CP^1 kernel comparison ---------------------------------------------------

def sample_disc(radii=(0.0, 0.5, 1.0), angles: int = 8) -> List[complex]:
    """Origin plus rings; the outer ring is the boundary ``|u| = 1``."""
    pts = [0j]
    for r in radii:
        if r > 0:
            pts.extend(r * np.exp(2j * np.pi * np.arange(angles) / angles))
    return [complex(p) for p in pts]


def cp1_kernel_error(c: HalfPowerSeries, N: int, k: int,
                     samples: Sequence[complex] | None = None) -> float:
    """``sup |K_exact - K_loc|`` at ``(u/sqrt k, v/sqrt k)`` over the sample set.

    The affine chart of CP^1 is a Böchner chart at 0 and the frame there
    already has ``|e_L|^2 = e^{-phi}``, so the change-of-frame factor is 1;
    the diagonal check ``K(0,0) = k+1`` pins this down.
    """
    if c.dimension != 1:
        raise DimensionError("the CP^1 comparison needs a one-dimensional series")
    pts = sample_disc() if samples is None else list(samples)
    model = cp1_model(k)
    sk = math.sqrt(k)
    worst = 0.0
    for u in pts:
        for v in pts:
            exact = complex(model.kernel(u / sk, v / sk))
            local = eval_local_kernel(c, N, k, [u], [v])
            worst = max(worst, abs(exact - local))
    return worst


def cp1_error_experiment(c: HalfPowerSeries, N: int,
                         k_grid: Sequence[int] = (64, 128, 256, 512, 1024, 2048, 4096),
                         samples=None) -> List[Tuple[int, float]]:
    return [(k, cp1_kernel_error(c, N, k, samples)) for k in k_grid]
