import csv
import math

import numpy as np
import pytest

from bergman.errors import DomainError, ResourceError
from bergman.expansion import a_series
from bergman.numeric import (ScalingConfig, cp1_kernel_error, cutoff_chi,
                             eval_local_kernel, reproducing_residual,
                             reproducing_residual_detail, run_scaling,
                             scaling_slope, write_csv)
from bergman.oracle import cp1_exact_kernel
from bergman.polyring import BidegreePolynomial as P, HalfPowerSeries as S
from bergman.potential import flat_jet, fubini_study_jet, product_jet
from bergman.solver import solve_coefficients


def test_cutoff_examples():
    k, eps = 256, 0.1
    edge = k ** (-0.25 - eps)
    assert cutoff_chi(0.0, k, eps) == 1.0
    assert cutoff_chi(0.5 * edge, k, eps) == 1.0
    assert cutoff_chi(edge, k, eps) == 0.0
    assert cutoff_chi(3 * edge, k, eps) == 0.0
    mid = cutoff_chi(0.75 * edge, k, eps)
    assert 0 < mid < 1 and mid == pytest.approx(0.5)
    xs = np.linspace(0, 1.2 * edge, 400)
    vals = cutoff_chi(xs, k, eps)
    assert np.all(np.diff(vals) <= 0)
    with pytest.raises(DomainError):
        cutoff_chi(-1.0, k, eps)


def test_local_kernel_flat():
    c = S.unit(2, 4)
    u, v = [0.3, -0.2j], [0.5 + 0.1j, 0.4]
    expected = 100 ** 2 * np.exp(np.dot(u, np.conj(v)))
    assert eval_local_kernel(c, 4, 100, u, v) == pytest.approx(expected, rel=1e-14)


def test_local_kernel_origin(cp1_series):
    _, _, c = cp1_series
    assert eval_local_kernel(c, 2, 50, [0], [0]) == pytest.approx(50 * (1 + 1 / 50))


def test_local_kernel_vs_cp1(cp1_series):
    _, _, c = cp1_series
    k = 100
    u = v = 0.5
    exact = cp1_exact_kernel(k, u / math.sqrt(k), v / math.sqrt(k))
    local = eval_local_kernel(c, 2, k, [u], [v])
    assert abs(exact - local) / abs(exact) <= 2.0 * k ** -1.5


def test_expansion_consistency(cp1_series):
    _, _, c = cp1_series
    for k in (64, 256, 1024):
        diff = max(abs(eval_local_kernel(c, 2, k, [u], [v]) - eval_local_kernel(c, 4, k, [u], [v]))
                   for u in (0, 1, 1j) for v in (0, -1, 0.7j))
        assert diff <= 3.0 * k ** (1 - 1.5)


def test_slope_examples():
    ks = [64, 128, 256, 512, 1024]
    assert scaling_slope([(k, k ** -1.5) for k in ks]) == pytest.approx(-1.5, abs=1e-12)
    assert scaling_slope([(k, 0.3) for k in ks]) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        scaling_slope([(k, 1.0) for k in ks[:3]])
    with pytest.raises(DomainError):
        scaling_slope([(k, 0.0) for k in ks])


def test_config_validation():
    with pytest.raises(DomainError):
        ScalingConfig(epsilon=0.3)
    with pytest.raises(DomainError):
        ScalingConfig(k_grid=(64, 32, 128, 256))
    with pytest.raises(DomainError):
        ScalingConfig(k_grid=(2, 8, 16, 32))
    with pytest.raises(DomainError):
        ScalingConfig(u_samples=((1.5 + 0j,),))
    with pytest.raises(DomainError):
        ScalingConfig.geometric(64, 4096, 1)
    assert ScalingConfig.geometric(64, 4096, 7).k_grid == (64, 128, 256, 512, 1024, 2048, 4096)


def test_flat_residual_at_large_k():
    # the cutoff ball has radius k^{0.15}; the Gaussian tail outside its flat
    # part is below 1e-9 only once k is of order 1e8
    jet = flat_jet(1, 4)
    c = S.unit(1, 2)
    for l in [(0,), (1,), (3,)]:
        for u in (0, 0.5, 1j):
            assert reproducing_residual(jet, c, 2, 1e8, l, [u]) <= 1e-9


def test_flat_residual_two_dimensions():
    jet = flat_jet(2, 4)
    c = S.unit(2, 2)
    r = reproducing_residual(jet, c, 2, 1e8, (1, 0), [0.3, 0.2j])
    assert r <= 1e-9


def test_cp1_residual_decreasing(cp1_series):
    jet = fubini_study_jet(4)
    c = solve_coefficients(a_series(jet, 2), 2)
    res = [reproducing_residual(jet, c, 2, k, (0,), [0]) for k in (64, 128, 256, 512, 1024, 2048, 4096)]
    assert all(b < a for a, b in zip(res, res[1:]))


def test_wrong_c2_is_detected_at_large_k():
    jet = fubini_study_jet(4)
    c = solve_coefficients(a_series(jet, 2), 2)
    bad = c.replace(2, c[2] + P.constant(1, 1))
    k = 1e8
    good = reproducing_residual(jet, c, 2, k, (0,), [0])
    wrong = reproducing_residual(jet, bad, 2, k, (0,), [0])
    assert wrong > 1e3 * good


def test_quadrature_failure_is_resource_error():
    jet = fubini_study_jet(4)
    c = solve_coefficients(a_series(jet, 2), 2)
    with pytest.raises(ResourceError):
        reproducing_residual(jet, c, 2, 4096, (2,), [1.0], nodes=(3, 4))


def test_run_scaling_and_csv(tmp_path):
    jet = fubini_study_jet(4)
    c = solve_coefficients(a_series(jet, 2), 2)
    config = ScalingConfig(k_grid=(64, 256, 1024, 4096), order=2,
                           exponents=((0,), (2,)), u_samples=((0j,), (1 + 0j,)))
    summary = run_scaling(jet, c, config)
    assert len(summary.rows) == 4 * 2 * 2
    assert summary.threshold == pytest.approx(-0.15)
    assert summary.slope < 0
    out = tmp_path / "s.csv"
    write_csv(out, summary.rows)
    rows = list(csv.reader(open(out)))
    assert tuple(rows[0]) == ("k", "N", "l", "u_re", "u_im", "residual", "norm")
    assert len(rows) == 17


def test_cp1_kernel_error_frame(cp1_series):
    _, _, c = cp1_series
    # diagonal at the origin: K(0,0) = k+1 = k(1 + c_2(0,0)/k)
    assert cp1_kernel_error(c, 2, 64, samples=[0j]) <= 1e-9
