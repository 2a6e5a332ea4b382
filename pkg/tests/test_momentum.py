import numpy as np
import pytest

from dstlab.continuum.momentum import (
    MassCone,
    Unbounded,
    convolution_support,
    fourier_support_check,
    mass_cone_classify,
)


def _interval_sq(q, p):
    d = np.asarray(q, dtype=float) - p
    return d[0] ** 2 - d[1] ** 2


def test_classify_examples():
    assert mass_cone_classify([-1.0, 0.0, 0.0, 0.0]) is MassCone.LOWER
    assert mass_cone_classify([0.0, 1.0, 0.0, 0.0]) is MassCone.OUTSIDE
    assert mass_cone_classify([-2.0, 1.0, 0.0, 0.0]) is MassCone.LOWER
    assert mass_cone_classify([3.0, 1.0]) is MassCone.UPPER
    assert mass_cone_classify([1.0, 1.0]) is MassCone.BOUNDARY
    assert mass_cone_classify([1e-12, 0.0]) is MassCone.BOUNDARY


def test_classify_scale_aware_tolerance():
    # 1e6-scale vector just off the cone is still boundary at default tol
    assert mass_cone_classify([1e6 + 1e-5, 1e6]) is MassCone.BOUNDARY
    assert mass_cone_classify([1e6 + 1.0, 1e6]) is MassCone.UPPER


def test_central_momentum_symmetric_window():
    (shell,) = convolution_support((-3.0, 0.0), [1.0])
    assert shell.rapidity_min == pytest.approx(-shell.rapidity_max)
    assert shell.rapidity_max == pytest.approx(np.arccosh(5.0 / 3.0))
    for p in shell.endpoint_vectors():
        assert abs(_interval_sq((-3.0, 0.0), p)) < 1e-9
        assert p[0] < 0


def test_window_endpoints_are_null_separations():
    rng = np.random.default_rng(5)
    for _ in range(60):
        big_q = rng.uniform(0.5, 6.0)
        u = rng.uniform(-2.0, 2.0)
        q = (-big_q * np.cosh(u), big_q * np.sinh(u))
        shells = convolution_support(q, [1.0, 5.0, 20.0])
        for shell in shells:
            scale = 1.0 + big_q**2 + shell.mass**2
            for p in shell.endpoint_vectors():
                assert abs(_interval_sq(q, p)) < 1e-9 * scale
            mid = 0.5 * (shell.rapidity_min + shell.rapidity_max)
            p_mid = np.array(
                [-shell.mass * np.cosh(mid), shell.mass * np.sinh(mid)]
            )
            assert _interval_sq(q, p_mid) > -1e-12 * scale
            beyond = shell.rapidity_max + 0.1
            p_out = np.array(
                [-shell.mass * np.cosh(beyond), shell.mass * np.sinh(beyond)]
            )
            assert _interval_sq(q, p_out) < 0


def test_window_shrinks_at_shell_vertex():
    widths = []
    for big_q in (1.5, 1.2, 1.05, 1.0):
        (shell,) = convolution_support((-big_q, 0.0), [1.0])
        widths.append(shell.width)
    assert all(a > b for a, b in zip(widths, widths[1:]))
    assert widths[-1] == 0.0


def test_unbounded_outside_lower_cone():
    for q in [(0.0, 1.0), (2.0, 0.0), (-1.0, 1.0), (0.0, 0.0)]:
        with pytest.raises(Unbounded):
            convolution_support(q, [1.0])


def test_momentum_bounds_match_rapidity():
    (shell,) = convolution_support((-4.0, 1.0), [2.0])
    lo, hi = shell.momentum_bounds()
    assert lo == pytest.approx(2.0 * np.sinh(shell.rapidity_min))
    assert hi == pytest.approx(2.0 * np.sinh(shell.rapidity_max))
    assert lo < hi


def test_leakage_zero_profile():
    report = fourier_support_check(lambda z: np.zeros_like(z), grid_n=64)
    assert report["leakage"] == 0.0
    assert report["total_energy"] == 0.0


def test_leakage_bump_within_threshold():
    report = fourier_support_check(grid_n=256)
    assert report["leakage"] <= 1e-2
    assert not report["edge_warning"]
    assert 0.0 < report["leakage"] < report["raw_outside_fraction"]


def test_leakage_decreases_under_refinement():
    coarse = fourier_support_check(grid_n=256)
    fine = fourier_support_check(grid_n=512)
    assert fine["leakage"] < coarse["leakage"]


def test_edge_warning_for_slow_profile():
    report = fourier_support_check(lambda z: 1.0 / (1.0 + z), grid_n=64)
    assert report["edge_warning"]
