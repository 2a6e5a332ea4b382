import numpy as np
import pytest

from dstlab.lattice import (
    CRITICAL_MU,
    LatticeGeometry,
    OccupiedState,
    WEIGHT_PRESETS,
    chain_root_field,
    closed_chain_field,
    critical_lagrangian_field,
    enforce_trace,
    landscape_scan_2d,
    lattice_action,
    lattice_kernel,
    radial_kernel,
    scalar_kernel,
    trace_condition,
    weight_arrays,
)

GEOM = LatticeGeometry(8, 6)
STATE_A = OccupiedState(omega=-1, k=1)
STATE_B = OccupiedState(omega=-2, k=2)

# frozen references for the 8x6 two-state system at tau1 = tau2 = 0
ORIGIN_ACTION_SPHERE = 366.6250737475249
ORIGIN_ACTION_FLAT = 210.00278013877806


def _gamma_component(mat, gamma, sign):
    # coefficient c in c*gamma, using tr(gamma @ gamma) = 4*sign
    return np.trace(gamma @ mat) / (4.0 * sign)


def test_kernel_limits():
    assert scalar_kernel(np.array([0.0]))[0] == 1.0
    assert radial_kernel(np.array([0.0]))[0] == 0.0
    x = np.linspace(0.3, 20.0, 200)
    np.testing.assert_allclose(
        scalar_kernel(x), np.sin(x) / x, rtol=1e-13, atol=1e-15
    )
    np.testing.assert_allclose(
        radial_kernel(x), 1j * (np.sin(x) / x**2 - np.cos(x) / x), rtol=1e-12
    )
    # channel structure: scalar real, radial purely imaginary
    assert not np.iscomplexobj(scalar_kernel(x))
    assert np.abs(radial_kernel(x).real).max() == 0.0


def test_radial_kernel_series_matches_closed_form_at_switch():
    # the small-x series branch has to meet the closed form where it takes
    # over; the closed form itself carries ~1e-12 cancellation noise there
    for x in (2e-5, 9.9e-5):
        series = radial_kernel(np.array([x]))[0]
        closed = 1j * (np.sin(x) - x * np.cos(x)) / x**2
        assert abs(series - closed) < 1e-11
        assert abs(series.imag - (x / 3 - x**3 / 30)) < 1e-16
        assert series.real == 0.0


def test_geometry_and_dual_lattice():
    np.testing.assert_allclose(GEOM.time_values(), 2 * np.pi * np.arange(8))
    np.testing.assert_allclose(GEOM.radial_values(), 2 * np.pi * np.arange(6))
    assert GEOM.contains_dual(0, 1)
    assert GEOM.contains_dual(-7, 6)
    assert not GEOM.contains_dual(1, 1)
    assert not GEOM.contains_dual(-8, 1)
    assert not GEOM.contains_dual(0, 0)
    assert not GEOM.contains_dual(0, 7)
    assert len(GEOM.dual_points()) == 8 * 6


def test_geometry_rejects_bad_sizes():
    with pytest.raises(ValueError):
        LatticeGeometry(0, 6)
    with pytest.raises(ValueError):
        LatticeGeometry(8, -1)


def test_occupied_state_validation():
    with pytest.raises(ValueError):
        OccupiedState(omega=-0.5, k=1)
    with pytest.raises(ValueError):
        OccupiedState(omega=-1, k=1, phi=0.0)
    v = OccupiedState(-1, 1, phi=1.5, tau=0.8).velocity()
    assert abs(v[0] ** 2 - v[1] ** 2 - 1.5**2) < 1e-12


def test_occupation_outside_dual_lattice_rejected():
    with pytest.raises(ValueError, match=r"\(1, 1\)"):
        lattice_kernel(GEOM, [OccupiedState(1, 1)])
    with pytest.raises(ValueError):
        lattice_action(GEOM, [STATE_A, OccupiedState(0, 7)])


def test_kernel_r0_column_has_no_radial_part():
    from dstlab.lattice import _GAMMA_R, _GAMMA_T

    P = lattice_kernel(GEOM, [OccupiedState(-2, 3, tau=1.3)])
    for j in range(GEOM.n_t):
        cr = _gamma_component(P[j, 0], _GAMMA_R, -1.0)
        assert abs(cr) < 1e-14
        # time and scalar channels survive
        ct = _gamma_component(P[j, 0], _GAMMA_T, 1.0)
        assert abs(ct) > 0.1


def test_kernel_tau_zero_has_no_radial_part_anywhere():
    from dstlab.lattice import _GAMMA_R

    P = lattice_kernel(GEOM, [STATE_A, STATE_B])
    comp = np.einsum("ab,trba->tr", _GAMMA_R, P) / -4.0
    assert np.abs(comp).max() < 1e-14


def test_kernel_phase_rotation_between_columns():
    P = lattice_kernel(GEOM, [OccupiedState(-1, 1, tau=0.4)])
    phase = np.exp(2j * np.pi / GEOM.n_t)
    for j in range(GEOM.n_t - 1):
        np.testing.assert_allclose(P[j + 1], phase * P[j], atol=1e-13)


def test_empty_occupation_action_is_zero():
    act = lattice_action(GEOM, [])
    assert act.total == 0.0
    assert np.all(act.lagrangian == 0.0)


def test_phi_doubling_homogeneity():
    states = [STATE_A, OccupiedState(-2, 2, tau=0.7)]
    doubled = [
        OccupiedState(s.omega, s.k, phi=2 * s.phi, tau=s.tau) for s in states
    ]
    roots = chain_root_field(closed_chain_field(lattice_kernel(GEOM, states)))
    roots2 = chain_root_field(closed_chain_field(lattice_kernel(GEOM, doubled)))
    # eigenvalues of the closed chain scale by 4, the action by 16
    np.testing.assert_allclose(
        np.sort_complex(roots2.reshape(-1, 4)),
        4.0 * np.sort_complex(roots.reshape(-1, 4)),
        rtol=1e-10,
        atol=1e-10,
    )
    s1 = lattice_action(GEOM, states).total
    s2 = lattice_action(GEOM, doubled).total
    np.testing.assert_allclose(s2, 16.0 * s1, rtol=1e-12)


def test_trace_condition_and_enforcement():
    states = [STATE_A, STATE_B]
    assert trace_condition(states) == 2.0
    doubled = [OccupiedState(s.omega, s.k, phi=2.0) for s in states]
    back = enforce_trace(doubled, 2.0)
    assert all(s.phi == 1.0 for s in back)
    # normalization invariant survives the rescale
    rng = np.random.default_rng(7)
    for _ in range(20):
        tau = rng.uniform(-2, 2)
        phi = rng.uniform(0.2, 3.0)
        (scaled,) = enforce_trace([OccupiedState(-3, 4, phi=phi, tau=tau)], 1.0)
        vt, vr = scaled.velocity()
        assert abs(vt**2 - vr**2 - scaled.phi**2) < 1e-12


def test_enforce_trace_rejects_bad_targets():
    with pytest.raises(ValueError):
        enforce_trace([], 1.0)
    with pytest.raises(ValueError):
        enforce_trace([STATE_A], -2.0)


def test_critical_mu_value():
    assert CRITICAL_MU == 0.25


def test_lagrangian_field_nonnegative_and_origin_roots_real():
    roots = chain_root_field(closed_chain_field(lattice_kernel(GEOM, [STATE_A, STATE_B])))
    assert np.abs(roots.imag).max() < 1e-12
    lag = critical_lagrangian_field(roots)
    assert lag.min() >= 0.0


def test_weight_presets_and_validation():
    assert set(WEIGHT_PRESETS) == {"sphere", "flat-time"}
    rho_t, rho_r = weight_arrays(GEOM, "sphere")
    np.testing.assert_allclose(rho_t, [1, 2, 2, 2, 2, 2, 2, 2])
    # exact cell integrals of r^2 dr: half cell at the origin, l^2 + 1/12 inside
    np.testing.assert_allclose(
        rho_r, [1 / 24] + [l * l + 1 / 12 for l in range(1, 6)]
    )
    flat_t, flat_r = weight_arrays(GEOM, "flat-time")
    np.testing.assert_allclose(flat_t, np.ones(8))
    np.testing.assert_allclose(flat_r, rho_r)
    with pytest.raises(ValueError, match="unknown weight preset"):
        weight_arrays(GEOM, "cube")
    with pytest.raises(ValueError):
        weight_arrays(GEOM, (np.ones(5), np.ones(6)))
    with pytest.raises(ValueError):
        weight_arrays(GEOM, (np.ones(8), -np.ones(6)))
    explicit = weight_arrays(GEOM, (np.ones(8), np.ones(6)))
    assert explicit[0].shape == (8,)


def test_antipodal_symmetry():
    rng = np.random.default_rng(23)
    for _ in range(6):
        t1, t2 = rng.uniform(-2.2, 2.2, size=2)
        s_plus = lattice_action(
            GEOM,
            [OccupiedState(-1, 1, tau=t1), OccupiedState(-2, 2, tau=t2)],
        ).total
        s_minus = lattice_action(
            GEOM,
            [OccupiedState(-1, 1, tau=-t1), OccupiedState(-2, 2, tau=-t2)],
        ).total
        assert abs(s_plus - s_minus) <= 1e-10 * max(1.0, abs(s_plus))


def test_origin_is_critical_point():
    h = 1e-5

    def s(t1, t2):
        return lattice_action(
            GEOM, [OccupiedState(-1, 1, tau=t1), OccupiedState(-2, 2, tau=t2)]
        ).total

    g1 = (s(h, 0.0) - s(-h, 0.0)) / (2 * h)
    g2 = (s(0.0, h) - s(0.0, -h)) / (2 * h)
    assert abs(g1) < 1e-6
    assert abs(g2) < 1e-6


def test_origin_action_frozen_values():
    np.testing.assert_allclose(
        lattice_action(GEOM, [STATE_A, STATE_B], weights="sphere").total,
        ORIGIN_ACTION_SPHERE,
        rtol=1e-12,
    )
    np.testing.assert_allclose(
        lattice_action(GEOM, [STATE_A, STATE_B], weights="flat-time").total,
        ORIGIN_ACTION_FLAT,
        rtol=1e-12,
    )


def test_landscape_double_well_contract():
    taus = np.linspace(-2.5, 2.5, 61)
    for preset, origin_ref in [
        ("sphere", ORIGIN_ACTION_SPHERE),
        ("flat-time", ORIGIN_ACTION_FLAT),
    ]:
        scan = landscape_scan_2d(GEOM, STATE_A, STATE_B, taus, weights=preset)
        assert scan.surface.shape == (61, 61)
        np.testing.assert_allclose(scan.value_at(0.0, 0.0), origin_ref, rtol=1e-12)
        # lattice_action and the scan agree at a shared grid point
        direct = lattice_action(
            GEOM,
            [OccupiedState(-1, 1, tau=0.5), OccupiedState(-2, 2, tau=-0.25)],
            weights=preset,
        ).total
        np.testing.assert_allclose(scan.value_at(0.5, -0.25), direct, rtol=1e-12)

        origin_local = any(
            m[0] == 0.0 and m[1] == 0.0 for m in scan.minima
        )
        origin_global = any(
            m[0] == 0.0 and m[1] == 0.0 for m in scan.global_minima
        )
        assert origin_local, f"{preset}: origin lost local minimality"
        assert not origin_global, f"{preset}: origin must not be the global minimum"

        assert len(scan.global_minima) == 2
        (t1a, t2a, va), (t1b, t2b, vb) = scan.global_minima
        # antipodal pair, same-sign components, inside the target boxes
        assert abs(t1a + t1b) < 1e-12 and abs(t2a + t2b) < 1e-12
        assert abs(va - vb) < 1e-9 * max(1.0, abs(va))
        for t1, t2 in [(t1a, t2a), (t1b, t2b)]:
            assert np.sign(t1) == np.sign(t2)
            assert 1.2 <= abs(t1) <= 1.8
            assert 0.7 <= abs(t2) <= 1.3


def test_landscape_surface_matches_pointwise_action():
    # spot-check the vectorized scan against the scalar path off the fast path
    taus = np.array([-1.0, 0.0, 1.5])
    scan = landscape_scan_2d(GEOM, STATE_A, STATE_B, taus)
    for i, t1 in enumerate(taus):
        for j, t2 in enumerate(taus):
            direct = lattice_action(
                GEOM,
                [OccupiedState(-1, 1, tau=t1), OccupiedState(-2, 2, tau=t2)],
            ).total
            np.testing.assert_allclose(scan.surface[i, j], direct, rtol=1e-11)
