"""Static, isotropic lattice systems with a vector-scalar sea ansatz.

Position points (t, r) live on a rectangular lattice with spacing 2*pi in
both the time and radial directions; momentum states (omega, k) live on the
dual lattice with nonpositive integer frequencies (sea states) and positive
integer radial momenta:

    t in 2*pi*{0..N_t-1},  r in 2*pi*{0..N_r-1},
    omega in {-(N_t-1)..0},  k in {1..N_r}.

Each occupied state carries an amplitude phi > 0 and a boost parameter tau;
its momentum-space value is the vector-scalar pair v = phi(cosh tau,
sinh tau), phi, which satisfies the normalization v.v = phi^2 identically.
The position kernel sums, per state,

    [v0 gamma^t K0(x) + vr gamma^r K1(x) + phi K0(x)] * exp(-i omega t / N_t)

with the angular-average kernels K0(x) = sin(x)/x and K1(x) = i(sin(x)/x^2
- cos(x)/x) at x = k r / N_r.  The 1/N scalings make the pairing a genuine
discrete Fourier transform; the literal products omega*t and k*r would be
integer multiples of 2*pi and every phase and kernel would collapse to its
value at zero.

The closed chain A(t,r) = P (Dirac adjoint of P) feeds the critical
Lagrangian at mu = 1/4 (four spin dimensions), and the action weights each
point by configurable time/radius measures.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .continuum.dirac import GAMMA4

_ID4 = np.eye(4, dtype=complex)
_GAMMA_T = GAMMA4[0]
_GAMMA_R = GAMMA4[3]
_G0 = GAMMA4[0]

CRITICAL_MU = 0.25


def scalar_kernel(x):
    """Angular average of a plane wave over the sphere: sin(x)/x, 1 at 0."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def radial_kernel(x):
    """Radial-vector angular kernel i(sin(x)/x^2 - cos(x)/x), 0 at 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    exact = (np.sin(safe) - safe * np.cos(safe)) / safe**2
    series = x / 3.0 - x**3 / 30.0
    return 1j * np.where(small, series, exact)


@dataclass(frozen=True)
class LatticeGeometry:
    n_t: int
    n_r: int

    def __post_init__(self):
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError("lattice sizes must be positive")

    def time_values(self):
        return 2.0 * np.pi * np.arange(self.n_t)

    def radial_values(self):
        return 2.0 * np.pi * np.arange(self.n_r)

    def contains_dual(self, omega, k):
        return -(self.n_t - 1) <= omega <= 0 and 1 <= k <= self.n_r

    def dual_points(self):
        return [
            (omega, k)
            for omega in range(-(self.n_t - 1), 1)
            for k in range(1, self.n_r + 1)
        ]


@dataclass(frozen=True)
class OccupiedState:
    omega: int
    k: int
    phi: float = 1.0
    tau: float = 0.0

    def __post_init__(self):
        if self.omega != int(self.omega) or self.k != int(self.k):
            raise ValueError("dual-lattice coordinates are integers")
        if self.phi <= 0:
            raise ValueError("amplitude phi must be positive")

    def velocity(self):
        """Momentum-space vector (v_time, v_radial); v.v = phi^2 identically."""
        return (self.phi * math.cosh(self.tau), self.phi * math.sinh(self.tau))


def _validate_occupation(geom, states):
    bad = [(s.omega, s.k) for s in states if not geom.contains_dual(s.omega, s.k)]
    if bad:
        raise ValueError(f"occupied points outside the dual lattice: {bad}")


def _state_fields(geom, state):
    """Scalar-channel and radial-channel coefficient fields of one state."""
    j = np.arange(geom.n_t)
    l = np.arange(geom.n_r)
    phase = np.exp(-2j * np.pi * state.omega * j / geom.n_t)
    x = 2.0 * np.pi * state.k * l / geom.n_r
    scalar = state.phi * np.outer(phase, scalar_kernel(x))
    radial = state.phi * np.outer(phase, radial_kernel(x))
    return scalar, radial


def lattice_kernel(geom, states):
    """P(t, r) as an (n_t, n_r, 4, 4) field."""
    _validate_occupation(geom, states)
    field = np.zeros((geom.n_t, geom.n_r, 4, 4), dtype=complex)
    for state in states:
        scalar, radial = _state_fields(geom, state)
        ch, sh = math.cosh(state.tau), math.sinh(state.tau)
        field += (ch * scalar)[..., None, None] * _GAMMA_T
        field += (sh * radial)[..., None, None] * _GAMMA_R
        field += scalar[..., None, None] * _ID4
    return field


def dirac_adjoint_field(field):
    return _G0 @ np.conj(np.swapaxes(field, -1, -2)) @ _G0


def closed_chain_field(p_field):
    """A(t, r) = P(t, r) times its Dirac adjoint, pointwise."""
    return p_field @ dirac_adjoint_field(p_field)


def chain_root_field(a_field):
    roots = np.linalg.eigvals(a_field)
    if not np.all(np.isfinite(roots)):
        bad = np.argwhere(~np.all(np.isfinite(roots), axis=-1))
        raise RuntimeError(f"eigenvalue solver failed at lattice points {bad[:5]}")
    return roots


def critical_lagrangian_field(roots):
    """Pointwise (1/8) sum_{i,j} (|lam_i| - |lam_j|)^2, manifestly >= 0."""
    mods = np.abs(roots)
    diff = mods[..., :, None] - mods[..., None, :]
    return np.sum(diff * diff, axis=(-2, -1)) / 8.0


def _radial_cell_measure(n_r):
    # Exact integrals of the spherical measure r^2 dr over the grid cells
    # (unit radial spacing): the origin owns the half cell [0, 1/2), giving
    # (1/2)^3/3 = 1/24, and cell l >= 1 covers [l-1/2, l+1/2), giving
    # l^2 + 1/12.  A plain midpoint rule (l^2, with an ad-hoc origin weight)
    # leaves the coincidence cell heavy enough to swallow the off-origin
    # wells of the two-state landscape; the exact cell measure does not.
    radii = np.arange(n_r, dtype=float)
    rho_r = radii**2 + 1.0 / 12.0
    rho_r[0] = 1.0 / 24.0
    return rho_r


def _sphere_weights(geom):
    rho_t = np.full(geom.n_t, 2.0)
    rho_t[0] = 1.0
    return rho_t, _radial_cell_measure(geom.n_r)


def _flat_time_weights(geom):
    return np.ones(geom.n_t), _radial_cell_measure(geom.n_r)


WEIGHT_PRESETS = {
    "sphere": _sphere_weights,
    "flat-time": _flat_time_weights,
}


def weight_arrays(geom, weights="sphere"):
    """Resolve a preset name or explicit (rho_t, rho_r) pair to arrays."""
    if isinstance(weights, str):
        try:
            rho_t, rho_r = WEIGHT_PRESETS[weights](geom)
        except KeyError:
            raise ValueError(
                f"unknown weight preset {weights!r}; have {sorted(WEIGHT_PRESETS)}"
            ) from None
    else:
        rho_t, rho_r = (np.asarray(w, dtype=float) for w in weights)
        if rho_t.shape != (geom.n_t,) or rho_r.shape != (geom.n_r,):
            raise ValueError("weight arrays must match the lattice shape")
    if np.any(rho_t <= 0) or np.any(rho_r <= 0):
        raise ValueError("weights must be positive")
    return rho_t, rho_r


@dataclass(frozen=True)
class LatticeAction:
    lagrangian: np.ndarray
    rho_t: np.ndarray
    rho_r: np.ndarray
    total: float


def lattice_action(geom, states, weights="sphere"):
    rho_t, rho_r = weight_arrays(geom, weights)
    if not states:
        lag = np.zeros((geom.n_t, geom.n_r))
        return LatticeAction(lag, rho_t, rho_r, 0.0)
    roots = chain_root_field(closed_chain_field(lattice_kernel(geom, states)))
    lag = critical_lagrangian_field(roots)
    total = float(np.einsum("t,r,tr->", rho_t, rho_r, lag))
    return LatticeAction(lag, rho_t, rho_r, total)


def trace_condition(states):
    """Total particle content: the amplitude sum over occupied states."""
    return float(sum(s.phi for s in states))


def enforce_trace(states, target):
    """Rescale all amplitudes by a common factor to hit the target trace."""
    current = trace_condition(states)
    if current == 0.0:
        raise ValueError("cannot rescale an empty occupation to a nonzero trace")
    factor = float(target) / current
    if factor <= 0.0:
        raise ValueError("target trace must be positive")
    return tuple(replace(s, phi=s.phi * factor) for s in states)


@dataclass(frozen=True)
class LandscapeSurface:
    tau_values: np.ndarray
    surface: np.ndarray  # surface[i, j] = S(tau_values[i], tau_values[j])
    minima: tuple  # (tau1, tau2, value) for every grid-local minimum
    global_minima: tuple

    def value_at(self, tau1, tau2):
        i = int(np.argmin(np.abs(self.tau_values - tau1)))
        j = int(np.argmin(np.abs(self.tau_values - tau2)))
        return float(self.surface[i, j])


def _grid_local_minima(tau_values, surface):
    padded = np.pad(surface, 1, constant_values=np.inf)
    is_min = np.ones_like(surface, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = padded[1 + di : 1 + di + surface.shape[0],
                             1 + dj : 1 + dj + surface.shape[1]]
            is_min &= surface <= shifted
    out = [
        (float(tau_values[i]), float(tau_values[j]), float(surface[i, j]))
        for i, j in np.argwhere(is_min)
    ]
    out.sort(key=lambda rec: rec[2])
    return tuple(out)


def landscape_scan_2d(geom, state_a, state_b, tau_values, weights="sphere"):
    """Action surface over a (tau1, tau2) grid for two occupied states.

    The boost parameters of the two supplied states are scan variables;
    their amplitudes (hence the trace) stay fixed.
    """
    _validate_occupation(geom, (state_a, state_b))
    rho_t, rho_r = weight_arrays(geom, weights)
    tau_values = np.asarray(tau_values, dtype=float)
    scalar_a, radial_a = _state_fields(geom, state_a)
    scalar_b, radial_b = _state_fields(geom, state_b)
    scalar_sum = scalar_a + scalar_b

    ch = np.cosh(tau_values)
    sh = np.sinh(tau_values)
    surface = np.empty((tau_values.size, tau_values.size))
    for i in range(tau_values.size):
        # row of fields over all tau2 at fixed tau1 = tau_values[i]
        coeff_t = ch[i] * scalar_a[None] + ch[:, None, None] * scalar_b[None]
        coeff_r = sh[i] * radial_a[None] + sh[:, None, None] * radial_b[None]
        p_row = (
            coeff_t[..., None, None] * _GAMMA_T
            + coeff_r[..., None, None] * _GAMMA_R
            + scalar_sum[None, ..., None, None] * _ID4
        )
        lag = critical_lagrangian_field(chain_root_field(closed_chain_field(p_row)))
        surface[i] = np.einsum("t,r,gtr->g", rho_t, rho_r, lag)
    minima = _grid_local_minima(tau_values, surface)
    floor = minima[0][2] if minima else float(np.min(surface))
    global_minima = tuple(
        rec for rec in minima if rec[2] <= floor + 1e-10 * (1.0 + abs(floor))
    )
    return LandscapeSurface(
        tau_values=tau_values,
        surface=surface,
        minima=minima,
        global_minima=global_minima,
    )
