"""Phase representation and topological diagnostics.

The medium state (u, v) is normalized into components (U, V) of an
auxiliary complex order parameter. Filament structure lives where the
modulus p = sqrt(U^2 + V^2) vanishes; the vorticity Omega, its Coulomb
vector potential, and the helicity integral quantify how the filaments
wind about each other. Denominators are regularized by p_reg and nodes
with p < p_reg are reported in a singular mask rather than trusted.
"""
import math
from dataclasses import dataclass

import numpy as np

from .grid import ScalarField, VectorField3, gradient, volume_integral, \
    surface_integral, face_node_slice, FACE_NAMES, FACE_AXIS_SIDE

TWO_PI = 2.0 * math.pi
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class NormalizationRanges:
    """Fixed (u, v) ranges mapping the medium into the unit phase disc."""

    u_min: float
    u_max: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise ValueError("ranges must have positive width")

    @classmethod
    def from_state(cls, state, expand=0.10):
        """Ranges spanning the state's values, widened by `expand` of the
        width in total (half per side) so later states clamp rarely.

        A uniform field has zero width; it gets a unit width instead so the
        normalization stays defined (the constant maps to one phase point).
        """
        lo_u = float(state.u.values.min())
        hi_u = float(state.u.values.max())
        lo_v = float(state.v.values.min())
        hi_v = float(state.v.values.max())
        pad_u = 0.5 * expand * (hi_u - lo_u) if hi_u > lo_u else 0.5
        pad_v = 0.5 * expand * (hi_v - lo_v) if hi_v > lo_v else 0.5
        return cls(lo_u - pad_u, hi_u + pad_u, lo_v - pad_v, hi_v + pad_v)


@dataclass
class PhaseField:
    """Normalized components with modulus, regularization and clamp info."""

    U: ScalarField
    V: ScalarField
    p: np.ndarray
    p_reg: float
    singular_mask: np.ndarray
    clamp_count: int
    clamped_u: np.ndarray
    clamped_v: np.ndarray
    ranges: NormalizationRanges

    @property
    def grid(self):
        return self.U.grid


def default_p_reg(grid):
    # proportional to the squared spacing, floored away from zero
    return max(1e-6, grid.h_max ** 2)


def normalize_uv(state, ranges, p_reg=None):
    """Map (u, v) affinely into [-1/sqrt2, 1/sqrt2]^2, clamping outliers.

    Values outside the ranges are clamped to the nearest bound and counted;
    clamped nodes later carry zero time derivative, consistent with a
    saturated normalization.
    """
    grid = state.grid
    wu = ranges.u_max - ranges.u_min
    wv = ranges.v_max - ranges.v_min
    u = state.u.values
    v = state.v.values
    cu = (u < ranges.u_min) | (u > ranges.u_max)
    cv = (v < ranges.v_min) | (v > ranges.v_max)
    uc = np.clip(u, ranges.u_min, ranges.u_max)
    vc = np.clip(v, ranges.v_min, ranges.v_max)
    U = (2.0 * (uc - ranges.u_min) / wu - 1.0) / SQRT2
    V = (2.0 * (vc - ranges.v_min) / wv - 1.0) / SQRT2
    p = np.sqrt(U * U + V * V)
    if p_reg is None:
        p_reg = default_p_reg(grid)
    mask = p < p_reg
    return PhaseField(
        ScalarField(grid, U), ScalarField(grid, V), p, float(p_reg), mask,
        int(cu.sum() + cv.sum()), cu, cv, ranges,
    )


def phi_field(pf):
    """Stereographic field phi with |phi|^2 = (1-p)/p, and its invalid mask.

    phi keeps the phase of U + iV; nodes inside the singular mask are set
    to zero and flagged.
    """
    p = pf.p
    php = np.maximum(p, pf.p_reg)
    mag = np.sqrt(np.maximum(1.0 - p, 0.0) / php)
    q = np.arctan2(pf.V.values, pf.U.values)
    phi = mag * np.exp(1j * q)
    phi[pf.singular_mask] = 0.0
    return phi, pf.singular_mask.copy()


def _reg_p(pf):
    return np.maximum(pf.p, pf.p_reg)


def _reg_p2(pf):
    return np.maximum(pf.p * pf.p, pf.p_reg * pf.p_reg)


def omega_field(pf):
    """Vorticity Omega = grad U x grad V / (2 pi p), regularized.

    Gradients are taken with natural one-sided stencils at non-periodic
    walls; no boundary condition is assumed for diagnostics.
    """
    grid = pf.grid
    gU = gradient(pf.U)
    gV = gradient(pf.V)
    ux, uy, uz = gU.arrays()
    vx, vy, vz = gV.arrays()
    den = TWO_PI * _reg_p(pf)
    ox = (uy * vz - uz * vy) / den
    oy = (uz * vx - ux * vz) / den
    oz = (ux * vy - uy * vx) / den
    return VectorField3.from_arrays(grid, ox, oy, oz)


def analytic_potential(pf):
    """Closed-form vector potential (p - 1) grad q / (2 pi).

    grad q is assembled from the normalized components as
    (U grad V - V grad U) / p^2 with the regularized denominator.
    """
    grid = pf.grid
    gU = gradient(pf.U)
    gV = gradient(pf.V)
    ux, uy, uz = gU.arrays()
    vx, vy, vz = gV.arrays()
    U = pf.U.values
    V = pf.V.values
    den2 = _reg_p2(pf)
    fac = (pf.p - 1.0) / (TWO_PI * den2)
    ax = fac * (U * vx - V * ux)
    ay = fac * (U * vy - V * uy)
    az = fac * (U * vz - V * uz)
    return VectorField3.from_arrays(grid, ax, ay, az)


def dpsi_dt(pf, du_dt, dv_dt):
    """Time derivative of the potential up to a gauge gradient.

    Built from the rates of p and q only:
    (dp/dt grad q - dq/dt grad p) / (2 pi). Rates at clamped nodes are
    zero, matching the saturated normalization.
    """
    grid = pf.grid
    r = pf.ranges
    Ur = du_dt.values * (SQRT2 / (r.u_max - r.u_min))
    Vr = dv_dt.values * (SQRT2 / (r.v_max - r.v_min))
    Ur = np.where(pf.clamped_u, 0.0, Ur)
    Vr = np.where(pf.clamped_v, 0.0, Vr)
    U = pf.U.values
    V = pf.V.values
    gU = gradient(pf.U)
    gV = gradient(pf.V)
    ux, uy, uz = gU.arrays()
    vx, vy, vz = gV.arrays()
    php = _reg_p(pf)
    php2 = _reg_p2(pf)
    dp = (U * Ur + V * Vr) / php
    dq = (U * Vr - V * Ur) / php2
    gpx = (U * ux + V * vx) / php
    gpy = (U * uy + V * vy) / php
    gpz = (U * uz + V * vz) / php
    gqx = (U * vx - V * ux) / php2
    gqy = (U * vy - V * uy) / php2
    gqz = (U * vz - V * uz) / php2
    wx = (dp * gqx - dq * gpx) / TWO_PI
    wy = (dp * gqy - dq * gpy) / TWO_PI
    wz = (dp * gqz - dq * gpz) / TWO_PI
    return VectorField3.from_arrays(grid, wx, wy, wz)


def _fft_shape(grid):
    # zero-pad non-periodic axes to twice the node count so the aperiodic
    # source does not see its images
    return tuple(
        grid.n if grid.periodic[ax] else 2 * grid.n for ax in range(3)
    )


def _wavenumbers(grid, shape):
    ks = []
    for ax in range(3):
        if ax == 2:
            k = 2.0 * math.pi * np.fft.rfftfreq(shape[ax], d=grid.h[ax])
        else:
            k = 2.0 * math.pi * np.fft.fftfreq(shape[ax], d=grid.h[ax])
        sl = [None, None, None]
        sl[ax] = slice(None)
        ks.append(k[tuple(sl)])
    return ks


def vector_potential_coulomb(omega):
    """Coulomb-gauge vector potential of the vorticity via FFT inversion.

    psi_hat = i k x omega_hat / k^2 with the k = 0 mode zeroed. Periodic
    axes transform directly; non-periodic axes are zero-padded to twice
    their length and the result is cropped back.
    """
    grid = omega.grid
    n = grid.n
    shape = _fft_shape(grid)
    kx, ky, kz = _wavenumbers(grid, shape)
    k2 = kx * kx + ky * ky + kz * kz
    with np.errstate(divide="ignore"):
        inv = np.where(k2 > 0.0, 1.0 / np.where(k2 > 0.0, k2, 1.0), 0.0)
    ohx = np.fft.rfftn(omega.x.values, s=shape, axes=(0, 1, 2))
    ohy = np.fft.rfftn(omega.y.values, s=shape, axes=(0, 1, 2))
    ohz = np.fft.rfftn(omega.z.values, s=shape, axes=(0, 1, 2))
    px = np.fft.irfftn(1j * (ky * ohz - kz * ohy) * inv, s=shape, axes=(0, 1, 2))[:n, :n, :n]
    py = np.fft.irfftn(1j * (kz * ohx - kx * ohz) * inv, s=shape, axes=(0, 1, 2))[:n, :n, :n]
    pz = np.fft.irfftn(1j * (kx * ohy - ky * ohx) * inv, s=shape, axes=(0, 1, 2))[:n, :n, :n]
    return VectorField3.from_arrays(grid, px.copy(), py.copy(), pz.copy())


def solenoidal_project(w):
    """Spectral projection onto divergence-free fields (fully periodic only)."""
    grid = w.grid
    if not all(grid.periodic):
        raise ValueError("solenoidal projection needs a fully periodic grid")
    shape = grid.shape
    kx, ky, kz = _wavenumbers(grid, shape)
    k2 = kx * kx + ky * ky + kz * kz
    inv = np.where(k2 > 0.0, 1.0 / np.where(k2 > 0.0, k2, 1.0), 0.0)
    ohx = np.fft.rfftn(w.x.values, s=shape, axes=(0, 1, 2))
    ohy = np.fft.rfftn(w.y.values, s=shape, axes=(0, 1, 2))
    ohz = np.fft.rfftn(w.z.values, s=shape, axes=(0, 1, 2))
    kd = (kx * ohx + ky * ohy + kz * ohz) * inv
    px = np.fft.irfftn(ohx - kx * kd, s=shape, axes=(0, 1, 2))
    py = np.fft.irfftn(ohy - ky * kd, s=shape, axes=(0, 1, 2))
    pz = np.fft.irfftn(ohz - kz * kd, s=shape, axes=(0, 1, 2))
    return VectorField3.from_arrays(grid, px, py, pz)


def spectral_gradient(f):
    """Exact gradient of the trigonometric interpolant (fully periodic only)."""
    grid = f.grid
    if not all(grid.periodic):
        raise ValueError("spectral gradient needs a fully periodic grid")
    shape = grid.shape
    kx, ky, kz = _wavenumbers(grid, shape)
    fh = np.fft.rfftn(f.values, s=shape, axes=(0, 1, 2))
    gx = np.fft.irfftn(1j * kx * fh, s=shape, axes=(0, 1, 2))
    gy = np.fft.irfftn(1j * ky * fh, s=shape, axes=(0, 1, 2))
    gz = np.fft.irfftn(1j * kz * fh, s=shape, axes=(0, 1, 2))
    return VectorField3.from_arrays(grid, gx, gy, gz)


def spectral_divergence(w):
    """Divergence of the trigonometric interpolant (fully periodic only)."""
    grid = w.grid
    if not all(grid.periodic):
        raise ValueError("spectral divergence needs a fully periodic grid")
    shape = grid.shape
    kx, ky, kz = _wavenumbers(grid, shape)
    div = np.fft.irfftn(
        1j * (
            kx * np.fft.rfftn(w.x.values, s=shape, axes=(0, 1, 2))
            + ky * np.fft.rfftn(w.y.values, s=shape, axes=(0, 1, 2))
            + kz * np.fft.rfftn(w.z.values, s=shape, axes=(0, 1, 2))
        ),
        s=shape,
        axes=(0, 1, 2),
    )
    return ScalarField(grid, div)


def helicity(psi, omega):
    """Volume integral of psi . omega (exactly rounded reduction)."""
    dot = (
        psi.x.values * omega.x.values
        + psi.y.values * omega.y.values
        + psi.z.values * omega.z.values
    )
    return volume_integral(ScalarField(psi.grid, dot))


_AXIS_CROSS = {
    0: lambda wx, wy, wz: (np.zeros_like(wx), -wz, wy),
    1: lambda wx, wy, wz: (wz, np.zeros_like(wx), -wx),
    2: lambda wx, wy, wz: (-wy, wx, np.zeros_like(wx)),
}


def helicity_flux(psi_a, dpsi, bc):
    """Per-face boundary flux psi_a . (n_hat x dpsi) integrated over faces.

    Returns the six face values ordered x-, x+, y-, y+, z-, z+. Dirichlet
    faces carry identically zero integrand (pinned rates). A periodic axis
    has no boundary: the two face entries would be the same node plane with
    opposite normals (exactly cancelling), so each is reported as 0.
    """
    grid = psi_a.grid
    bc.validate(grid)
    ax_, ay_, az_ = psi_a.arrays()
    wx_, wy_, wz_ = dpsi.arrays()
    out = []
    for i, face in enumerate(FACE_NAMES):
        ax, side = FACE_AXIS_SIDE[face]
        if bc.faces[i].kind == "periodic":
            out.append(0.0)
            continue
        sl = face_node_slice(grid, face)
        cx, cy, cz = _AXIS_CROSS[ax](wx_[sl], wy_[sl], wz_[sl])
        g = ax_[sl] * cx + ay_[sl] * cy + az_[sl] * cz
        sign = -1.0 if side == 0 else 1.0
        out.append(surface_integral(grid, {face: sign * g}))
    return tuple(out)


@dataclass
class HelicityRecord:
    """One diagnostics row: helicity, boundary flux and clamp count."""

    t: float
    H: float
    flux_total: float
    flux_faces: tuple
    clamp_count: int


def helicity_record(state, params, bc, ranges, p_reg=None):
    """Full helicity diagnostics of one state under fixed ranges.

    On fully periodic grids the reported helicity dots the potential with
    the solenoidal part of the vorticity, which pins the value to the
    gauge-invariant one; elsewhere the plain vorticity is used.
    """
    from .dynamics import fhn_rhs

    pf = normalize_uv(state, ranges, p_reg)
    om = omega_field(pf)
    psi = vector_potential_coulomb(om)
    om_rep = solenoidal_project(om) if all(state.grid.periodic) else om
    H = helicity(psi, om_rep)
    ru, rv = fhn_rhs(state, params, bc)
    psia = analytic_potential(pf)
    dps = dpsi_dt(pf, ru, rv)
    faces = helicity_flux(psia, dps, bc)
    return HelicityRecord(state.t, H, math.fsum(faces), faces, pf.clamp_count)
