"""Numba-jitted kernel implementations.

Same call signatures and semantics as _kernels_numpy. The tetrahedral
segment kernel is the numpy reference source compiled with njit so the two
backends cannot drift apart.
"""
import numpy as np
from numba import njit, prange

from . import _kernels_numpy as _ref

BACKEND_NAME = "numba"


@njit(cache=True, parallel=True)
def laplacian_padded(fp, ih2x, ih2y, ih2z):
    nx = fp.shape[0] - 2
    ny = fp.shape[1] - 2
    nz = fp.shape[2] - 2
    out = np.empty((nx, ny, nz))
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz):
                c = fp[i + 1, j + 1, k + 1]
                out[i, j, k] = (
                    (fp[i + 2, j + 1, k + 1] - 2.0 * c + fp[i, j + 1, k + 1]) * ih2x
                    + (fp[i + 1, j + 2, k + 1] - 2.0 * c + fp[i + 1, j, k + 1]) * ih2y
                    + (fp[i + 1, j + 1, k + 2] - 2.0 * c + fp[i + 1, j + 1, k]) * ih2z
                )
    return out


@njit(cache=True, parallel=True)
def gradient_padded(fp, i2hx, i2hy, i2hz):
    nx = fp.shape[0] - 2
    ny = fp.shape[1] - 2
    nz = fp.shape[2] - 2
    gx = np.empty((nx, ny, nz))
    gy = np.empty((nx, ny, nz))
    gz = np.empty((nx, ny, nz))
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz):
                gx[i, j, k] = (fp[i + 2, j + 1, k + 1] - fp[i, j + 1, k + 1]) * i2hx
                gy[i, j, k] = (fp[i + 1, j + 2, k + 1] - fp[i + 1, j, k + 1]) * i2hy
                gz[i, j, k] = (fp[i + 1, j + 1, k + 2] - fp[i + 1, j + 1, k]) * i2hz
    return gx, gy, gz


@njit(cache=True, parallel=True)
def fhn_rates(u, v, lap_u, lap_v, eps, beta, gamma, cu, cv):
    ru = np.empty_like(u)
    rv = np.empty_like(v)
    flat_u = u.ravel()
    flat_v = v.ravel()
    flat_lu = lap_u.ravel()
    flat_lv = lap_v.ravel()
    flat_ru = ru.ravel()
    flat_rv = rv.ravel()
    for i in prange(flat_u.size):
        uu = flat_u[i]
        vv = flat_v[i]
        flat_ru[i] = (uu - uu * uu * uu / 3.0 - vv) / eps + cu * flat_lu[i]
        flat_rv[i] = eps * (uu + beta - gamma * vv) + cv * flat_lv[i]
    return ru, rv


@njit(cache=True, parallel=True)
def euler_apply(u, v, ru, rv, dt):
    u2 = np.empty_like(u)
    v2 = np.empty_like(v)
    fu = u.ravel()
    fv = v.ravel()
    fru = ru.ravel()
    frv = rv.ravel()
    fu2 = u2.ravel()
    fv2 = v2.ravel()
    for i in prange(fu.size):
        fu2[i] = fu[i] + dt * fru[i]
        fv2[i] = fv[i] + dt * frv[i]
    return u2, v2


@njit(cache=True, parallel=True)
def gauss_terms(m1, d1, m2, d2):
    n1 = m1.shape[0]
    n2 = m2.shape[0]
    out = np.empty((n1, n2))
    for i in prange(n1):
        for j in range(n2):
            rx = m1[i, 0] - m2[j, 0]
            ry = m1[i, 1] - m2[j, 1]
            rz = m1[i, 2] - m2[j, 2]
            cx = d1[i, 1] * d2[j, 2] - d1[i, 2] * d2[j, 1]
            cy = d1[i, 2] * d2[j, 0] - d1[i, 0] * d2[j, 2]
            cz = d1[i, 0] * d2[j, 1] - d1[i, 1] * d2[j, 0]
            dd = rx * rx + ry * ry + rz * rz
            out[i, j] = (rx * cx + ry * cy + rz * cz) / (dd * np.sqrt(dd))
    return out


tet_segments = njit(cache=True)(_ref.tet_segments)
