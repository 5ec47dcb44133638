"""Pure-numpy kernel implementations.

Semantics reference for the numba backend. Stencils operate on ghost-padded
arrays; boundary corrections are applied by the callers in grid.py.
"""
import numpy as np

BACKEND_NAME = "numpy"


def laplacian_padded(fp, ih2x, ih2y, ih2z):
    """7-point laplacian of the interior of a ghost-padded array."""
    c = fp[1:-1, 1:-1, 1:-1]
    out = (fp[2:, 1:-1, 1:-1] - 2.0 * c + fp[:-2, 1:-1, 1:-1]) * ih2x
    out += (fp[1:-1, 2:, 1:-1] - 2.0 * c + fp[1:-1, :-2, 1:-1]) * ih2y
    out += (fp[1:-1, 1:-1, 2:] - 2.0 * c + fp[1:-1, 1:-1, :-2]) * ih2z
    return out


def gradient_padded(fp, i2hx, i2hy, i2hz):
    """Centered gradient of the interior of a ghost-padded array."""
    gx = (fp[2:, 1:-1, 1:-1] - fp[:-2, 1:-1, 1:-1]) * i2hx
    gy = (fp[1:-1, 2:, 1:-1] - fp[1:-1, :-2, 1:-1]) * i2hy
    gz = (fp[1:-1, 1:-1, 2:] - fp[1:-1, 1:-1, :-2]) * i2hz
    return gx, gy, gz


def fhn_rates(u, v, lap_u, lap_v, eps, beta, gamma, cu, cv):
    """Reaction rates plus cu*lap_u / cv*lap_v diffusion terms."""
    ru = (u - u * u * u / 3.0 - v) / eps + cu * lap_u
    rv = eps * (u + beta - gamma * v) + cv * lap_v
    return ru, rv


def euler_apply(u, v, ru, rv, dt):
    u2 = u + dt * ru
    v2 = v + dt * rv
    return u2, v2


def gauss_terms(m1, d1, m2, d2):
    """Biot-Savart-style pair terms (r12 . d1 x d2) / |r12|^3, as a matrix."""
    r = m1[:, None, :] - m2[None, :, :]
    cr = np.cross(d1[:, None, :], d2[None, :, :])
    num = np.einsum("ijk,ijk->ij", r, cr)
    d2r = np.einsum("ijk,ijk->ij", r, r)
    return num / (d2r * np.sqrt(d2r))


# Freudenthal subdivision of the unit cube: six tetrahedra sharing the main
# diagonal, one per permutation of the axes. Faces shared between cells get
# the same diagonal, which makes chaining across cells exact.
TET_OFFS = np.array(
    [
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1]],
        [[0, 0, 0], [1, 0, 0], [1, 0, 1], [1, 1, 1]],
        [[0, 0, 0], [0, 1, 0], [1, 1, 0], [1, 1, 1]],
        [[0, 0, 0], [0, 1, 0], [0, 1, 1], [1, 1, 1]],
        [[0, 0, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1]],
        [[0, 0, 0], [0, 0, 1], [0, 1, 1], [1, 1, 1]],
    ],
    dtype=np.int64,
)

# axis stepped at each leg of the vertex chain p0 -> p1 -> p2 -> p3
TET_PERMS = np.array(
    [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ],
    dtype=np.int64,
)


def tet_segments(S, T, cand, n, hx, hy, hz, ox, oy, oz, px, py, pz, pts, keys):
    """Per-tetrahedron intersection segments of the S=0 and T=0 surfaces.

    S and T are level-shifted fields with exact zeros already nudged away.
    cand holds candidate cell indices (k, 3). Segment endpoints land on
    tetrahedron faces; each endpoint is tagged with the sorted global node
    ids of that face so segments can be chained without any tolerance.
    Each segment is oriented along grad S x grad T of its tetrahedron, the
    intrinsic direction of the intersection curve. Writes into
    preallocated pts (m, 6) and keys (m, 6); returns
    (segment_count, defect_count).
    """
    nseg = 0
    defects = 0
    gid = np.empty(4, np.int64)
    sv = np.empty(4)
    tv = np.empty(4)
    vx = np.empty(4)
    vy = np.empty(4)
    vz = np.empty(4)
    pos = np.empty(4, np.int64)
    neg = np.empty(4, np.int64)
    pa = np.empty(4, np.int64)
    pb = np.empty(4, np.int64)
    pex = np.empty(4, np.int64)
    epx = np.empty(4)
    epy = np.empty(4)
    epz = np.empty(4)
    ew = np.empty(4)
    elo = np.empty(4, np.int64)
    ehi = np.empty(4, np.int64)
    cc = np.empty(2, np.int64)
    fk = np.empty(3, np.int64)
    h3 = np.empty(3)
    h3[0] = hx
    h3[1] = hy
    h3[2] = hz
    gS = np.empty(3)
    gT = np.empty(3)

    for c in range(cand.shape[0]):
        ci = cand[c, 0]
        cj = cand[c, 1]
        ck = cand[c, 2]
        for m in range(6):
            for a in range(4):
                gi = ci + TET_OFFS[m, a, 0]
                gj = cj + TET_OFFS[m, a, 1]
                gk = ck + TET_OFFS[m, a, 2]
                wi = gi % n if px else gi
                wj = gj % n if py else gj
                wk = gk % n if pz else gk
                gid[a] = (wi * n + wj) * n + wk
                sv[a] = S[wi, wj, wk]
                tv[a] = T[wi, wj, wk]
                # coordinates stay unwrapped so seam cells emit local geometry
                vx[a] = ox + gi * hx
                vy[a] = oy + gj * hy
                vz[a] = oz + gk * hz
            npos = 0
            nneg = 0
            for a in range(4):
                if sv[a] > 0.0:
                    pos[npos] = a
                    npos += 1
                else:
                    neg[nneg] = a
                    nneg += 1
            if npos == 0 or npos == 4:
                continue
            # polygon of the S=0 plane inside the tet, edges tagged with the
            # tet vertex excluded from the face each edge lies on
            if npos == 2:
                nedge = 4
                A = pos[0]
                B = pos[1]
                C = neg[0]
                D = neg[1]
                pa[0] = A
                pb[0] = C
                pa[1] = A
                pb[1] = D
                pa[2] = B
                pb[2] = D
                pa[3] = B
                pb[3] = C
                pex[0] = B
                pex[1] = C
                pex[2] = A
                pex[3] = D
            else:
                nedge = 3
                if npos == 1:
                    lone = pos[0]
                    o0 = neg[0]
                    o1 = neg[1]
                    o2 = neg[2]
                else:
                    lone = neg[0]
                    o0 = pos[0]
                    o1 = pos[1]
                    o2 = pos[2]
                pa[0] = lone
                pb[0] = o0
                pa[1] = lone
                pb[1] = o1
                pa[2] = lone
                pb[2] = o2
                pex[0] = o2
                pex[1] = o0
                pex[2] = o1
            for e in range(nedge):
                a = pa[e]
                b = pb[e]
                # canonical endpoint order by node id keeps the interpolated
                # point bit-identical in every tet that shares the edge
                if gid[a] > gid[b]:
                    a, b = b, a
                tt = sv[a] / (sv[a] - sv[b])
                epx[e] = vx[a] + tt * (vx[b] - vx[a])
                epy[e] = vy[a] + tt * (vy[b] - vy[a])
                epz[e] = vz[a] + tt * (vz[b] - vz[a])
                w = tv[a] + tt * (tv[b] - tv[a])
                if w == 0.0:
                    w = 1e-30
                ew[e] = w
                elo[e] = gid[a]
                ehi[e] = gid[b]
            ncross = 0
            for e in range(nedge):
                e2 = e + 1
                if e2 == nedge:
                    e2 = 0
                if ew[e] * ew[e2] < 0.0:
                    if ncross < 2:
                        cc[ncross] = e
                    else:
                        defects += 1
                    ncross += 1
            if ncross < 2:
                continue
            for ii in range(2):
                e = cc[ii]
                e2 = e + 1
                if e2 == nedge:
                    e2 = 0
                # canonical order by parent-edge key, same in the facing tet
                if elo[e] > elo[e2] or (elo[e] == elo[e2] and ehi[e] > ehi[e2]):
                    e, e2 = e2, e
                s = ew[e] / (ew[e] - ew[e2])
                pts[nseg, 3 * ii + 0] = epx[e] + s * (epx[e2] - epx[e])
                pts[nseg, 3 * ii + 1] = epy[e] + s * (epy[e2] - epy[e])
                pts[nseg, 3 * ii + 2] = epz[e] + s * (epz[e2] - epz[e])
                # face key: sorted ids of the three tet vertices on the face
                ex = pex[cc[ii]]
                j = 0
                for a in range(4):
                    if a != ex:
                        fk[j] = gid[a]
                        j += 1
                if fk[0] > fk[1]:
                    fk[0], fk[1] = fk[1], fk[0]
                if fk[1] > fk[2]:
                    fk[1], fk[2] = fk[2], fk[1]
                if fk[0] > fk[1]:
                    fk[0], fk[1] = fk[1], fk[0]
                keys[nseg, 3 * ii + 0] = fk[0]
                keys[nseg, 3 * ii + 1] = fk[1]
                keys[nseg, 3 * ii + 2] = fk[2]
            # orient the segment along grad S x grad T (fields are linear
            # inside the tet, so both gradients fall out of the vertex chain)
            for j in range(3):
                axj = TET_PERMS[m, j]
                gS[axj] = (sv[j + 1] - sv[j]) / h3[axj]
                gT[axj] = (tv[j + 1] - tv[j]) / h3[axj]
            dx = gS[1] * gT[2] - gS[2] * gT[1]
            dy = gS[2] * gT[0] - gS[0] * gT[2]
            dz = gS[0] * gT[1] - gS[1] * gT[0]
            dot = (
                (pts[nseg, 3] - pts[nseg, 0]) * dx
                + (pts[nseg, 4] - pts[nseg, 1]) * dy
                + (pts[nseg, 5] - pts[nseg, 2]) * dz
            )
            if dot < 0.0:
                for j in range(3):
                    pts[nseg, j], pts[nseg, 3 + j] = pts[nseg, 3 + j], pts[nseg, j]
                    keys[nseg, j], keys[nseg, 3 + j] = keys[nseg, 3 + j], keys[nseg, j]
            nseg += 1
    return nseg, defects
