"""Level-set geometry: isosurfaces and intersection curves of two fields.

The intersection of the u and v level surfaces is extracted per
tetrahedron of a Freudenthal-subdivided grid, which yields straight
segments whose endpoints sit on tetrahedron faces. Segments are chained
into polylines by matching face identities (sorted global node id
triples), an integer key, so the chaining needs no geometric tolerance.
"""
from dataclasses import dataclass

import numpy as np
from skimage.measure import marching_cubes

from . import backend
from .grid import PERIODIC


@dataclass(frozen=True)
class IsoPair:
    """Level pair (u_level, v_level) defining one intersection curve set."""

    u_level: float
    v_level: float


@dataclass
class TriMesh:
    """Triangle surface mesh; vertices (m, 3), triangles (k, 3) indices."""

    vertices: np.ndarray
    triangles: np.ndarray

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))


@dataclass
class Polyline:
    """Ordered curve vertices; closed means the last edge returns to the
    first point (which is not repeated)."""

    points: np.ndarray
    closed: bool

    def __len__(self):
        return len(self.points)


class CurveSet(list):
    """List of Polylines plus the chaining defect counter."""

    defect_count = 0

    @property
    def closed_curves(self):
        return [c for c in self if c.closed]

    @property
    def open_count(self):
        return sum(1 for c in self if not c.closed)


def extract_isosurface(f, level):
    """Marching-cubes triangle mesh of one level surface.

    Returns an empty mesh when the level does not lie strictly inside the
    field range. Degenerate triangles (area <= 1e-12) are dropped.
    """
    vals = f.values
    lo = float(vals.min())
    hi = float(vals.max())
    if not (lo < level < hi):
        return TriMesh.empty()
    grid = f.grid
    verts, faces, _normals, _vv = marching_cubes(vals, level=float(level), spacing=grid.h)
    verts = verts + np.array([-grid.L, -grid.L, -grid.L])
    a = verts[faces[:, 1]] - verts[faces[:, 0]]
    b = verts[faces[:, 2]] - verts[faces[:, 0]]
    areas = 0.5 * np.linalg.norm(np.cross(a, b), axis=1)
    return TriMesh(verts, faces[areas > 1e-12])


def _nudge(values, level):
    """Shift by the level and push exact zeros off zero, deterministically."""
    s = values - level
    scale = float(values.max() - values.min())
    if scale == 0.0:
        scale = max(abs(level), 1.0)
    s[s == 0.0] = 1e-12 * scale
    return s


def _cell_span_mask(A, grid):
    """Cells whose 8 corners straddle zero (both signs present)."""
    n = grid.n
    ext = A
    for ax in range(3):
        if grid.periodic[ax]:
            first = np.take(ext, [0], axis=ax)
            ext = np.concatenate([ext, first], axis=ax)
    ncell = [n if grid.periodic[ax] else n - 1 for ax in range(3)]
    mn = None
    mx = None
    for di in (0, 1):
        for dj in (0, 1):
            for dk in (0, 1):
                c = ext[di:di + ncell[0], dj:dj + ncell[1], dk:dk + ncell[2]]
                mn = c if mn is None else np.minimum(mn, c)
                mx = c if mx is None else np.maximum(mx, c)
    return (mn < 0.0) & (mx > 0.0)


def extract_intersection_curves(u, v, pair):
    """Polylines where surface u = u_level meets surface v = v_level.

    Curves are chained with exact face-key matching, oriented along
    grad u x grad v, and unwrapped across periodic seams so consecutive
    points stay within one cell of each other. The returned CurveSet
    carries a defect_count; anything nonzero means the segment soup was
    not two-manifold-clean and is reported rather than silently dropped.
    """
    grid = u.grid
    if v.grid is not u.grid and v.grid != u.grid:
        raise ValueError("u and v must share a grid")
    S = _nudge(u.values, pair.u_level)
    T = _nudge(v.values, pair.v_level)
    mask = _cell_span_mask(S, grid) & _cell_span_mask(T, grid)
    cells = np.argwhere(mask).astype(np.int64)
    out = CurveSet()
    out.defect_count = 0
    if len(cells) == 0:
        return out
    cap = 6 * len(cells)
    pts = np.empty((cap, 6))
    keys = np.empty((cap, 6), dtype=np.int64)
    k = backend.kernels()
    px, py, pz = grid.periodic
    nseg, defects = k.tet_segments(
        S, T, cells, grid.n,
        grid.h[0], grid.h[1], grid.h[2],
        -grid.L, -grid.L, -grid.L,
        px, py, pz, pts, keys,
    )
    out.defect_count = int(defects)
    if nseg == 0:
        return out
    pts = pts[:nseg]
    keys = keys[:nseg]
    curves, chain_defects = _chain_segments(pts, keys)
    out.defect_count += chain_defects
    for cpts, closed, forward_votes, total_votes in curves:
        arr = np.array(cpts)
        if total_votes > 0 and forward_votes * 2 < total_votes:
            arr = arr[::-1]
        arr, closed = _unwrap(arr, grid, closed)
        arr = _drop_exact_repeats(arr)
        if len(arr) < 2 or (closed and len(arr) < 3):
            continue
        out.append(Polyline(arr, closed))
    return out


def _chain_segments(pts, keys):
    """Walk the endpoint-key graph into polylines.

    Every face key should be shared by at most two segment ends; interior
    keys have degree two, domain-boundary keys degree one (open ends).
    """
    lookup = {}
    defects = 0
    nseg = len(pts)
    for s in range(nseg):
        for e in (0, 1):
            kk = (keys[s, 3 * e], keys[s, 3 * e + 1], keys[s, 3 * e + 2])
            lst = lookup.setdefault(kk, [])
            if len(lst) >= 2:
                defects += 1
                continue
            lst.append((s, e))

    def endpoint(s, e):
        return pts[s, 3 * e:3 * e + 3]

    def key_of(s, e):
        return (keys[s, 3 * e], keys[s, 3 * e + 1], keys[s, 3 * e + 2])

    def partner(s, e):
        for cand in lookup.get(key_of(s, e), ()):
            if cand != (s, e):
                return cand
        return None

    visited = np.zeros(nseg, dtype=bool)
    curves = []
    for s0 in range(nseg):
        if visited[s0]:
            continue
        visited[s0] = True
        # walk forward out of the oriented exit end
        chain = [endpoint(s0, 0), endpoint(s0, 1)]
        fwd = 1
        tot = 1
        closed = False
        cur = (s0, 1)
        while True:
            nxt = partner(*cur)
            if nxt is None:
                break
            s, e = nxt
            if s == s0:
                closed = True
                break
            if visited[s]:
                # key multiplicity defect already counted; stop the walk
                break
            visited[s] = True
            exit_e = 1 - e
            chain.append(endpoint(s, exit_e))
            fwd += 1 if e == 0 else 0
            tot += 1
            cur = (s, exit_e)
        if not closed:
            back = []
            cur = (s0, 0)
            while True:
                nxt = partner(*cur)
                if nxt is None:
                    break
                s, e = nxt
                if s == s0 or visited[s]:
                    break
                visited[s] = True
                exit_e = 1 - e
                back.append(endpoint(s, exit_e))
                fwd += 1 if e == 1 else 0
                tot += 1
                cur = (s, exit_e)
            chain = list(reversed(back)) + chain
        else:
            chain = chain[:-1] if _same_point(chain[-1], chain[0]) else chain
        curves.append((chain, closed, fwd, tot))
    return curves, defects


def _same_point(a, b):
    return a[0] == b[0] and a[1] == b[1] and a[2] == b[2]


def _unwrap(arr, grid, closed):
    """Shift points by box periods so consecutive gaps stay small.

    A closed chain that fails to land back on its start after unwrapping
    winds around the torus; it is demoted to open rather than fed to
    linking integrals as if it bounded nothing.
    """
    if not any(grid.periodic):
        return arr, closed
    period = 2.0 * grid.L
    arr = arr.copy()
    for ax in range(3):
        if not grid.periodic[ax]:
            continue
        for i in range(1, len(arr)):
            d = arr[i, ax] - arr[i - 1, ax]
            if abs(d) > grid.L:
                arr[i:, ax] -= period * round(d / period)
    if closed:
        gap = arr[0] - arr[-1]
        tol = 2.0 * grid.h_max
        if np.any(np.abs(gap) > tol):
            closed = False
    return arr, closed


def _drop_exact_repeats(arr):
    if len(arr) < 2:
        return arr
    keep = np.ones(len(arr), dtype=bool)
    for i in range(1, len(arr)):
        if _same_point(arr[i], arr[i - 1]):
            keep[i] = False
    return arr[keep]
