"""Node-centered cubic grid, boundary conditions, stencils, quadrature.

The domain is [-L, L]^3. Non-periodic axes place nodes on both walls
(h = 2L/(n-1)); periodic axes drop the duplicate wall node (h = 2L/n).
Arrays are indexed [ix, iy, iz].
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import backend

PERIODIC = "periodic"
NONPERIODIC = "nonperiodic"

FACE_NAMES = ("x-", "x+", "y-", "y+", "z-", "z+")


@dataclass(frozen=True)
class Grid3:
    """Cubic node-centered grid on [-L, L]^3 with per-axis spacing."""

    L: float
    n: int
    axis_bc: tuple  # three of PERIODIC / NONPERIODIC
    h: tuple = field(init=False)

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if len(self.axis_bc) != 3 or any(
            a not in (PERIODIC, NONPERIODIC) for a in self.axis_bc
        ):
            raise ValueError("axis_bc must be three of %r/%r" % (PERIODIC, NONPERIODIC))
        hs = tuple(
            2.0 * self.L / self.n if a == PERIODIC else 2.0 * self.L / (self.n - 1)
            for a in self.axis_bc
        )
        object.__setattr__(self, "h", hs)

    @property
    def periodic(self):
        return tuple(a == PERIODIC for a in self.axis_bc)

    @property
    def h_max(self):
        return max(self.h)

    @property
    def shape(self):
        return (self.n, self.n, self.n)

    def coords(self, axis):
        """Node coordinates along one axis."""
        return -self.L + self.h[axis] * np.arange(self.n)

    def meshgrid(self):
        return np.meshgrid(self.coords(0), self.coords(1), self.coords(2), indexing="ij")


def make_grid(L, n, axis_bc=(NONPERIODIC, NONPERIODIC, NONPERIODIC)):
    """Build a Grid3; axis_bc entries are 'periodic' or 'nonperiodic'."""
    return Grid3(float(L), int(n), tuple(axis_bc))


@dataclass(frozen=True)
class FaceBC:
    """Condition on one boundary face.

    kind: 'dirichlet', 'neumann' (zero normal derivative) or 'periodic'.
    values: for Dirichlet, pinned value per field name (e.g. {'u': ..., 'v': ...}).
    """

    kind: str
    values: dict = None

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann", "periodic"):
            raise ValueError("unknown face kind %r" % (self.kind,))
        if self.kind == "dirichlet" and not self.values:
            raise ValueError("dirichlet face needs pinned values")


@dataclass(frozen=True)
class BoundarySpec:
    """Six per-face conditions, ordered x-, x+, y-, y+, z-, z+.

    Periodic faces must come in opposing pairs; validate() checks the six
    entries against a grid's axis kinds.
    """

    faces: tuple

    def __post_init__(self):
        if len(self.faces) != 6:
            raise ValueError("need exactly 6 faces")
        for ax in range(3):
            a, b = self.faces[2 * ax], self.faces[2 * ax + 1]
            if (a.kind == "periodic") != (b.kind == "periodic"):
                raise ValueError("periodic faces must pair up on axis %d" % ax)

    @classmethod
    def all_dirichlet(cls, values):
        return cls(tuple(FaceBC("dirichlet", dict(values)) for _ in range(6)))

    @classmethod
    def all_periodic(cls):
        return cls(tuple(FaceBC("periodic") for _ in range(6)))

    @classmethod
    def all_neumann(cls):
        return cls(tuple(FaceBC("neumann") for _ in range(6)))

    @classmethod
    def from_axis_kinds(cls, kinds, dirichlet_values=None):
        """kinds: three of 'dirichlet'/'neumann'/'periodic', both faces alike."""
        faces = []
        for k in kinds:
            if k == "dirichlet":
                faces.extend([FaceBC("dirichlet", dict(dirichlet_values))] * 2)
            else:
                faces.extend([FaceBC(k)] * 2)
        return cls(tuple(faces))

    def validate(self, grid):
        for ax in range(3):
            per = self.faces[2 * ax].kind == "periodic"
            if per != (grid.axis_bc[ax] == PERIODIC):
                raise ValueError(
                    "axis %d: grid is %s but faces are %s"
                    % (ax, grid.axis_bc[ax], self.faces[2 * ax].kind)
                )


@dataclass
class ScalarField:
    grid: Grid3
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError("field shape %r does not match grid %r" % (self.values.shape, self.grid.shape))

    @classmethod
    def full(cls, grid, value):
        return cls(grid, np.full(grid.shape, float(value)))

    def copy(self):
        return ScalarField(self.grid, self.values.copy())


@dataclass
class VectorField3:
    x: ScalarField
    y: ScalarField
    z: ScalarField

    @property
    def grid(self):
        return self.x.grid

    @classmethod
    def from_arrays(cls, grid, ax, ay, az):
        return cls(ScalarField(grid, ax), ScalarField(grid, ay), ScalarField(grid, az))

    def arrays(self):
        return self.x.values, self.y.values, self.z.values


def _pad(values, grid):
    """Ghost-pad by one layer: wrap on periodic axes, mirror elsewhere.

    The mirror ghost f[-1] = f[1] realizes the zero-flux stencil; Dirichlet
    and natural faces are corrected one-sided by the callers afterwards.
    """
    fp = values
    for ax in range(3):
        mode = "wrap" if grid.periodic[ax] else "reflect"
        width = [(0, 0), (0, 0), (0, 0)]
        width[ax] = (1, 1)
        fp = np.pad(fp, width, mode=mode)
    return fp


def _onesided_faces(grid, bc):
    """(axis, side) pairs needing one-sided stencils.

    bc None means natural handling: one-sided at every non-periodic face,
    with no assumption on the normal derivative.
    """
    out = []
    for ax in range(3):
        if grid.periodic[ax]:
            continue
        for side in (0, 1):
            if bc is None or bc.faces[2 * ax + side].kind == "dirichlet":
                out.append((ax, side))
    return out


def _face_slices(ax, side, n, depth):
    """Index tuples for the nodes at distance 0..depth-1 from a face."""
    out = []
    for d in range(depth):
        idx = [slice(None)] * 3
        idx[ax] = d if side == 0 else n - 1 - d
        out.append(tuple(idx))
    return out


def gradient(f, bc=None):
    """Second-order gradient. Centered in the interior; one-sided at
    Dirichlet (or, with bc None, all non-periodic) faces; mirror ghost at
    zero-flux faces; wrap at periodic faces."""
    grid = f.grid
    if bc is not None:
        bc.validate(grid)
    fp = _pad(f.values, grid)
    k = backend.kernels()
    gx, gy, gz = k.gradient_padded(fp, 0.5 / grid.h[0], 0.5 / grid.h[1], 0.5 / grid.h[2])
    comps = (gx, gy, gz)
    vals = f.values
    for ax, side in _onesided_faces(grid, bc):
        s0, s1, s2 = _face_slices(ax, side, grid.n, 3)
        sign = 1.0 if side == 0 else -1.0
        comps[ax][s0] = sign * (-3.0 * vals[s0] + 4.0 * vals[s1] - vals[s2]) / (2.0 * grid.h[ax])
    return VectorField3.from_arrays(grid, gx, gy, gz)


def laplacian(f, bc=None):
    """Second-order 7-point laplacian with the same face handling as gradient."""
    grid = f.grid
    if bc is not None:
        bc.validate(grid)
    fp = _pad(f.values, grid)
    k = backend.kernels()
    out = k.laplacian_padded(
        fp, 1.0 / grid.h[0] ** 2, 1.0 / grid.h[1] ** 2, 1.0 / grid.h[2] ** 2
    )
    vals = f.values
    for ax, side in _onesided_faces(grid, bc):
        s0, s1, s2, s3 = _face_slices(ax, side, grid.n, 4)
        ih2 = 1.0 / grid.h[ax] ** 2
        onesided = (2.0 * vals[s0] - 5.0 * vals[s1] + 4.0 * vals[s2] - vals[s3]) * ih2
        mirrored = 2.0 * (vals[s1] - vals[s0]) * ih2
        out[s0] += onesided - mirrored
    return ScalarField(grid, out)


def divergence(w, bc=None):
    gx = gradient(w.x, bc).x.values
    gy = gradient(w.y, bc).y.values
    gz = gradient(w.z, bc).z.values
    return ScalarField(w.grid, gx + gy + gz)


def curl(w, bc=None):
    dx = gradient(w.x, bc)
    dy = gradient(w.y, bc)
    dz = gradient(w.z, bc)
    cx = dz.y.values - dy.z.values
    cy = dx.z.values - dz.x.values
    cz = dy.x.values - dx.y.values
    return VectorField3.from_arrays(w.grid, cx, cy, cz)


def _axis_weights(grid, ax):
    w = np.full(grid.n, grid.h[ax])
    if not grid.periodic[ax]:
        w[0] *= 0.5
        w[-1] *= 0.5
    return w


def volume_integral(f):
    """Trapezoidal volume integral over the box.

    Half weights on non-periodic walls, full weights on periodic axes. The
    reduction is an exactly rounded float sum, so cancellations (gauge
    shifts, periodic pair sums) survive down to one ulp of the result.
    """
    grid = f.grid
    wx = _axis_weights(grid, 0)
    wy = _axis_weights(grid, 1)
    wz = _axis_weights(grid, 2)
    wf = f.values * wx[:, None, None] * wy[None, :, None] * wz[None, None, :]
    return math.fsum(wf.ravel().tolist())


FACE_AXIS_SIDE = {name: (i // 2, i % 2) for i, name in enumerate(FACE_NAMES)}


def face_node_slice(grid, face):
    """Index tuple selecting the nodes of one boundary face.

    On a periodic axis both faces map to the same node slice (the i=0
    plane); values there coincide and a face pair cancels exactly in any
    signed sum over outward normals.
    """
    ax, side = FACE_AXIS_SIDE[face]
    idx = [slice(None)] * 3
    if grid.periodic[ax]:
        idx[ax] = 0
    else:
        idx[ax] = 0 if side == 0 else grid.n - 1
    return tuple(idx)


def surface_integral(grid, face_values):
    """2D trapezoid over selected faces; face_values maps face name to a
    2D node array of the integrand (already projected on the outward
    normal by the caller)."""
    total = 0.0
    for face, vals in face_values.items():
        ax, _side = FACE_AXIS_SIDE[face]
        t1, t2 = [a for a in range(3) if a != ax]
        w1 = _axis_weights(grid, t1)
        w2 = _axis_weights(grid, t2)
        total += float(np.einsum("ij,i,j->", vals, w1, w2))
    return total
