"""Legacy ASCII VTK polydata writers for surfaces and curves.

Deterministic output: fixed ordering, %.17g floats. A small reader for
the curve files supports the link subcommand and round-trip tests.
"""
import numpy as np

from .curves import Polyline, TriMesh


def _write_points(fh, pts):
    fh.write("POINTS %d double\n" % len(pts))
    for p in pts:
        fh.write("%.17g %.17g %.17g\n" % (p[0], p[1], p[2]))


def write_mesh(path, mesh, title="surface"):
    """Triangle mesh as POLYDATA with POLYGONS cells."""
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n%s\nASCII\nDATASET POLYDATA\n" % title)
        _write_points(fh, mesh.vertices)
        tris = mesh.triangles
        fh.write("POLYGONS %d %d\n" % (len(tris), 4 * len(tris)))
        for t in tris:
            fh.write("3 %d %d %d\n" % (t[0], t[1], t[2]))


def write_curves(path, curves, title="curves"):
    """Polylines as POLYDATA LINES; closed curves repeat their first index."""
    total_pts = sum(len(c.points) for c in curves)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n%s\nASCII\nDATASET POLYDATA\n" % title)
        pts = (
            np.concatenate([c.points for c in curves])
            if curves else np.zeros((0, 3))
        )
        _write_points(fh, pts)
        sizes = [len(c.points) + (1 if c.closed else 0) for c in curves]
        fh.write("LINES %d %d\n" % (len(curves), sum(sizes) + len(curves)))
        base = 0
        for c, size in zip(curves, sizes):
            idx = list(range(base, base + len(c.points)))
            if c.closed:
                idx.append(base)
            fh.write("%d %s\n" % (size, " ".join(str(i) for i in idx)))
            base += len(c.points)
    assert base == total_pts


def read_curves(path):
    """Read back a curves file written by write_curves."""
    with open(path) as fh:
        tokens = fh.read().split("\n")
    i = 0
    while i < len(tokens) and not tokens[i].startswith("POINTS"):
        i += 1
    if i == len(tokens):
        raise ValueError("%s: no POINTS section" % path)
    npts = int(tokens[i].split()[1])
    pts = np.empty((npts, 3))
    for j in range(npts):
        vals = tokens[i + 1 + j].split()
        pts[j] = [float(v) for v in vals]
    i += 1 + npts
    while i < len(tokens) and not tokens[i].startswith("LINES"):
        i += 1
    if i == len(tokens):
        raise ValueError("%s: no LINES section" % path)
    ncurves = int(tokens[i].split()[1])
    curves = []
    for j in range(ncurves):
        vals = [int(v) for v in tokens[i + 1 + j].split()]
        idx = vals[1:]
        closed = len(idx) > 1 and idx[-1] == idx[0]
        if closed:
            idx = idx[:-1]
        curves.append(Polyline(pts[idx].copy(), closed))
    return curves
